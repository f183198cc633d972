// Copyright 2026 The qlang Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Linear type inference. Shapes are unified as usual; the "!" on each arrow
// is a boolean variable. Contraction, weakening, dereliction and promotion
// become Horn clauses over those variables, solved by least fixpoint once the
// shapes are known.

#include <algorithm>
#include <map>

#include "qlang/qlc.hpp"

namespace qlang::qlc {

namespace {

struct TNode;
using TPtr = std::shared_ptr<TNode>;

struct TNode {
  QType::Kind kind = QType::Kind::kVar;
  TPtr a, b;
  int flag = -1;  // arrows only
  TPtr link;
  int id = 0;
};

struct Binding {
  std::string name;
  TPtr type;
  int id;
};

struct Env {
  Binding b;
  std::shared_ptr<const Env> next;
};
using EnvPtr = std::shared_ptr<const Env>;

using Usage = std::map<int, int>;  // binding id -> 1, or 2 for "more than once"

void add_usage(Usage& into, const Usage& u) {
  for (const auto& [id, c] : u) into[id] = std::min(2, into[id] + c);
}

std::string where(const Term& t) {
  return t->line > 0 ? std::to_string(t->line) + ":" + std::to_string(t->column) + ": " : "";
}

class Inference {
 public:
  TPtr fresh() {
    auto t = std::make_shared<TNode>();
    t->id = next_id_++;
    return t;
  }
  TPtr base(QType::Kind k) {
    auto t = fresh();
    t->kind = k;
    return t;
  }
  TPtr arrow(TPtr a, TPtr b, int flag = -1) {
    auto t = base(QType::Kind::kArrow);
    t->a = std::move(a);
    t->b = std::move(b);
    t->flag = flag < 0 ? new_flag() : flag;
    return t;
  }
  TPtr pair_of(QType::Kind k, TPtr a, TPtr b) {
    auto t = base(k);
    t->a = std::move(a);
    t->b = std::move(b);
    return t;
  }

  int new_flag() {
    parent_.push_back(static_cast<int>(parent_.size()));
    return parent_.back();
  }
  int find(int f) {
    while (parent_[f] != f) f = parent_[f] = parent_[parent_[f]];
    return f;
  }

  static TPtr repr(TPtr t) {
    while (t->kind == QType::Kind::kVar && t->link) t = t->link;
    return t;
  }

  TPtr from_qtype(const QType& q, std::map<int, TPtr>& vars, bool with_flags) {
    using K = QType::Kind;
    switch (q.kind) {
      case K::kVar: {
        auto& v = vars[q.var];
        if (!v) v = fresh();
        return v;
      }
      case K::kArrow: {
        TPtr t = arrow(from_qtype(*q.a, vars, with_flags), from_qtype(*q.b, vars, with_flags));
        if (with_flags) {
          if (q.bang) {
            facts_.push_back(t->flag);
          } else {
            goals_.push_back({t->flag, "type is duplicable where a linear function was required"});
          }
        }
        return t;
      }
      case K::kTensor:
      case K::kCirc:
        return pair_of(q.kind, from_qtype(*q.a, vars, with_flags), from_qtype(*q.b, vars, with_flags));
      default:
        return base(q.kind);
    }
  }

  QTypePtr to_qtype(const TPtr& t0, const std::vector<bool>* model) {
    const TPtr t = repr(t0);
    using K = QType::Kind;
    switch (t->kind) {
      case K::kVar: {
        auto q = std::make_shared<QType>();
        q->var = t->id;
        return q;
      }
      case K::kArrow:
        return QType::arrow(to_qtype(t->a, model), to_qtype(t->b, model),
                            model && (*model)[static_cast<std::size_t>(find(t->flag))]);
      case K::kTensor:
        return QType::tensor(to_qtype(t->a, model), to_qtype(t->b, model));
      case K::kCirc:
        return QType::circ(to_qtype(t->a, model), to_qtype(t->b, model));
      case K::kQbit:
        return QType::qbit();
      case K::kBit:
        return QType::bit();
      case K::kUnit:
        return QType::unit();
    }
    return nullptr;
  }

  std::string show(const TPtr& t) { return to_string(*to_qtype(t, nullptr)); }

  bool occurs(const TPtr& v, const TPtr& t0) {
    const TPtr t = repr(t0);
    if (t == v) return true;
    return (t->a && occurs(v, t->a)) || (t->b && occurs(v, t->b));
  }

  void unify(const TPtr& x0, const TPtr& y0, const Term& at) {
    const TPtr x = repr(x0);
    const TPtr y = repr(y0);
    if (x == y) return;
    if (x->kind == QType::Kind::kVar || y->kind == QType::Kind::kVar) {
      const TPtr v = x->kind == QType::Kind::kVar ? x : y;
      const TPtr o = v == x ? y : x;
      if (occurs(v, o)) throw TypeError(where(at) + "infinite type " + show(v) + " = " + show(o));
      v->link = o;
      return;
    }
    if (x->kind != y->kind) {
      throw TypeError(where(at) + "type mismatch: " + show(x) + " vs " + show(y));
    }
    if (x->kind == QType::Kind::kArrow) {
      const int fx = find(x->flag);
      const int fy = find(y->flag);
      if (fx != fy) parent_[fx] = fy;
    }
    if (x->a) {
      unify(x->a, y->a, at);
      unify(x->b, y->b, at);
    }
  }

  TPtr qbits(int n) {
    if (n == 0) return base(QType::Kind::kUnit);
    TPtr t = base(QType::Kind::kQbit);
    for (int i = 1; i < n; ++i) t = pair_of(QType::Kind::kTensor, base(QType::Kind::kQbit), t);
    return t;
  }

  // ---- judgments ----

  std::pair<TPtr, Usage> infer(const Term& t, const EnvPtr& env) {
    return std::visit([&](const auto& n) { return rule(n, t, env); }, t->v);
  }

  std::pair<TPtr, Usage> rule(const Var& n, const Term& t, const EnvPtr& env) {
    for (const Env* e = env.get(); e; e = e->next.get()) {
      if (e->b.name != n.name) continue;
      TPtr use = fresh();
      derefs_.push_back({use, e->b.type, t});
      return {use, Usage{{e->b.id, 1}}};
    }
    throw TypeError(where(t) + "unbound variable '" + n.name + "'");
  }

  // A variable that is not used exactly once must be a !-function.
  void check_binder(const Binding& b, const Usage& u, const Term& at) {
    auto it = u.find(b.id);
    const int c = it == u.end() ? 0 : it->second;
    if (c == 1) return;
    const std::string msg = where(at) + "linear variable '" + b.name + "' " +
                            (c == 0 ? "is never used" : "is used more than once");
    bangs_.push_back({b.type, msg, at});
  }

  Binding bind(const std::string& name, TPtr type) { return Binding{name, std::move(type), next_binding_++}; }

  static EnvPtr extend(EnvPtr env, Binding b) { return std::make_shared<const Env>(Env{std::move(b), std::move(env)}); }

  std::pair<TPtr, Usage> rule(const Lam& n, const Term& t, const EnvPtr& env) {
    const Binding x = bind(n.param, fresh());
    auto [body, u] = infer(n.body, extend(env, x));
    check_binder(x, u, t);
    u.erase(x.id);
    TPtr ty = arrow(x.type, body);
    // Promotion: a !-function may only capture !-variables.
    for (const auto& [id, c] : u) {
      const Binding* b = lookup(env, id);
      promotes_.push_back({ty->flag, b->type,
                           where(t) + "cannot promote a function capturing linear variable '" + b->name + "'", t});
    }
    return {ty, u};
  }

  std::pair<TPtr, Usage> rule(const App& n, const Term& t, const EnvPtr& env) {
    auto [f, u1] = infer(n.fn, env);
    auto [a, u2] = infer(n.arg, env);
    TPtr res = fresh();
    unify(f, arrow(a, res), t);
    add_usage(u1, u2);
    return {res, u1};
  }

  std::pair<TPtr, Usage> rule(const Pair& n, const Term&, const EnvPtr& env) {
    auto [a, u1] = infer(n.first, env);
    auto [b, u2] = infer(n.second, env);
    add_usage(u1, u2);
    return {pair_of(QType::Kind::kTensor, a, b), u1};
  }

  std::pair<TPtr, Usage> rule(const LetPair& n, const Term& t, const EnvPtr& env) {
    auto [m, u1] = infer(n.bound, env);
    const Binding x = bind(n.x, fresh());
    const Binding y = bind(n.y, fresh());
    unify(m, pair_of(QType::Kind::kTensor, x.type, y.type), t);
    auto [body, u2] = infer(n.body, extend(extend(env, x), y));
    check_binder(x, u2, t);
    check_binder(y, u2, t);
    u2.erase(x.id);
    u2.erase(y.id);
    add_usage(u1, u2);
    return {body, u1};
  }

  std::pair<TPtr, Usage> rule(const Unit&, const Term&, const EnvPtr&) {
    return {base(QType::Kind::kUnit), {}};
  }

  std::pair<TPtr, Usage> rule(const LetUnit& n, const Term& t, const EnvPtr& env) {
    auto [m, u1] = infer(n.bound, env);
    unify(m, base(QType::Kind::kUnit), t);
    auto [body, u2] = infer(n.body, env);
    add_usage(u1, u2);
    return {body, u1};
  }

  std::pair<TPtr, Usage> rule(const BoolLit&, const Term&, const EnvPtr&) {
    return {base(QType::Kind::kBit), {}};
  }

  std::pair<TPtr, Usage> rule(const If& n, const Term& t, const EnvPtr& env) {
    auto [c, u] = infer(n.cond, env);
    unify(c, base(QType::Kind::kBit), n.cond);
    auto [a, ua] = infer(n.then_branch, env);
    auto [b, ub] = infer(n.else_branch, env);
    unify(a, b, t);
    // Both branches share one linear context.
    Usage merged = ua;
    for (const auto& [id, k] : ub) {
      auto it = merged.find(id);
      merged[id] = (it == merged.end() || it->second != k) ? 2 : k;
    }
    for (auto& [id, k] : merged) {
      if (!ub.count(id)) k = 2;
    }
    add_usage(u, merged);
    return {a, u};
  }

  std::pair<TPtr, Usage> rule(const Const& n, const Term& t, const EnvPtr&) {
    if (n.name == "qinit") return {arrow(base(QType::Kind::kBit), base(QType::Kind::kQbit)), {}};
    if (n.name == "meas") return {arrow(base(QType::Kind::kQbit), base(QType::Kind::kBit)), {}};
    if (n.name == "box" || n.name == "unbox") {
      TPtr a = fresh();
      TPtr b = fresh();
      TPtr fn = arrow(a, b);
      facts_.push_back(fn->flag);
      TPtr c = pair_of(QType::Kind::kCirc, a, b);
      if (n.name == "box") boxes_.push_back({t, a, b});
      return {n.name == "box" ? arrow(fn, c) : arrow(c, fn), {}};
    }
    const int k = qnum::gate_arity(n.name);
    if (!is_gate_name(n.name)) throw TypeError(where(t) + "unknown constant '" + n.name + "'");
    return {arrow(qbits(k), qbits(k)), {}};
  }

  std::pair<TPtr, Usage> rule(const LetRec& n, const Term& t, const EnvPtr& env) {
    const Binding x = bind(n.param, fresh());
    TPtr res = fresh();
    const Binding f = bind(n.fn, arrow(x.type, res));
    facts_.push_back(f.type->flag);
    auto [fb, u1] = infer(n.fn_body, extend(extend(env, f), x));
    unify(fb, res, t);
    check_binder(x, u1, t);
    u1.erase(x.id);
    u1.erase(f.id);
    for (auto& [id, c] : u1) {
      const Binding* b = lookup(env, id);
      bangs_.push_back({b->type, where(t) + "recursive function captures linear variable '" + b->name + "'", t});
      c = 2;
    }
    auto [body, u2] = infer(n.body, extend(env, f));
    u2.erase(f.id);
    add_usage(u1, u2);
    return {body, u1};
  }

  std::pair<TPtr, Usage> rule(const CircLit& n, const Term&, const EnvPtr&) {
    std::map<int, TPtr> vars;
    return {pair_of(QType::Kind::kCirc, from_qtype(*n.boxed->in, vars, false),
                    from_qtype(*n.boxed->out, vars, false)),
            {}};
  }

  std::pair<TPtr, Usage> rule(const CircFn& n, const Term&, const EnvPtr&) {
    std::map<int, TPtr> vars;
    return {arrow(from_qtype(*n.boxed->in, vars, false), from_qtype(*n.boxed->out, vars, false)), {}};
  }

  const Binding* lookup(const EnvPtr& env, int id) {
    for (const Env* e = env.get(); e; e = e->next.get()) {
      if (e->b.id == id) return &e->b;
    }
    throw InternalError("binding " + std::to_string(id) + " escaped its scope");
  }

  // ---- solving ----

  // Dereliction: a use of x may drop the ! of x's declared type.
  bool settle_derefs(bool force) {
    bool progress = false;
    std::vector<Deref> rest;
    for (auto& d : derefs_) {
      const TPtr use = repr(d.use);
      const TPtr decl = repr(d.decl);
      if (decl->kind == QType::Kind::kArrow || use->kind == QType::Kind::kArrow) {
        const TPtr arr = decl->kind == QType::Kind::kArrow ? decl : use;
        TPtr u2 = arrow(arr->a, arr->b);
        TPtr d2 = arrow(arr->a, arr->b);
        unify(use, u2, d.at);
        unify(decl, d2, d.at);
        implications_.push_back({repr(use)->flag, repr(decl)->flag});
        progress = true;
      } else if (decl->kind != QType::Kind::kVar || use->kind != QType::Kind::kVar || force) {
        unify(use, decl, d.at);
        progress = true;
      } else {
        rest.push_back(d);
      }
    }
    derefs_ = std::move(rest);
    return progress;
  }

  void settle_bangs() {
    for (const auto& b : bangs_) {
      TPtr t = repr(b.type);
      if (t->kind == QType::Kind::kVar) {
        unify(t, arrow(fresh(), fresh()), b.at);
        t = repr(t);
      }
      if (t->kind != QType::Kind::kArrow) throw TypeError(b.msg + " (type " + show(t) + " is not duplicable)");
      facts_.push_back(t->flag);
    }
    bangs_.clear();
  }

  std::vector<bool> least_model() {
    std::vector<bool> m(parent_.size(), false);
    std::vector<int> work;
    for (int f : facts_) {
      const int r = find(f);
      if (!m[r]) {
        m[r] = true;
        work.push_back(r);
      }
    }
    std::map<int, std::vector<int>> succ;
    for (const auto& [a, b] : implications_) succ[find(a)].push_back(find(b));
    while (!work.empty()) {
      const int f = work.back();
      work.pop_back();
      for (int g : succ[f]) {
        if (!m[g]) {
          m[g] = true;
          work.push_back(g);
        }
      }
    }
    return m;
  }

  std::vector<bool> solve() {
    while (settle_derefs(false)) {
    }
    settle_bangs();
    while (settle_derefs(false)) {
    }
    settle_derefs(true);
    for (;;) {
      std::vector<Promote> pending;
      for (const auto& p : promotes_) {
        const TPtr t = repr(p.type);
        if (t->kind == QType::Kind::kArrow) {
          implications_.push_back({p.flag, t->flag});
        } else if (t->kind == QType::Kind::kVar) {
          pending.push_back(p);
        } else {
          goals_.push_back({p.flag, p.msg});
        }
      }
      promotes_.clear();
      std::vector<bool> m = least_model();
      bool changed = false;
      for (const auto& p : pending) {
        if (m[find(p.flag)]) {
          bangs_.push_back({p.type, p.msg, p.at});
          changed = true;
        }
        promotes_.push_back(p);
      }
      if (!changed) {
        for (const auto& [f, msg] : goals_) {
          if (m[find(f)]) throw TypeError(msg);
        }
        return m;
      }
      settle_bangs();
    }
  }

  struct Deref {
    TPtr use, decl;
    Term at;
  };
  struct Bang {
    TPtr type;
    std::string msg;
    Term at;
  };
  struct Promote {
    int flag;
    TPtr type;
    std::string msg;
    Term at;
  };
  struct BoxSite {
    Term node;
    TPtr in, out;
  };

  std::vector<BoxSite> boxes_;

 private:
  int next_id_ = 1;
  int next_binding_ = 0;
  std::vector<int> parent_;
  std::vector<int> facts_;
  std::vector<std::pair<int, int>> implications_;
  std::vector<std::pair<int, std::string>> goals_;
  std::vector<Deref> derefs_;
  std::vector<Bang> bangs_;
  std::vector<Promote> promotes_;

 public:
  void add_goal(int flag, std::string msg) { goals_.push_back({flag, std::move(msg)}); }
};

QTypePtr check(const Term& t, const std::vector<std::string>& qubit_vars, const QTypePtr* expected) {
  Inference inf;
  EnvPtr env;
  std::vector<Binding> free;
  for (std::size_t i = 0; i < qubit_vars.size(); ++i) {
    free.push_back(inf.bind(qubit_vars[i], inf.base(QType::Kind::kQbit)));
    env = Inference::extend(env, free.back());
  }
  auto [ty, usage] = inf.infer(t, env);
  for (const auto& b : free) {
    auto it = usage.find(b.id);
    const int c = it == usage.end() ? 0 : it->second;
    if (c != 1) {
      throw TypeError("qubit '" + b.name + "' " + (c == 0 ? "is never used" : "is used more than once"));
    }
  }
  if (expected) {
    std::map<int, TPtr> vars;
    inf.unify(ty, inf.from_qtype(**expected, vars, true), t);
  }
  const std::vector<bool> model = inf.solve();
  for (const auto& b : inf.boxes_) {
    b.node->box_shape = std::make_shared<const std::pair<QTypePtr, QTypePtr>>(inf.to_qtype(b.in, &model),
                                                                             inf.to_qtype(b.out, &model));
  }
  return inf.to_qtype(ty, &model);
}

}  // namespace

QTypePtr typecheck(const Term& t, const std::vector<std::string>& qubit_vars) {
  return check(t, qubit_vars, nullptr);
}

QTypePtr typecheck(const Term& t, const std::vector<std::string>& qubit_vars, const QTypePtr& expected) {
  return check(t, qubit_vars, &expected);
}

}  // namespace qlang::qlc

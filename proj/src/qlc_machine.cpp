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

#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "qlang/qlc.hpp"

namespace qlang::qlc {

namespace {

using Names = std::set<std::string>;

Term remake(const Term& like, decltype(Node::v) v) {
  auto n = std::make_shared<Node>();
  n->v = std::move(v);
  n->line = like->line;
  n->column = like->column;
  n->box_shape = like->box_shape;
  return n;
}

void free_vars(const Term& t, Names& bound, Names& out) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        auto under = [&](std::initializer_list<std::string> names, const Term& body) {
          std::vector<std::string> added;
          for (const auto& x : names) {
            if (bound.insert(x).second) added.push_back(x);
          }
          free_vars(body, bound, out);
          for (const auto& x : added) bound.erase(x);
        };
        if constexpr (std::is_same_v<N, Var>) {
          if (!bound.count(n.name)) out.insert(n.name);
        } else if constexpr (std::is_same_v<N, Lam>) {
          under({n.param}, n.body);
        } else if constexpr (std::is_same_v<N, App>) {
          free_vars(n.fn, bound, out);
          free_vars(n.arg, bound, out);
        } else if constexpr (std::is_same_v<N, Pair>) {
          free_vars(n.first, bound, out);
          free_vars(n.second, bound, out);
        } else if constexpr (std::is_same_v<N, LetPair>) {
          free_vars(n.bound, bound, out);
          under({n.x, n.y}, n.body);
        } else if constexpr (std::is_same_v<N, LetUnit>) {
          free_vars(n.bound, bound, out);
          free_vars(n.body, bound, out);
        } else if constexpr (std::is_same_v<N, If>) {
          free_vars(n.cond, bound, out);
          free_vars(n.then_branch, bound, out);
          free_vars(n.else_branch, bound, out);
        } else if constexpr (std::is_same_v<N, LetRec>) {
          under({n.fn, n.param}, n.fn_body);
          under({n.fn}, n.body);
        }
      },
      t->v);
}

Names free_vars(const Term& t) {
  Names bound, out;
  free_vars(t, bound, out);
  return out;
}

std::string fresh_name(const std::string& base, const Names& avoid) {
  for (int k = 1;; ++k) {
    std::string s = base + "'" + std::to_string(k);
    if (!avoid.count(s)) return s;
  }
}

using Subst = std::map<std::string, Term>;

// Capture-avoiding simultaneous substitution; `fv` is the union of the free
// variables of the substituted values.
Term subst(const Term& t, const Subst& s, const Names& fv);

// Enters a binder: drops shadowed entries and renames binders that would
// capture a free variable of the substituted values.
struct Binder {
  Subst s;
  std::vector<std::string> names;
};

Binder enter(const std::vector<std::string>& names, const Subst& s, const Names& fv,
             const std::vector<Term>& bodies) {
  Binder b{s, names};
  for (auto& x : b.names) {
    b.s.erase(x);
  }
  for (auto& x : b.names) {
    if (!fv.count(x) || b.s.empty()) continue;
    Names avoid = fv;
    for (const auto& body : bodies) {
      const Names f = free_vars(body);
      avoid.insert(f.begin(), f.end());
    }
    for (const auto& y : b.names) avoid.insert(y);
    const std::string y = fresh_name(x, avoid);
    b.s[x] = var(y);
    x = y;
  }
  return b;
}

Term subst(const Term& t, const Subst& s, const Names& fv) {
  if (s.empty()) return t;
  return std::visit(
      [&](const auto& n) -> Term {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Var>) {
          auto it = s.find(n.name);
          return it == s.end() ? t : it->second;
        } else if constexpr (std::is_same_v<N, Lam>) {
          Binder b = enter({n.param}, s, fv, {n.body});
          return remake(t, Lam{b.names[0], subst(n.body, b.s, fv)});
        } else if constexpr (std::is_same_v<N, App>) {
          return remake(t, App{subst(n.fn, s, fv), subst(n.arg, s, fv)});
        } else if constexpr (std::is_same_v<N, Pair>) {
          return remake(t, Pair{subst(n.first, s, fv), subst(n.second, s, fv)});
        } else if constexpr (std::is_same_v<N, LetPair>) {
          Binder b = enter({n.x, n.y}, s, fv, {n.body});
          return remake(t, LetPair{b.names[0], b.names[1], subst(n.bound, s, fv), subst(n.body, b.s, fv)});
        } else if constexpr (std::is_same_v<N, LetUnit>) {
          return remake(t, LetUnit{subst(n.bound, s, fv), subst(n.body, s, fv)});
        } else if constexpr (std::is_same_v<N, If>) {
          return remake(t, If{subst(n.cond, s, fv), subst(n.then_branch, s, fv), subst(n.else_branch, s, fv)});
        } else if constexpr (std::is_same_v<N, LetRec>) {
          Binder inner = enter({n.fn, n.param}, s, fv, {n.fn_body, n.body});
          // The body sees only the function name; rename it consistently.
          Subst outer_s = s;
          outer_s.erase(n.fn);
          if (inner.names[0] != n.fn) outer_s[n.fn] = var(inner.names[0]);
          const Term fb = subst(n.fn_body, inner.s, fv);
          return remake(t, LetRec{inner.names[0], inner.names[1], fb, subst(n.body, outer_s, fv)});
        } else {
          return t;
        }
      },
      t->v);
}

Term subst1(const Term& t, const Subst& s) {
  Names fv;
  for (const auto& [x, v] : s) {
    const Names f = free_vars(v);
    fv.insert(f.begin(), f.end());
  }
  return subst(t, s, fv);
}

// The quantum coprocessor seen by the machine.
class Quantum {
 public:
  virtual ~Quantum() = default;
  virtual std::string qinit(bool b) = 0;
  virtual void gate(const std::string& name, const std::vector<std::string>& targets,
                    const std::vector<std::pair<std::string, qnum::Polarity>>& controls) = 0;
  /// Returns (bit, probability of that outcome).
  virtual std::pair<bool, double> meas(const std::string& q, RandomSource& rng) = 0;
};

class StateQuantum : public Quantum {
 public:
  explicit StateQuantum(Program& p) : p_(p) {}

  std::string qinit(bool b) override {
    std::string name;
    do {
      name = "q" + std::to_string(p_.next_qubit++);
    } while (std::find(p_.l.begin(), p_.l.end(), name) != p_.l.end());
    p_.q = qnum::append_qubit(p_.q, b ? 1 : 0);
    p_.l.push_back(name);
    return name;
  }

  void gate(const std::string& name, const std::vector<std::string>& targets,
            const std::vector<std::pair<std::string, qnum::Polarity>>& controls) override {
    std::vector<int> wires;
    std::vector<qnum::Polarity> pols;
    for (const auto& [c, pol] : controls) {
      wires.push_back(position(c));
      pols.push_back(pol);
    }
    for (const auto& t : targets) wires.push_back(position(t));
    qnum::Matrix u = qnum::gate_matrix(name);
    if (!pols.empty()) u = qnum::with_controls(u, pols);
    p_.q = qnum::apply(p_.q, u, wires);
  }

  std::pair<bool, double> meas(const std::string& q, RandomSource& rng) override {
    const int w = position(q);
    const int n = p_.q.n_qubits();
    double p0 = 0, p1 = 0;
    const auto& a = p_.q.amps();
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      ((i >> (n - 1 - w)) & 1 ? p1 : p0) += std::norm(a[i]);
    }
    if (std::abs(p0 + p1 - 1.0) > 1e-12) {
      throw InternalError("measurement branch probabilities sum to " + std::to_string(p0 + p1));
    }
    const qnum::Measurement m = qnum::measure(p_.q, w, rng);
    p_.q = qnum::discard(m.state, w);
    p_.l.erase(p_.l.begin() + w);
    return {m.bit == 1, m.bit == 1 ? p1 : p0};
  }

 private:
  int position(const std::string& q) const {
    auto it = std::find(p_.l.begin(), p_.l.end(), q);
    if (it == p_.l.end()) throw InternalError("qubit variable '" + q + "' is not in L");
    return static_cast<int>(it - p_.l.begin());
  }

  Program& p_;
};

class CircuitQuantum : public Quantum {
 public:
  explicit CircuitQuantum(int n_inputs) : c(circuit::Circuit::identity(n_inputs)) {
    for (int i = 0; i < n_inputs; ++i) wire["w" + std::to_string(i)] = i;
  }

  std::string qinit(bool b) override {
    const circuit::WireId w = c.init(b ? 1 : 0);
    const std::string name = "w" + std::to_string(w);
    wire[name] = w;
    return name;
  }

  void gate(const std::string& name, const std::vector<std::string>& targets,
            const std::vector<std::pair<std::string, qnum::Polarity>>& controls) override {
    std::vector<circuit::WireId> ts;
    for (const auto& t : targets) ts.push_back(wire.at(t));
    std::vector<circuit::Control> cs;
    for (const auto& [q, pol] : controls) cs.push_back({wire.at(q), pol});
    c.gate(name, ts, {}, cs);
  }

  std::pair<bool, double> meas(const std::string&, RandomSource&) override {
    throw EvalError("dynamic lifting unsupported: meas inside a boxed function");
  }

  circuit::Circuit c;
  std::map<std::string, circuit::WireId> wire;
};

void flatten_vars(const Term& v, std::vector<std::string>& out) {
  if (const auto* p = std::get_if<Pair>(&v->v)) {
    flatten_vars(p->first, out);
    flatten_vars(p->second, out);
  } else if (const auto* x = std::get_if<Var>(&v->v)) {
    out.push_back(x->name);
  } else if (!std::holds_alternative<Unit>(v->v)) {
    throw EvalError("expected a tuple of qubits, got " + to_string(v));
  }
}

// Builds a term of the given qubit shape from a list of names.
Term shape_term(const QType& shape, const std::vector<std::string>& names, std::size_t& next) {
  switch (shape.kind) {
    case QType::Kind::kQbit:
      return var(names.at(next++));
    case QType::Kind::kUnit:
      return unit();
    case QType::Kind::kTensor: {
      Term a = shape_term(*shape.a, names, next);
      return pair(a, shape_term(*shape.b, names, next));
    }
    default:
      throw EvalError("box: interface " + to_string(shape) + " is not made of qubits");
  }
}

Term build_shape(const QType& shape, const std::vector<std::string>& names) {
  std::size_t next = 0;
  return shape_term(shape, names, next);
}

Boxed run_box(const Term& fn, const QTypePtr& in, const QTypePtr& out, std::uint64_t fuel);

class Machine {
 public:
  Machine(Quantum& q, RandomSource& rng) : q_(q), rng_(rng) {}

  Term step(const Term& t) {
    return std::visit([&](const auto& n) { return rule(n, t); }, t->v);
  }

  std::string rule_name;
  double probability = 1.0;

 private:
  template <typename N>
  Term rule(const N&, const Term& t) {
    throw InternalError("stuck term: " + to_string(t));
  }

  Term rule(const App& n, const Term& t) {
    if (!is_value(n.arg)) return remake(t, App{n.fn, step(n.arg)});
    if (!is_value(n.fn)) return remake(t, App{step(n.fn), n.arg});
    return apply(n.fn, n.arg, t);
  }

  Term rule(const Pair& n, const Term& t) {
    if (!is_value(n.first)) return remake(t, Pair{step(n.first), n.second});
    return remake(t, Pair{n.first, step(n.second)});
  }

  Term rule(const LetPair& n, const Term& t) {
    if (!is_value(n.bound)) return remake(t, LetPair{n.x, n.y, step(n.bound), n.body});
    const auto* p = std::get_if<Pair>(&n.bound->v);
    if (!p) throw InternalError("stuck let-pair on " + to_string(n.bound));
    rule_name = "let-pair";
    return subst1(n.body, {{n.x, p->first}, {n.y, p->second}});
  }

  Term rule(const LetUnit& n, const Term& t) {
    if (!is_value(n.bound)) return remake(t, LetUnit{step(n.bound), n.body});
    if (!std::holds_alternative<Unit>(n.bound->v)) throw InternalError("stuck let-unit on " + to_string(n.bound));
    rule_name = "let-unit";
    return n.body;
  }

  Term rule(const If& n, const Term& t) {
    if (!is_value(n.cond)) return remake(t, If{step(n.cond), n.then_branch, n.else_branch});
    const auto* b = std::get_if<BoolLit>(&n.cond->v);
    if (!b) throw InternalError("stuck if on " + to_string(n.cond));
    rule_name = b->value ? "if-tt" : "if-ff";
    return b->value ? n.then_branch : n.else_branch;
  }

  Term rule(const LetRec& n, const Term& t) {
    rule_name = "letrec";
    const Term unfold = lam(n.param, remake(t, LetRec{n.fn, n.param, n.fn_body, n.fn_body}));
    return subst1(n.body, {{n.fn, unfold}});
  }

  Term apply(const Term& fn, const Term& arg, const Term& at) {
    if (const auto* l = std::get_if<Lam>(&fn->v)) {
      rule_name = "beta";
      return subst1(l->body, {{l->param, arg}});
    }
    if (const auto* c = std::get_if<CircFn>(&fn->v)) return replay(*c->boxed, arg);
    const auto* k = std::get_if<Const>(&fn->v);
    if (!k) throw InternalError("stuck application: " + to_string(at));
    if (k->name == "qinit") {
      const auto* b = std::get_if<BoolLit>(&arg->v);
      if (!b) throw InternalError("stuck qinit on " + to_string(arg));
      rule_name = "qinit";
      return var(q_.qinit(b->value));
    }
    if (k->name == "meas") {
      const auto* x = std::get_if<Var>(&arg->v);
      if (!x) throw InternalError("stuck meas on " + to_string(arg));
      const auto [bit, p] = q_.meas(x->name, rng_);
      rule_name = "meas";
      probability = p;
      return lit(bit);
    }
    if (k->name == "box") {
      if (!fn->box_shape) throw EvalError("box has no interface type; typecheck the program first");
      rule_name = "box";
      Boxed b = run_box(arg, fn->box_shape->first, fn->box_shape->second, 1000000);
      auto n = std::make_shared<Node>();
      n->v = CircLit{std::make_shared<const Boxed>(std::move(b))};
      return n;
    }
    if (k->name == "unbox") {
      const auto* c = std::get_if<CircLit>(&arg->v);
      if (!c) throw InternalError("stuck unbox on " + to_string(arg));
      rule_name = "unbox";
      auto n = std::make_shared<Node>();
      n->v = CircFn{c->boxed};
      return n;
    }
    std::vector<std::string> qs;
    flatten_vars(arg, qs);
    if (static_cast<int>(qs.size()) != qnum::gate_arity(k->name)) {
      throw InternalError("gate " + k->name + " applied to " + to_string(arg));
    }
    rule_name = "gate " + k->name;
    q_.gate(k->name, qs, {});
    return arg;
  }

  Term replay(const Boxed& b, const Term& arg) {
    std::vector<std::string> ins;
    flatten_vars(arg, ins);
    const auto& c = b.circuit;
    if (ins.size() != c.inputs().size()) {
      throw EvalError("circuit expects " + std::to_string(c.inputs().size()) + " qubits, got " +
                      std::to_string(ins.size()));
    }
    std::map<circuit::WireId, std::string> name;
    for (std::size_t i = 0; i < ins.size(); ++i) name[c.inputs()[i].id] = ins[i];
    for (const auto& op : c.ops()) {
      if (const auto* g = std::get_if<circuit::GateOp>(&op)) {
        if (!g->params.empty() || g->dagger) throw EvalError("cannot replay parametric gate " + g->name);
        std::vector<std::string> ts;
        for (auto w : g->targets) ts.push_back(name.at(w));
        std::vector<std::pair<std::string, qnum::Polarity>> cs;
        for (const auto& ctl : g->controls) cs.push_back({name.at(ctl.wire), ctl.polarity});
        q_.gate(g->name, ts, cs);
      } else if (const auto* i = std::get_if<circuit::InitOp>(&op)) {
        name[i->wire] = q_.qinit(i->value != 0);
      } else {
        throw EvalError("cannot replay a circuit with measurement or discard");
      }
    }
    std::vector<std::string> outs;
    for (const auto& w : c.outputs()) outs.push_back(name.at(w.id));
    rule_name = "circuit";
    return build_shape(*b.out, outs);
  }

  Quantum& q_;
  RandomSource& rng_;
};

Boxed run_box(const Term& fn, const QTypePtr& in, const QTypePtr& out, std::uint64_t fuel) {
  const int k = qubit_count(*in);
  if (k < 0 || qubit_count(*out) < 0) {
    throw EvalError("box: interface " + to_string(*in) + " -> " + to_string(*out) + " is not made of qubits");
  }
  CircuitQuantum cq(k);
  std::vector<std::string> names;
  for (int i = 0; i < k; ++i) names.push_back("w" + std::to_string(i));
  RandomSource rng(0);
  Machine m(cq, rng);
  Term t = app(fn, build_shape(*in, names));
  for (std::uint64_t s = 0; !is_value(t); ++s) {
    if (s == fuel) throw EvalError("box: fuel exhausted");
    t = m.step(t);
  }
  std::vector<std::string> res;
  flatten_vars(t, res);
  std::vector<circuit::Wire> outs;
  for (const auto& r : res) {
    auto it = cq.wire.find(r);
    if (it == cq.wire.end()) throw EvalError("box: output '" + r + "' is not a qubit");
    outs.push_back({it->second, circuit::WireKind::kQbit});
  }
  if (outs.size() != cq.c.outputs().size()) throw EvalError("box: function drops qubits");
  Boxed b;
  b.circuit = circuit::Circuit(cq.c.inputs(), cq.c.ops(), outs);
  b.in = in;
  b.out = out;
  return b;
}

}  // namespace

Program make_program(Term m) {
  Program p;
  p.m = std::move(m);
  return p;
}

StepResult step(Program& p, RandomSource& rng) {
  if (is_value(p.m)) throw Error("program is already a value");
  StateQuantum sq(p);
  Machine m(sq, rng);
  p.m = m.step(p.m);
  return {m.rule_name, m.probability};
}

EvalResult eval(Program p, RandomSource& rng, std::uint64_t fuel) {
  EvalResult r;
  while (!is_value(p.m)) {
    if (r.steps == fuel) {
      throw EvalError("fuel exhausted after " + std::to_string(fuel) + " steps");
    }
    const StepResult s = step(p, rng);
    r.trace.push_back({s.rule, s.probability, term_size(p.m)});
    r.probability *= s.probability;
    ++r.steps;
  }
  r.program = std::move(p);
  return r;
}

std::string format_trace(const TraceEntry& e) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", e.probability);
  return e.rule + " p=" + buf + " size=" + std::to_string(e.size);
}

Boxed box(const Term& fn, std::uint64_t fuel) {
  const QTypePtr t = typecheck(fn);
  if (t->kind != QType::Kind::kArrow) throw EvalError("box: not a function (type " + to_string(*t) + ")");
  return run_box(fn, t->a, t->b, fuel);
}

}  // namespace qlang::qlc

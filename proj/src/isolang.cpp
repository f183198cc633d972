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

#include "qlang/isolang.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

namespace qlang::iso {

// ---- types ----

namespace {

Type make_type(TypeNode::Kind k, Type a = nullptr, Type b = nullptr, std::string name = {}) {
  auto t = std::make_shared<TypeNode>();
  t->kind = k;
  t->a = std::move(a);
  t->b = std::move(b);
  t->name = std::move(name);
  return t;
}

Type subst_rec(const Type& t, const std::string& x, const Type& s) {
  using K = TypeNode::Kind;
  switch (t->kind) {
    case K::kRec:
      return t->name == x ? s : t;
    case K::kMu:
      return t->name == x ? t : make_type(K::kMu, subst_rec(t->a, x, s), nullptr, t->name);
    case K::kTensor:
    case K::kSum:
      return make_type(t->kind, subst_rec(t->a, x, s), subst_rec(t->b, x, s));
    default:
      return t;
  }
}

bool same_type_in(const Type& a, const Type& b, std::vector<std::pair<std::string, std::string>>& env) {
  using K = TypeNode::Kind;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case K::kUnit:
      return true;
    case K::kParam:
      return a->name == b->name;
    case K::kRec:
      for (auto it = env.rbegin(); it != env.rend(); ++it) {
        if (it->first == a->name || it->second == b->name) return it->first == a->name && it->second == b->name;
      }
      return a->name == b->name;
    case K::kMu: {
      env.push_back({a->name, b->name});
      const bool r = same_type_in(a->a, b->a, env);
      env.pop_back();
      return r;
    }
    default:
      return same_type_in(a->a, b->a, env) && same_type_in(a->b, b->b, env);
  }
}

}  // namespace

Type unit_type() { return make_type(TypeNode::Kind::kUnit); }
Type tensor(Type a, Type b) { return make_type(TypeNode::Kind::kTensor, std::move(a), std::move(b)); }
Type sum(Type a, Type b) { return make_type(TypeNode::Kind::kSum, std::move(a), std::move(b)); }
Type mu(std::string x, Type body) { return make_type(TypeNode::Kind::kMu, std::move(body), nullptr, std::move(x)); }
Type rec_var(std::string x) { return make_type(TypeNode::Kind::kRec, nullptr, nullptr, std::move(x)); }

Type unfold(const Type& t) {
  if (t->kind != TypeNode::Kind::kMu) throw InternalError("unfold of a non-inductive type");
  return subst_rec(t->a, t->name, t);
}

bool same_type(const Type& a, const Type& b) {
  std::vector<std::pair<std::string, std::string>> env;
  return same_type_in(a, b, env);
}

bool has_params(const Type& t) {
  if (t->kind == TypeNode::Kind::kParam) return true;
  return (t->a && has_params(t->a)) || (t->b && has_params(t->b));
}

std::string to_string(const Type& t) {
  using K = TypeNode::Kind;
  switch (t->kind) {
    case K::kUnit:
      return "1";
    case K::kRec:
    case K::kParam:
      return t->name;
    case K::kMu:
      return "mu " + t->name + ". " + to_string(t->a);
    case K::kTensor: {
      std::string a = to_string(t->a);
      std::string b = to_string(t->b);
      if (t->a->kind == K::kSum || t->a->kind == K::kMu || t->a->kind == K::kTensor) a = "(" + a + ")";
      if (t->b->kind == K::kSum || t->b->kind == K::kMu) b = "(" + b + ")";
      return a + " * " + b;
    }
    case K::kSum: {
      std::string a = to_string(t->a);
      if (t->a->kind == K::kSum || t->a->kind == K::kMu) a = "(" + a + ")";
      return a + " + " + to_string(t->b);
    }
  }
  return "?";
}

// ---- values ----

namespace {

Value make_value(VNode::Kind k, Value a = nullptr, Value b = nullptr, std::string name = {}) {
  auto v = std::make_shared<VNode>();
  v->kind = k;
  v->a = std::move(a);
  v->b = std::move(b);
  v->name = std::move(name);
  return v;
}

int rank(VNode::Kind k) {
  switch (k) {
    case VNode::Kind::kUnit:
      return 0;
    case VNode::Kind::kInl:
      return 1;
    case VNode::Kind::kInr:
      return 2;
    default:
      return 3;
  }
}

// Proper list items, if v is nil or a chain of conses ending in nil.
std::optional<std::vector<Value>> list_items(const Value& v) {
  std::vector<Value> items;
  Value cur = v;
  for (;;) {
    if (cur->kind != VNode::Kind::kFold) return std::nullopt;
    const Value& s = cur->a;
    if (s->kind == VNode::Kind::kInl && s->a->kind == VNode::Kind::kUnit) return items;
    if (s->kind != VNode::Kind::kInr || s->a->kind != VNode::Kind::kPair) return std::nullopt;
    items.push_back(s->a->a);
    cur = s->a->b;
  }
}

}  // namespace

Value v_unit() { return make_value(VNode::Kind::kUnit); }
Value v_pair(Value a, Value b) { return make_value(VNode::Kind::kPair, std::move(a), std::move(b)); }
Value v_inl(Value a) { return make_value(VNode::Kind::kInl, std::move(a)); }
Value v_inr(Value a) { return make_value(VNode::Kind::kInr, std::move(a)); }
Value v_fold(Value a) { return make_value(VNode::Kind::kFold, std::move(a)); }
Value v_var(std::string x) { return make_value(VNode::Kind::kVar, nullptr, nullptr, std::move(x)); }
Value v_bool(bool b) { return b ? v_inr(v_unit()) : v_inl(v_unit()); }

Value v_list(const std::vector<Value>& items) {
  Value l = v_fold(v_inl(v_unit()));
  for (auto it = items.rbegin(); it != items.rend(); ++it) l = v_fold(v_inr(v_pair(*it, l)));
  return l;
}

namespace {

std::string value_atom(const Value& v) {
  const std::string s = to_string(v);
  if (s.find(' ') == std::string::npos || s[0] == '<' || s[0] == '[') return s;
  return "(" + s + ")";
}

}  // namespace

int compare(const Value& a, const Value& b) {
  if (a->kind == VNode::Kind::kFold && b->kind == VNode::Kind::kFold) return compare(a->a, b->a);
  if (a->kind == VNode::Kind::kVar || b->kind == VNode::Kind::kVar) {
    if (a->kind != b->kind) return a->kind == VNode::Kind::kVar ? -1 : 1;
    return a->name.compare(b->name);
  }
  if (a->kind != b->kind) return rank(a->kind) < rank(b->kind) ? -1 : 1;
  switch (a->kind) {
    case VNode::Kind::kUnit:
      return 0;
    case VNode::Kind::kPair: {
      const int c = compare(a->a, b->a);
      return c != 0 ? c : compare(a->b, b->b);
    }
    default:
      return compare(a->a, b->a);
  }
}

bool is_closed(const Value& v) {
  if (v->kind == VNode::Kind::kVar) return false;
  return (!v->a || is_closed(v->a)) && (!v->b || is_closed(v->b));
}

std::string to_string(const Value& v) {
  switch (v->kind) {
    case VNode::Kind::kVar:
      return v->name;
    case VNode::Kind::kUnit:
      return "*";
    case VNode::Kind::kPair:
      return "<" + to_string(v->a) + ", " + to_string(v->b) + ">";
    case VNode::Kind::kInl:
      if (v->a->kind == VNode::Kind::kUnit) return "ff";
      return "inl " + value_atom(v->a);
    case VNode::Kind::kInr:
      if (v->a->kind == VNode::Kind::kUnit) return "tt";
      return "inr " + value_atom(v->a);
    case VNode::Kind::kFold: {
      if (auto items = list_items(v)) {
        std::string s = "[";
        for (std::size_t i = 0; i < items->size(); ++i) s += (i ? ", " : "") + to_string((*items)[i]);
        return s + "]";
      }
      const Value& s = v->a;
      if (s->kind == VNode::Kind::kInr && s->a->kind == VNode::Kind::kPair) {
        return to_string(s->a->a) + " :: " + to_string(s->a->b);
      }
      return "fold " + (v->a->kind == VNode::Kind::kUnit || v->a->kind == VNode::Kind::kPair ||
                                v->a->kind == VNode::Kind::kVar
                            ? to_string(v->a)
                            : "(" + to_string(v->a) + ")");
    }
  }
  return "?";
}

AmpValue AmpValue::basis(Value v) {
  AmpValue a;
  a.terms.push_back({1.0, std::move(v)});
  return a;
}

double AmpValue::norm() const {
  double s = 0;
  for (const auto& [c, v] : terms) s += std::norm(c);
  return std::sqrt(s);
}

std::string to_string(const AmpValue& v) {
  if (v.terms.empty()) return "0";
  if (v.terms.size() == 1 && std::abs(v.terms[0].first - 1.0) < 1e-12) return to_string(v.terms[0].second);
  std::string s;
  for (std::size_t i = 0; i < v.terms.size(); ++i) {
    if (i) s += " + ";
    s += "(" + qnum::format_complex(v.terms[i].first) + ") * " + to_string(v.terms[i].second);
  }
  return s;
}

// ---- isos ----

namespace {

std::string clause_tag(const Iso& iso, std::size_t i) {
  std::string s = iso.name + " clause " + std::to_string(i + 1);
  if (iso.clauses[i].line > 0) s += " (line " + std::to_string(iso.clauses[i].line) + ")";
  return s;
}

std::string expr_string(const Expr& e);

std::string expr_atom(const Expr& e) {
  const bool atomic = e->kind == ENode::Kind::kVar || e->kind == ENode::Kind::kUnit ||
                      e->kind == ENode::Kind::kPair;
  return atomic ? expr_string(e) : "(" + expr_string(e) + ")";
}

std::string expr_string(const Expr& e) {
  switch (e->kind) {
    case ENode::Kind::kVar:
      return e->name;
    case ENode::Kind::kUnit:
      return "*";
    case ENode::Kind::kPair:
      return "<" + expr_string(e->a) + ", " + expr_string(e->b) + ">";
    case ENode::Kind::kInl:
      if (e->a->kind == ENode::Kind::kUnit) return "ff";
      return "inl " + expr_atom(e->a);
    case ENode::Kind::kInr:
      if (e->a->kind == ENode::Kind::kUnit) return "tt";
      return "inr " + expr_atom(e->a);
    case ENode::Kind::kFold:
      if (e->a->kind == ENode::Kind::kInl && e->a->a->kind == ENode::Kind::kUnit) return "nil";
      if (e->a->kind == ENode::Kind::kInr && e->a->a->kind == ENode::Kind::kPair) {
        const Expr& p = e->a->a;
        const bool wrap = p->a->kind == ENode::Kind::kComb;
        return (wrap ? "(" + expr_string(p->a) + ")" : expr_string(p->a)) + " :: " + expr_string(p->b);
      }
      return "fold " + expr_atom(e->a);
    case ENode::Kind::kApp:
      return e->iso_text + " " + expr_atom(e->a);
    case ENode::Kind::kComb: {
      std::string s;
      for (std::size_t i = 0; i < e->terms.size(); ++i) {
        if (i) s += " + ";
        s += "(" + qnum::format_complex(e->terms[i].first) + ") * " + expr_atom(e->terms[i].second);
      }
      return s;
    }
  }
  return "?";
}

Value expr_skeleton(const Expr& e) {
  switch (e->kind) {
    case ENode::Kind::kVar:
      return v_var(e->name);
    case ENode::Kind::kUnit:
      return v_unit();
    case ENode::Kind::kPair:
      return v_pair(expr_skeleton(e->a), expr_skeleton(e->b));
    case ENode::Kind::kInl:
      return v_inl(expr_skeleton(e->a));
    case ENode::Kind::kInr:
      return v_inr(expr_skeleton(e->a));
    case ENode::Kind::kFold:
      return v_fold(expr_skeleton(e->a));
    case ENode::Kind::kApp:
      return v_var("_");
    case ENode::Kind::kComb:
      break;
  }
  throw InternalError("skeleton of a linear combination");
}

// Linear pattern typing: binds each variable of p once.
void type_pattern(const Value& p, const Type& t, std::map<std::string, Type>& env, const std::string& where) {
  using K = TypeNode::Kind;
  auto fail = [&](const std::string& what) {
    throw IsoError(where + ": pattern " + to_string(p) + " " + what + " " + to_string(t));
  };
  switch (p->kind) {
    case VNode::Kind::kVar:
      if (!env.emplace(p->name, t).second) throw IsoError(where + ": variable '" + p->name + "' appears twice");
      return;
    case VNode::Kind::kUnit:
      if (t->kind != K::kUnit) fail("does not have type");
      return;
    case VNode::Kind::kPair:
      if (t->kind != K::kTensor) fail("does not have type");
      type_pattern(p->a, t->a, env, where);
      type_pattern(p->b, t->b, env, where);
      return;
    case VNode::Kind::kInl:
    case VNode::Kind::kInr:
      if (t->kind != K::kSum) fail("does not have type");
      type_pattern(p->a, p->kind == VNode::Kind::kInl ? t->a : t->b, env, where);
      return;
    case VNode::Kind::kFold:
      if (t->kind != K::kMu) fail("does not have type");
      type_pattern(p->a, unfold(t), env, where);
      return;
  }
}

void type_expr(const Expr& e, const Type& t, const Iso& self, const std::map<std::string, Type>& env,
               std::map<std::string, int>& uses, const std::string& where) {
  using K = TypeNode::Kind;
  auto fail = [&]() {
    throw IsoError(where + ": " + expr_string(e) + " does not have type " + to_string(t));
  };
  switch (e->kind) {
    case ENode::Kind::kVar: {
      auto it = env.find(e->name);
      if (it == env.end()) throw IsoError(where + ": variable '" + e->name + "' is not bound on the left");
      if (!same_type(it->second, t)) {
        throw IsoError(where + ": variable '" + e->name + "' has type " + to_string(it->second) + ", expected " +
                       to_string(t));
      }
      ++uses[e->name];
      return;
    }
    case ENode::Kind::kUnit:
      if (t->kind != K::kUnit) fail();
      return;
    case ENode::Kind::kPair:
      if (t->kind != K::kTensor) fail();
      type_expr(e->a, t->a, self, env, uses, where);
      type_expr(e->b, t->b, self, env, uses, where);
      return;
    case ENode::Kind::kInl:
    case ENode::Kind::kInr:
      if (t->kind != K::kSum) fail();
      type_expr(e->a, e->kind == ENode::Kind::kInl ? t->a : t->b, self, env, uses, where);
      return;
    case ENode::Kind::kFold:
      if (t->kind != K::kMu) fail();
      type_expr(e->a, unfold(t), self, env, uses, where);
      return;
    case ENode::Kind::kApp: {
      const Iso& f = e->iso ? *e->iso : self;
      if (!same_type(f.b, t)) {
        throw IsoError(where + ": " + e->iso_text + " returns " + to_string(f.b) + ", expected " + to_string(t));
      }
      type_expr(e->a, f.a, self, env, uses, where);
      return;
    }
    case ENode::Kind::kComb:
      for (const auto& [c, term] : e->terms) {
        std::map<std::string, int> u;
        type_expr(term, t, self, env, u, where);
        if (u != uses && !uses.empty()) {
          throw IsoError(where + ": summands of a linear combination use different variables");
        }
        uses = u;
      }
      return;
  }
}

bool overlap(const Value& p, const Value& q) {
  if (p->kind == VNode::Kind::kVar || q->kind == VNode::Kind::kVar) return true;
  if (p->kind != q->kind) return false;
  switch (p->kind) {
    case VNode::Kind::kUnit:
      return true;
    case VNode::Kind::kPair:
      return overlap(p->a, q->a) && overlap(p->b, q->b);
    default:
      return overlap(p->a, q->a);
  }
}

using Row = std::vector<Value>;

Value wildcard() { return v_var("_"); }

// Most specific value standing for "anything of type t".
Value filler(const Type& t) {
  if (t->kind == TypeNode::Kind::kUnit) return v_unit();
  if (t->kind == TypeNode::Kind::kTensor) return v_pair(filler(t->a), filler(t->b));
  return wildcard();
}

// Pattern-matrix usefulness: a tuple of values no row matches, with "_"
// standing for any value.
std::optional<Row> missing(const std::vector<Row>& rows, const std::vector<Type>& types) {
  if (types.empty()) return rows.empty() ? std::optional<Row>(Row{}) : std::nullopt;
  const Type& t = types[0];
  const std::vector<Type> rest(types.begin() + 1, types.end());
  std::set<VNode::Kind> heads;
  for (const auto& r : rows) {
    if (r[0]->kind != VNode::Kind::kVar) heads.insert(r[0]->kind);
  }

  auto specialize = [&](VNode::Kind k) -> std::optional<Row> {
    std::vector<Type> sub;
    using TK = TypeNode::Kind;
    switch (k) {
      case VNode::Kind::kPair:
        sub = {t->a, t->b};
        break;
      case VNode::Kind::kInl:
        sub = {t->a};
        break;
      case VNode::Kind::kInr:
        sub = {t->b};
        break;
      case VNode::Kind::kFold:
        sub = {unfold(t)};
        break;
      default:
        break;
    }
    (void)TK::kUnit;
    std::vector<Row> next;
    for (const auto& r : rows) {
      Row n;
      if (r[0]->kind == VNode::Kind::kVar) {
        n.assign(sub.size(), wildcard());
      } else if (r[0]->kind == k) {
        if (r[0]->a) n.push_back(r[0]->a);
        if (r[0]->b) n.push_back(r[0]->b);
      } else {
        continue;
      }
      n.insert(n.end(), r.begin() + 1, r.end());
      next.push_back(std::move(n));
    }
    std::vector<Type> types2 = sub;
    types2.insert(types2.end(), rest.begin(), rest.end());
    auto w = missing(next, types2);
    if (!w) return std::nullopt;
    Value head;
    switch (k) {
      case VNode::Kind::kUnit:
        head = v_unit();
        break;
      case VNode::Kind::kPair:
        head = v_pair((*w)[0], (*w)[1]);
        break;
      case VNode::Kind::kInl:
        head = v_inl((*w)[0]);
        break;
      case VNode::Kind::kInr:
        head = v_inr((*w)[0]);
        break;
      default:
        head = v_fold((*w)[0]);
        break;
    }
    Row out{head};
    out.insert(out.end(), w->begin() + static_cast<std::ptrdiff_t>(sub.size()), w->end());
    return out;
  };

  std::vector<VNode::Kind> all;
  switch (t->kind) {
    case TypeNode::Kind::kUnit:
      all = {VNode::Kind::kUnit};
      break;
    case TypeNode::Kind::kTensor:
      all = {VNode::Kind::kPair};
      break;
    case TypeNode::Kind::kSum:
      all = {VNode::Kind::kInl, VNode::Kind::kInr};
      break;
    case TypeNode::Kind::kMu:
      all = {VNode::Kind::kFold};
      break;
    default:
      // Type variables are only matched by variables.
      break;
  }
  const bool complete = !heads.empty() && heads.size() == all.size();
  if (complete) {
    for (VNode::Kind k : all) {
      if (auto w = specialize(k)) return w;
    }
    return std::nullopt;
  }
  std::vector<Row> def;
  for (const auto& r : rows) {
    if (r[0]->kind == VNode::Kind::kVar) def.emplace_back(r.begin() + 1, r.end());
  }
  auto w = missing(def, rest);
  if (!w) return std::nullopt;
  Value head = filler(t);
  for (VNode::Kind k : all) {
    if (!heads.count(k) && !heads.empty()) {
      head = k == VNode::Kind::kInl ? v_inl(filler(t->a)) : v_inr(filler(t->b));
      break;
    }
  }
  Row out{head};
  out.insert(out.end(), w->begin(), w->end());
  return out;
}

void check_side(const Iso& iso, const std::vector<Value>& pats, const Type& t, const char* side) {
  for (std::size_t i = 0; i < pats.size(); ++i) {
    for (std::size_t j = i + 1; j < pats.size(); ++j) {
      if (overlap(pats[i], pats[j])) {
        throw IsoError(std::string(side) + " patterns overlap: " + clause_tag(iso, i) + " (" + to_string(pats[i]) +
                       ") and " + clause_tag(iso, j) + " (" + to_string(pats[j]) + ")");
      }
    }
  }
  std::vector<Row> rows;
  for (const auto& p : pats) rows.push_back({p});
  if (auto w = missing(rows, {t})) {
    throw IsoError(std::string(side) + " patterns of " + iso.name + " are not exhaustive: " + to_string((*w)[0]) +
                   " is not covered");
  }
}

bool contains_comb(const Expr& e) {
  if (e->kind == ENode::Kind::kComb) return true;
  return (e->a && contains_comb(e->a)) || (e->b && contains_comb(e->b));
}

bool has_mu(const Type& t) {
  if (t->kind == TypeNode::Kind::kMu) return true;
  return (t->a && has_mu(t->a)) || (t->b && has_mu(t->b));
}

// ---- evaluation ----

struct Evaluator {
  std::uint64_t fuel;

  using Combo = std::map<Value, Complex, ValueLess>;

  static bool match(const Value& p, const Value& v, std::map<std::string, Value>& env) {
    if (p->kind == VNode::Kind::kVar) {
      env[p->name] = v;
      return true;
    }
    if (p->kind != v->kind) return false;
    switch (p->kind) {
      case VNode::Kind::kUnit:
        return true;
      case VNode::Kind::kPair:
        return match(p->a, v->a, env) && match(p->b, v->b, env);
      default:
        return match(p->a, v->a, env);
    }
  }

  Combo apply_basis(const Iso& iso, const Value& v) {
    if (fuel == 0) throw IsoError("fuel exhausted while applying " + iso.name);
    --fuel;
    for (const auto& c : iso.clauses) {
      std::map<std::string, Value> env;
      if (match(c.lhs, v, env)) return eval(c.rhs, env, iso);
    }
    throw IsoError("no clause of " + iso.name + " matches " + to_string(v));
  }

  static void add(Combo& into, const Value& v, Complex c) {
    auto [it, fresh] = into.emplace(v, c);
    if (!fresh) it->second += c;
  }

  template <typename F>
  static Combo map1(const Combo& x, F f) {
    Combo out;
    for (const auto& [v, c] : x) add(out, f(v), c);
    return out;
  }

  Combo eval(const Expr& e, const std::map<std::string, Value>& env, const Iso& self) {
    switch (e->kind) {
      case ENode::Kind::kVar:
        return Combo{{env.at(e->name), 1.0}};
      case ENode::Kind::kUnit:
        return Combo{{v_unit(), 1.0}};
      case ENode::Kind::kPair: {
        const Combo a = eval(e->a, env, self);
        const Combo b = eval(e->b, env, self);
        Combo out;
        for (const auto& [va, ca] : a) {
          for (const auto& [vb, cb] : b) add(out, v_pair(va, vb), ca * cb);
        }
        return out;
      }
      case ENode::Kind::kInl:
        return map1(eval(e->a, env, self), v_inl);
      case ENode::Kind::kInr:
        return map1(eval(e->a, env, self), v_inr);
      case ENode::Kind::kFold:
        return map1(eval(e->a, env, self), v_fold);
      case ENode::Kind::kApp: {
        const Iso& f = e->iso ? *e->iso : self;
        Combo out;
        for (const auto& [v, c] : eval(e->a, env, self)) {
          for (const auto& [w, d] : apply_basis(f, v)) add(out, w, c * d);
        }
        return out;
      }
      case ENode::Kind::kComb: {
        Combo out;
        for (const auto& [c, term] : e->terms) {
          for (const auto& [w, d] : eval(term, env, self)) add(out, w, c * d);
        }
        return out;
      }
    }
    return {};
  }
};

AmpValue to_amp(const Evaluator::Combo& c) {
  AmpValue out;
  for (const auto& [v, a] : c) {
    if (std::abs(a) > 1e-12) out.terms.push_back({a, v});
  }
  return out;
}

void enumerate_into(const Type& t, int depth, std::size_t limit, std::vector<Value>& out) {
  using K = TypeNode::Kind;
  auto guard = [&](std::size_t n) {
    if (n > limit) throw IsoError("type " + to_string(t) + " has more than " + std::to_string(limit) + " values");
  };
  switch (t->kind) {
    case K::kUnit:
      out.push_back(v_unit());
      return;
    case K::kSum: {
      std::vector<Value> a, b;
      enumerate_into(t->a, depth, limit, a);
      enumerate_into(t->b, depth, limit, b);
      guard(out.size() + a.size() + b.size());
      for (auto& v : a) out.push_back(v_inl(v));
      for (auto& v : b) out.push_back(v_inr(v));
      return;
    }
    case K::kTensor: {
      std::vector<Value> a, b;
      enumerate_into(t->a, depth, limit, a);
      enumerate_into(t->b, depth, limit, b);
      guard(out.size() + a.size() * b.size());
      for (auto& x : a) {
        for (auto& y : b) out.push_back(v_pair(x, y));
      }
      return;
    }
    case K::kMu: {
      if (depth <= 0) return;
      std::vector<Value> inner;
      enumerate_into(unfold(t), depth - 1, limit, inner);
      for (auto& v : inner) out.push_back(v_fold(v));
      return;
    }
    default:
      throw IsoError("cannot enumerate open type " + to_string(t));
  }
}

void collect_strict(const Value& p, int folds, std::set<std::string>& out) {
  if (p->kind == VNode::Kind::kVar) {
    if (folds > 0) out.insert(p->name);
    return;
  }
  const int f = folds + (p->kind == VNode::Kind::kFold ? 1 : 0);
  if (p->a) collect_strict(p->a, f, out);
  if (p->b) collect_strict(p->b, f, out);
}

void guard_expr(const Expr& e, const std::set<std::string>& strict, const std::string& where,
                std::vector<std::string>& out) {
  if (e->kind == ENode::Kind::kApp && !e->iso) {
    if (e->a->kind != ENode::Kind::kVar || !strict.count(e->a->name)) {
      out.push_back(where + ": recursive call on " + expr_string(e->a) + " is not on a strict sub-pattern");
    }
  }
  if (e->a) guard_expr(e->a, strict, where, out);
  if (e->b) guard_expr(e->b, strict, where, out);
  for (const auto& [c, t] : e->terms) guard_expr(t, strict, where, out);
}

Expr make_expr(ENode::Kind k, Expr a = nullptr) {
  auto e = std::make_shared<ENode>();
  e->kind = k;
  e->a = std::move(a);
  return e;
}

Expr value_to_expr(const Value& v, const std::map<std::string, Expr>& repl) {
  switch (v->kind) {
    case VNode::Kind::kVar: {
      auto it = repl.find(v->name);
      if (it != repl.end()) return it->second;
      auto e = make_expr(ENode::Kind::kVar);
      std::const_pointer_cast<ENode>(e)->name = v->name;
      return e;
    }
    case VNode::Kind::kUnit:
      return make_expr(ENode::Kind::kUnit);
    case VNode::Kind::kPair: {
      auto e = std::make_shared<ENode>();
      e->kind = ENode::Kind::kPair;
      e->a = value_to_expr(v->a, repl);
      e->b = value_to_expr(v->b, repl);
      return e;
    }
    case VNode::Kind::kInl:
      return make_expr(ENode::Kind::kInl, value_to_expr(v->a, repl));
    case VNode::Kind::kInr:
      return make_expr(ENode::Kind::kInr, value_to_expr(v->a, repl));
    case VNode::Kind::kFold:
      return make_expr(ENode::Kind::kFold, value_to_expr(v->a, repl));
  }
  return nullptr;
}

std::string inverse_text(const std::string& s) {
  if (s.rfind("inv(", 0) == 0 && s.back() == ')') return s.substr(4, s.size() - 5);
  return "inv(" + s + ")";
}

struct Inverter {
  const Iso& iso;
  std::map<std::string, Expr> repl;

  // Turns the right side into a pattern; an application chain ending in x is
  // replaced by x, and x on the other side by the inverse chain.
  Value pattern_of(const Expr& e, const std::string& where) {
    switch (e->kind) {
      case ENode::Kind::kVar:
        return v_var(e->name);
      case ENode::Kind::kUnit:
        return v_unit();
      case ENode::Kind::kPair:
        return v_pair(pattern_of(e->a, where), pattern_of(e->b, where));
      case ENode::Kind::kInl:
        return v_inl(pattern_of(e->a, where));
      case ENode::Kind::kInr:
        return v_inr(pattern_of(e->a, where));
      case ENode::Kind::kFold:
        return v_fold(pattern_of(e->a, where));
      case ENode::Kind::kApp: {
        std::vector<const ENode*> chain;
        const ENode* cur = e.get();
        while (cur->kind == ENode::Kind::kApp) {
          chain.push_back(cur);
          cur = cur->a.get();
        }
        if (cur->kind != ENode::Kind::kVar) {
          throw IsoError(where + ": cannot invert an iso applied to " + expr_string(e->a));
        }
        const std::string x = cur->name;
        auto inner = make_expr(ENode::Kind::kVar);
        std::const_pointer_cast<ENode>(inner)->name = x;
        Expr acc = inner;
        // g1 (g2 (... (gk x))) inverts to inv(gk) (... (inv(g1) x)).
        for (const ENode* g : chain) {
          auto app = std::make_shared<ENode>();
          app->kind = ENode::Kind::kApp;
          app->a = acc;
          app->iso_text = g->iso ? inverse_text(g->iso_text) : g->iso_text;
          if (g->iso) app->iso = std::make_shared<const Iso>(invert(*g->iso));
          acc = app;
        }
        repl[x] = acc;
        return v_var(x);
      }
      case ENode::Kind::kComb:
        break;
    }
    throw IsoError(where + ": cannot invert a linear combination");
  }
};

bool same_expr(const Expr& a, const Expr& b) {
  if (a->kind != b->kind || a->name != b->name) return false;
  if (a->kind == ENode::Kind::kApp) {
    if (a->iso_text != b->iso_text || (!a->iso) != (!b->iso)) return false;
    if (a->iso && !same_iso(*a->iso, *b->iso)) return false;
  }
  if ((!a->a) != (!b->a) || (a->a && !same_expr(a->a, b->a))) return false;
  if ((!a->b) != (!b->b) || (a->b && !same_expr(a->b, b->b))) return false;
  if (a->terms.size() != b->terms.size()) return false;
  for (std::size_t i = 0; i < a->terms.size(); ++i) {
    if (a->terms[i].first != b->terms[i].first || !same_expr(a->terms[i].second, b->terms[i].second)) return false;
  }
  return true;
}

}  // namespace

std::string to_string(const Iso& iso) {
  std::string s = "iso " + iso.name + " : " + to_string(iso.a) + " <-> " + to_string(iso.b) + " ";
  if (!iso.fix_binder.empty() && iso.fix_binder != iso.name) s += "fix " + iso.fix_binder + ". ";
  s += "{\n";
  for (const auto& c : iso.clauses) s += "  " + to_string(c.lhs) + " <-> " + expr_string(c.rhs) + ";\n";
  return s + "}";
}

std::string check_iso(const Iso& iso, int depth) {
  std::vector<Value> lhs, rhs;
  for (std::size_t i = 0; i < iso.clauses.size(); ++i) {
    const auto& c = iso.clauses[i];
    const std::string where = clause_tag(iso, i);
    std::map<std::string, Type> env;
    type_pattern(c.lhs, iso.a, env, where);
    std::map<std::string, int> uses;
    type_expr(c.rhs, iso.b, iso, env, uses, where);
    for (const auto& [x, t] : env) {
      auto it = uses.find(x);
      if (it == uses.end()) throw IsoError(where + ": variable '" + x + "' is not used on the right");
      if (it->second > 1) throw IsoError(where + ": variable '" + x + "' is used more than once on the right");
    }
    lhs.push_back(c.lhs);
    if (!contains_comb(c.rhs)) rhs.push_back(expr_skeleton(c.rhs));
  }
  check_side(iso, lhs, iso.a, "left");
  if (!iso.quantum) {
    check_side(iso, rhs, iso.b, "right");
  } else {
    if (has_mu(iso.a) || has_mu(iso.b)) {
      throw IsoError(iso.name + ": quantum isos are only checked on finite types");
    }
    const qnum::Matrix m = to_matrix(iso, depth);
    if (m.rows() != m.cols()) throw IsoError(iso.name + ": sides have different dimensions");
    const double err = (m.adjoint() * m - qnum::Matrix::Identity(m.cols(), m.cols())).norm();
    if (err > 1e-9) {
      throw IsoError(iso.name + ": clauses are not orthonormal (||U^dag U - I|| = " + std::to_string(err) + ")");
    }
  }
  return to_string(iso.a) + " <-> " + to_string(iso.b);
}

Iso invert(const Iso& iso) {
  if (iso.quantum) {
    throw IsoError(iso.name + " is quantum; its inverse is the conjugate transpose of its matrix");
  }
  Iso out;
  out.name = inverse_text(iso.name);
  out.a = iso.b;
  out.b = iso.a;
  out.fix_binder = iso.fix_binder;
  for (std::size_t i = 0; i < iso.clauses.size(); ++i) {
    const auto& c = iso.clauses[i];
    Inverter inv{iso, {}};
    Clause n;
    n.lhs = inv.pattern_of(c.rhs, clause_tag(iso, i));
    n.rhs = value_to_expr(c.lhs, inv.repl);
    n.line = c.line;
    out.clauses.push_back(std::move(n));
  }
  return out;
}

bool same_iso(const Iso& a, const Iso& b) {
  if (!same_type(a.a, b.a) || !same_type(a.b, b.b) || a.clauses.size() != b.clauses.size()) return false;
  for (std::size_t i = 0; i < a.clauses.size(); ++i) {
    if (compare(a.clauses[i].lhs, b.clauses[i].lhs) != 0) return false;
    if (!same_expr(a.clauses[i].rhs, b.clauses[i].rhs)) return false;
  }
  return true;
}

AmpValue apply_quantum(const Iso& iso, const AmpValue& v, std::uint64_t fuel) {
  Evaluator ev{fuel};
  Evaluator::Combo out;
  for (const auto& [c, b] : v.terms) {
    if (!is_closed(b)) throw IsoError("cannot apply an iso to the pattern " + to_string(b));
    for (const auto& [w, d] : ev.apply_basis(iso, b)) Evaluator::add(out, w, c * d);
  }
  return to_amp(out);
}

Value apply(const Iso& iso, const Value& v, std::uint64_t fuel) {
  const AmpValue r = apply_quantum(iso, AmpValue::basis(v), fuel);
  if (r.terms.size() != 1 || std::abs(r.terms[0].first - 1.0) > 1e-9) {
    throw IsoError(iso.name + " sends " + to_string(v) + " to a superposition: " + to_string(r));
  }
  return r.terms[0].second;
}

std::vector<Value> enumerate(const Type& t, int depth, std::size_t limit) {
  std::vector<Value> out;
  enumerate_into(t, depth, limit, out);
  return out;
}

qnum::Matrix to_matrix(const Iso& iso, int depth) {
  const std::vector<Value> ins = enumerate(iso.a, depth);
  const std::vector<Value> outs = enumerate(iso.b, depth);
  std::map<Value, Eigen::Index, ValueLess> row;
  for (std::size_t i = 0; i < outs.size(); ++i) row[outs[i]] = static_cast<Eigen::Index>(i);
  qnum::Matrix m = qnum::Matrix::Zero(static_cast<Eigen::Index>(outs.size()), static_cast<Eigen::Index>(ins.size()));
  for (std::size_t j = 0; j < ins.size(); ++j) {
    for (const auto& [c, w] : apply_quantum(iso, AmpValue::basis(ins[j])).terms) {
      auto it = row.find(w);
      if (it == row.end()) {
        throw IsoError(iso.name + " sends " + to_string(ins[j]) + " outside the truncated type (" + to_string(w) + ")");
      }
      m(it->second, static_cast<Eigen::Index>(j)) += c;
    }
  }
  return m;
}

std::vector<std::string> structural_guard(const Iso& iso) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < iso.clauses.size(); ++i) {
    std::set<std::string> strict;
    collect_strict(iso.clauses[i].lhs, 0, strict);
    guard_expr(iso.clauses[i].rhs, strict, clause_tag(iso, i), out);
  }
  return out;
}

}  // namespace qlang::iso

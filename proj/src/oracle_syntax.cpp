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

// Parser, printer and type inference for the Boolean source language.

#include <set>

#include "qlang/lexer.hpp"
#include "qlang/oracle.hpp"

namespace qlang::oracle {

namespace {

const std::set<std::string> kKeywords = {"let", "letrec", "rec", "in",  "if",  "then",
                                         "else", "fun",   "tt",  "ff", "not", "and"};

BTerm make(decltype(Term::node) node, const Token& at) {
  auto t = std::make_shared<Term>();
  t->node = std::move(node);
  t->line = at.line;
  t->column = at.column;
  return t;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : ts_(tokenize(src, {"->"})) {}

  BTerm parse() {
    BTerm t = term();
    if (!ts_.at_end()) ts_.fail("unexpected token after term");
    return t;
  }

 private:
  std::string binder() {
    const Token t = ts_.expect_ident();
    if (kKeywords.count(t.text)) TokenStream::fail_at(t, "keyword used as a variable");
    return t.text;
  }

  BTerm term() {
    const Token& t = ts_.peek();
    if (t.is("\\") || t.is("fun")) {
      const Token at = ts_.next();
      std::vector<std::string> params{binder()};
      while (ts_.peek().kind == TokKind::kIdent && !kKeywords.count(ts_.peek().text)) {
        params.push_back(binder());
      }
      if (!ts_.accept(".") && !ts_.accept("->")) ts_.fail("expected '.' or '->' after parameters");
      BTerm body = term();
      for (auto it = params.rbegin(); it != params.rend(); ++it) body = make(Lam{*it, body}, at);
      return body;
    }
    if (t.is("letrec") || (t.is("let") && ts_.peek(1).is("rec"))) {
      const Token at = ts_.next();
      if (at.is("let")) ts_.next();
      const std::string fn = binder();
      std::vector<std::string> params{binder()};
      while (!ts_.peek().is("=")) params.push_back(binder());
      ts_.expect("=");
      BTerm fn_body = term();
      ts_.expect("in");
      BTerm body = term();
      for (std::size_t i = params.size(); i-- > 1;) fn_body = make(Lam{params[i], fn_body}, at);
      return make(LetRec{fn, params[0], fn_body, body}, at);
    }
    if (t.is("let")) {
      const Token at = ts_.next();
      if (ts_.accept("(")) {
        const std::string x = binder();
        ts_.expect(",");
        const std::string y = binder();
        ts_.expect(")");
        ts_.expect("=");
        BTerm bound = term();
        ts_.expect("in");
        return make(LetPair{x, y, bound, term()}, at);
      }
      const std::string x = binder();
      std::vector<std::string> params;
      while (!ts_.peek().is("=")) params.push_back(binder());
      ts_.expect("=");
      BTerm bound = term();
      for (auto it = params.rbegin(); it != params.rend(); ++it) bound = make(Lam{*it, bound}, at);
      ts_.expect("in");
      return make(Let{x, bound, term()}, at);
    }
    if (t.is("if")) {
      const Token at = ts_.next();
      BTerm c = term();
      ts_.expect("then");
      BTerm a = term();
      ts_.expect("else");
      return make(If{c, a, term()}, at);
    }
    return application();
  }

  bool atom_start() const {
    const Token& t = ts_.peek();
    if (t.kind == TokKind::kIdent) {
      return !kKeywords.count(t.text) || t.is("tt") || t.is("ff") || t.is("not") || t.is("and");
    }
    return t.is("(");
  }

  BTerm application() {
    if (!atom_start()) ts_.fail("expected a term");
    BTerm f = atom();
    while (atom_start()) {
      const Token at = ts_.peek();
      f = make(App{f, atom()}, at);
    }
    return f;
  }

  BTerm atom() {
    const Token t = ts_.next();
    if (t.is("tt")) return make(BoolLit{true}, t);
    if (t.is("ff")) return make(BoolLit{false}, t);
    if (t.is("not")) return make(PrimOp{Prim::kNot}, t);
    if (t.is("and")) return make(PrimOp{Prim::kAnd}, t);
    if (t.is("(")) {
      BTerm a = term();
      if (ts_.accept(",")) {
        // (a, b, c) is (a, (b, c))
        std::vector<BTerm> rest{term()};
        while (ts_.accept(",")) rest.push_back(term());
        ts_.expect(")");
        BTerm b = rest.back();
        for (std::size_t i = rest.size() - 1; i-- > 0;) b = make(PairT{rest[i], b}, t);
        return make(PairT{a, b}, t);
      }
      ts_.expect(")");
      return a;
    }
    return make(Var{t.text}, t);
  }

  TokenStream ts_;
};

bool atomic(const BTerm& t) {
  return std::holds_alternative<Var>(t->node) || std::holds_alternative<BoolLit>(t->node) ||
         std::holds_alternative<PrimOp>(t->node) || std::holds_alternative<PairT>(t->node);
}

// ---- types ----

struct Type {
  enum Kind { kBool, kArrow, kPair, kVar } kind = kVar;
  std::shared_ptr<Type> a, b;
  std::shared_ptr<Type> link;  // set once a variable is solved
  int id = 0;
};
using TypePtr = std::shared_ptr<Type>;

class Inference {
 public:
  TypePtr fresh() {
    auto t = std::make_shared<Type>();
    t->id = next_++;
    return t;
  }
  static TypePtr boolean() {
    auto t = std::make_shared<Type>();
    t->kind = Type::kBool;
    return t;
  }
  static TypePtr arrow(TypePtr a, TypePtr b) {
    auto t = std::make_shared<Type>();
    t->kind = Type::kArrow;
    t->a = std::move(a);
    t->b = std::move(b);
    return t;
  }
  static TypePtr pair(TypePtr a, TypePtr b) {
    auto t = arrow(std::move(a), std::move(b));
    t->kind = Type::kPair;
    return t;
  }

  static TypePtr repr(TypePtr t) {
    while (t->kind == Type::kVar && t->link) t = t->link;
    return t;
  }

  static std::string render(const TypePtr& t0, bool nested = false) {
    const TypePtr t = repr(t0);
    switch (t->kind) {
      case Type::kBool:
        return "bool";
      case Type::kVar:
        return "'t" + std::to_string(t->id);
      case Type::kArrow: {
        const std::string s = render(t->a, true) + " -> " + render(t->b);
        return nested ? "(" + s + ")" : s;
      }
      case Type::kPair:
        return "(" + render(t->a, true) + " * " + render(t->b, true) + ")";
    }
    return "?";
  }

  void unify(const TypePtr& x0, const TypePtr& y0, const BTerm& at) {
    const TypePtr x = repr(x0), y = repr(y0);
    if (x == y) return;
    if (x->kind == Type::kVar) {
      bind(x, y, at);
    } else if (y->kind == Type::kVar) {
      bind(y, x, at);
    } else if (x->kind != y->kind) {
      mismatch(x, y, at);
    } else if (x->kind != Type::kBool) {
      unify(x->a, y->a, at);
      unify(x->b, y->b, at);
    }
  }

  using Env = std::vector<std::pair<std::string, TypePtr>>;

  TypePtr infer(const BTerm& t, Env& env) {
    return std::visit(
        [&](const auto& n) -> TypePtr {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, Var>) {
            for (auto it = env.rbegin(); it != env.rend(); ++it)
              if (it->first == n.name) return it->second;
            throw OracleError(where(t) + "unbound variable '" + n.name + "'");
          } else if constexpr (std::is_same_v<N, Lam>) {
            const TypePtr a = fresh();
            env.emplace_back(n.param, a);
            const TypePtr b = infer(n.body, env);
            env.pop_back();
            return arrow(a, b);
          } else if constexpr (std::is_same_v<N, App>) {
            const TypePtr f = infer(n.fn, env);
            const TypePtr a = infer(n.arg, env);
            const TypePtr r = fresh();
            unify(f, arrow(a, r), t);
            return r;
          } else if constexpr (std::is_same_v<N, BoolLit>) {
            return boolean();
          } else if constexpr (std::is_same_v<N, PrimOp>) {
            return n.op == Prim::kNot ? arrow(boolean(), boolean())
                                      : arrow(boolean(), arrow(boolean(), boolean()));
          } else if constexpr (std::is_same_v<N, PairT>) {
            const TypePtr a = infer(n.first, env);
            return pair(a, infer(n.second, env));
          } else if constexpr (std::is_same_v<N, LetPair>) {
            const TypePtr a = fresh(), b = fresh();
            unify(infer(n.bound, env), pair(a, b), t);
            env.emplace_back(n.x, a);
            env.emplace_back(n.y, b);
            const TypePtr r = infer(n.body, env);
            env.resize(env.size() - 2);
            return r;
          } else if constexpr (std::is_same_v<N, If>) {
            unify(infer(n.cond, env), boolean(), n.cond);
            const TypePtr a = infer(n.then_branch, env);
            unify(a, infer(n.else_branch, env), t);
            return a;
          } else if constexpr (std::is_same_v<N, Let>) {
            const TypePtr a = infer(n.bound, env);
            env.emplace_back(n.name, a);
            const TypePtr r = infer(n.body, env);
            env.pop_back();
            return r;
          } else {
            const TypePtr a = fresh(), b = fresh();
            env.emplace_back(n.fn, arrow(a, b));
            env.emplace_back(n.param, a);
            unify(infer(n.fn_body, env), b, t);
            env.pop_back();
            const TypePtr r = infer(n.body, env);
            env.pop_back();
            return r;
          }
        },
        t->node);
  }

 private:
  static std::string where(const BTerm& t) {
    return t->line > 0 ? std::to_string(t->line) + ":" + std::to_string(t->column) + ": " : "";
  }

  static bool occurs(const TypePtr& v, const TypePtr& t0) {
    const TypePtr t = repr(t0);
    if (t == v) return true;
    if (t->kind == Type::kArrow || t->kind == Type::kPair) return occurs(v, t->a) || occurs(v, t->b);
    return false;
  }

  void bind(const TypePtr& v, const TypePtr& t, const BTerm& at) {
    if (occurs(v, t)) throw OracleError(where(at) + "recursive type " + render(t));
    v->link = t;
  }

  [[noreturn]] void mismatch(const TypePtr& x, const TypePtr& y, const BTerm& at) {
    throw OracleError(where(at) + "type mismatch: " + render(x) + " vs " + render(y));
  }

  int next_ = 0;
};

}  // namespace

BTerm parse_bterm(std::string_view src) { return Parser(src).parse(); }

std::string to_string(const BTerm& t) {
  auto paren = [](const BTerm& x) { return atomic(x) ? to_string(x) : "(" + to_string(x) + ")"; };
  return std::visit(
      [&](const auto& n) -> std::string {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Var>) {
          return n.name;
        } else if constexpr (std::is_same_v<N, Lam>) {
          return "\\" + n.param + ". " + to_string(n.body);
        } else if constexpr (std::is_same_v<N, App>) {
          const bool left_ok = atomic(n.fn) || std::holds_alternative<App>(n.fn->node);
          return (left_ok ? to_string(n.fn) : "(" + to_string(n.fn) + ")") + " " + paren(n.arg);
        } else if constexpr (std::is_same_v<N, BoolLit>) {
          return n.value ? "tt" : "ff";
        } else if constexpr (std::is_same_v<N, PrimOp>) {
          return n.op == Prim::kNot ? "not" : "and";
        } else if constexpr (std::is_same_v<N, PairT>) {
          return "(" + to_string(n.first) + ", " + to_string(n.second) + ")";
        } else if constexpr (std::is_same_v<N, LetPair>) {
          return "let (" + n.x + ", " + n.y + ") = " + to_string(n.bound) + " in " + to_string(n.body);
        } else if constexpr (std::is_same_v<N, If>) {
          return "if " + to_string(n.cond) + " then " + to_string(n.then_branch) + " else " +
                 to_string(n.else_branch);
        } else if constexpr (std::is_same_v<N, Let>) {
          return "let " + n.name + " = " + to_string(n.bound) + " in " + to_string(n.body);
        } else {
          return "letrec " + n.fn + " " + n.param + " = " + to_string(n.fn_body) + " in " +
                 to_string(n.body);
        }
      },
      t->node);
}

namespace {

Token nowhere() {
  Token t;
  t.line = 0;
  t.column = 0;
  return t;
}

}  // namespace

BTerm var(std::string name) { return make(Var{std::move(name)}, nowhere()); }
BTerm lam(std::string param, BTerm body) { return make(Lam{std::move(param), std::move(body)}, nowhere()); }
BTerm app(BTerm fn, BTerm arg) { return make(App{std::move(fn), std::move(arg)}, nowhere()); }
BTerm app(BTerm fn, std::initializer_list<BTerm> args) {
  for (const auto& a : args) fn = app(fn, a);
  return fn;
}
BTerm lit(bool b) { return make(BoolLit{b}, nowhere()); }
BTerm prim(Prim p) { return make(PrimOp{p}, nowhere()); }

std::string typecheck(const BTerm& t, const std::vector<std::string>& bool_vars) {
  Inference inf;
  Inference::Env env;
  for (const auto& v : bool_vars) env.emplace_back(v, Inference::boolean());
  return Inference::render(inf.infer(t, env));
}

BTerm apply_inputs(const BTerm& t, int n, std::vector<std::string>* names) {
  std::vector<std::string> vs;
  BTerm r = t;
  for (int i = 1; i <= n; ++i) {
    vs.push_back("x" + std::to_string(i));
    r = app(r, var(vs.back()));
  }
  if (names) *names = std::move(vs);
  return r;
}

}  // namespace qlang::oracle

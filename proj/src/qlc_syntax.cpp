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

#include <map>
#include <set>

#include "qlang/lexer.hpp"
#include "qlang/qlc.hpp"

namespace qlang::qlc {

// ---- types ----

namespace {

QTypePtr make_type(QType::Kind k, QTypePtr a = nullptr, QTypePtr b = nullptr, bool bang = false) {
  auto t = std::make_shared<QType>();
  t->kind = k;
  t->a = std::move(a);
  t->b = std::move(b);
  t->bang = bang;
  return t;
}

}  // namespace

QTypePtr QType::qbit() { return make_type(Kind::kQbit); }
QTypePtr QType::bit() { return make_type(Kind::kBit); }
QTypePtr QType::unit() { return make_type(Kind::kUnit); }
QTypePtr QType::arrow(QTypePtr a, QTypePtr b, bool bang) {
  return make_type(Kind::kArrow, std::move(a), std::move(b), bang);
}
QTypePtr QType::tensor(QTypePtr a, QTypePtr b) { return make_type(Kind::kTensor, std::move(a), std::move(b)); }
QTypePtr QType::circ(QTypePtr a, QTypePtr b) { return make_type(Kind::kCirc, std::move(a), std::move(b)); }

namespace {

std::string var_name(int k) {
  std::string s(1, static_cast<char>('a' + k % 26));
  if (k >= 26) s += std::to_string(k / 26);
  return "'" + s;
}

std::string render(const QType& t, std::map<int, int>& names) {
  using K = QType::Kind;
  switch (t.kind) {
    case K::kQbit:
      return "qbit";
    case K::kBit:
      return "bit";
    case K::kUnit:
      return "1";
    case K::kVar: {
      auto it = names.find(t.var);
      if (it == names.end()) it = names.emplace(t.var, static_cast<int>(names.size())).first;
      return var_name(it->second);
    }
    case K::kCirc:
      return "circ(" + render(*t.a, names) + ", " + render(*t.b, names) + ")";
    case K::kTensor: {
      const bool pa = t.a->kind == K::kArrow && !t.a->bang;
      const bool pa2 = t.a->kind == K::kTensor;
      std::string a = render(*t.a, names);
      std::string b = render(*t.b, names);
      if (pa || pa2) a = "(" + a + ")";
      if (t.b->kind == K::kArrow && !t.b->bang) b = "(" + b + ")";
      return a + " * " + b;
    }
    case K::kArrow: {
      std::string a = render(*t.a, names);
      if (t.a->kind == K::kArrow && !t.a->bang) a = "(" + a + ")";
      const std::string s = a + " -o " + render(*t.b, names);
      return t.bang ? "!(" + s + ")" : s;
    }
  }
  return "?";
}

class TypeParser {
 public:
  explicit TypeParser(std::string_view src) : ts_(tokenize(src, {"-o", "->"})) {}

  QTypePtr parse() {
    QTypePtr t = arrow();
    if (!ts_.at_end()) ts_.fail("unexpected token in type");
    return t;
  }

 private:
  QTypePtr arrow() {
    QTypePtr a = tensor();
    if (ts_.accept("-o") || ts_.accept("->") || ts_.accept("⊸")) return QType::arrow(a, arrow());
    return a;
  }

  QTypePtr tensor() {
    QTypePtr a = prim();
    if (ts_.accept("*") || ts_.accept("⊗")) return QType::tensor(a, tensor());
    return a;
  }

  QTypePtr prim() {
    const Token t = ts_.next();
    if (t.is("qbit")) return QType::qbit();
    if (t.is("bit")) return QType::bit();
    if (t.is("1")) return QType::unit();
    if (t.is("(")) {
      QTypePtr a = arrow();
      ts_.expect(")");
      return a;
    }
    if (t.is("!")) {
      QTypePtr a = prim();
      if (a->kind != QType::Kind::kArrow) {
        TokenStream::fail_at(t, "! applies only to function types");
      }
      auto b = std::make_shared<QType>(*a);
      b->bang = true;
      return b;
    }
    if (t.is("circ")) {
      ts_.expect("(");
      QTypePtr a = arrow();
      ts_.expect(",");
      QTypePtr b = arrow();
      ts_.expect(")");
      return QType::circ(a, b);
    }
    if (t.is("'")) {
      const Token n = ts_.expect_ident();
      auto it = vars_.find(n.text);
      if (it == vars_.end()) it = vars_.emplace(n.text, static_cast<int>(vars_.size()) + 1).first;
      auto v = std::make_shared<QType>();
      v->var = it->second;
      return v;
    }
    TokenStream::fail_at(t, "expected a type");
  }

  TokenStream ts_;
  std::map<std::string, int> vars_;
};

}  // namespace

std::string to_string(const QType& t) {
  std::map<int, int> names;
  return render(t, names);
}

QTypePtr parse_type(std::string_view src) { return TypeParser(src).parse(); }

bool same_type(const QType& a, const QType& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case QType::Kind::kVar:
      return a.var == b.var;
    case QType::Kind::kArrow:
      if (a.bang != b.bang) return false;
      [[fallthrough]];
    case QType::Kind::kTensor:
    case QType::Kind::kCirc:
      return same_type(*a.a, *b.a) && same_type(*a.b, *b.b);
    default:
      return true;
  }
}

int qubit_count(const QType& t) {
  switch (t.kind) {
    case QType::Kind::kQbit:
      return 1;
    case QType::Kind::kUnit:
      return 0;
    case QType::Kind::kTensor: {
      const int a = qubit_count(*t.a);
      const int b = qubit_count(*t.b);
      return a < 0 || b < 0 ? -1 : a + b;
    }
    default:
      return -1;
  }
}

// ---- terms ----

namespace {

const std::set<std::string> kKeywords = {"fun",  "lambda", "let", "rec",   "letrec", "in",
                                         "if",   "then",   "else", "tt",   "ff",     "qinit",
                                         "meas", "box",    "unbox"};

Term make(decltype(Node::v) v, const Token& at) {
  auto n = std::make_shared<Node>();
  n->v = std::move(v);
  n->line = at.line;
  n->column = at.column;
  return n;
}

Token nowhere() {
  Token t;
  t.line = 0;
  t.column = 0;
  return t;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : ts_(tokenize(src, {"->"})) {}

  Term parse() {
    Term t = term();
    if (!ts_.at_end()) ts_.fail("unexpected token after term");
    return t;
  }

 private:
  std::string binder() {
    const Token t = ts_.expect_ident();
    if (kKeywords.count(t.text) || is_gate_name(t.text)) {
      TokenStream::fail_at(t, "reserved word used as a variable");
    }
    return t.text;
  }

  bool binder_next() const {
    const Token& t = ts_.peek();
    return t.kind == TokKind::kIdent && !kKeywords.count(t.text) && !is_gate_name(t.text);
  }

  Term curry(const std::vector<std::string>& params, Term body, const Token& at) {
    for (auto it = params.rbegin(); it != params.rend(); ++it) body = make(Lam{*it, body}, at);
    return body;
  }

  Term term() {
    const Token t = ts_.peek();
    if (t.is("\\") || t.is("fun") || t.is("lambda")) {
      ts_.next();
      std::vector<std::string> params{binder()};
      while (binder_next()) params.push_back(binder());
      if (!ts_.accept(".") && !ts_.accept("->")) ts_.fail("expected '.' or '->' after parameters");
      return curry(params, term(), t);
    }
    if (t.is("letrec") || (t.is("let") && ts_.peek(1).is("rec"))) {
      ts_.next();
      if (t.is("let")) ts_.next();
      const std::string fn = binder();
      const std::string param = binder();
      std::vector<std::string> more;
      while (binder_next()) more.push_back(binder());
      ts_.expect("=");
      Term fn_body = curry(more, term(), t);
      ts_.expect("in");
      return make(LetRec{fn, param, fn_body, term()}, t);
    }
    if (t.is("let")) {
      ts_.next();
      const Token open = ts_.peek();
      if (open.is("<") || open.is("(")) {
        ts_.next();
        const char* close = open.is("<") ? ">" : ")";
        if (ts_.accept(close)) {
          ts_.expect("=");
          Term bound = term();
          ts_.expect("in");
          return make(LetUnit{bound, term()}, t);
        }
        const std::string x = binder();
        ts_.expect(",");
        const std::string y = binder();
        ts_.expect(close);
        ts_.expect("=");
        Term bound = term();
        ts_.expect("in");
        return make(LetPair{x, y, bound, term()}, t);
      }
      const std::string x = binder();
      std::vector<std::string> params;
      while (binder_next()) params.push_back(binder());
      ts_.expect("=");
      Term bound = curry(params, term(), t);
      ts_.expect("in");
      Term body = term();
      return make(App{make(Lam{x, body}, t), bound}, t);
    }
    if (t.is("if")) {
      ts_.next();
      Term c = term();
      ts_.expect("then");
      Term a = term();
      ts_.expect("else");
      return make(If{c, a, term()}, t);
    }
    return application();
  }

  bool atom_start() const {
    const Token& t = ts_.peek();
    if (t.kind == TokKind::kIdent) {
      static const std::set<std::string> starts = {"tt", "ff", "qinit", "meas", "box", "unbox"};
      return !kKeywords.count(t.text) || starts.count(t.text);
    }
    return t.is("(") || t.is("<");
  }

  Term application() {
    if (!atom_start()) ts_.fail("expected a term");
    Term f = atom();
    while (atom_start()) {
      const Token at = ts_.peek();
      f = make(App{f, atom()}, at);
    }
    return f;
  }

  Term tuple_rest(Term first, const Token& at, const char* close) {
    std::vector<Term> items{std::move(first)};
    while (ts_.accept(",")) items.push_back(term());
    ts_.expect(close);
    Term r = items.back();
    for (std::size_t i = items.size() - 1; i-- > 0;) r = make(Pair{items[i], r}, at);
    return r;
  }

  Term atom() {
    const Token t = ts_.next();
    if (t.is("tt")) return make(BoolLit{true}, t);
    if (t.is("ff")) return make(BoolLit{false}, t);
    if (t.is("(") || t.is("<")) {
      const char* close = t.is("<") ? ">" : ")";
      if (ts_.accept(close)) return make(Unit{}, t);
      Term a = term();
      if (ts_.peek().is(",")) return tuple_rest(a, t, close);
      if (t.is("<")) TokenStream::fail_at(t, "'<' starts a pair; use '(' for grouping");
      ts_.expect(")");
      return a;
    }
    if (t.kind != TokKind::kIdent) TokenStream::fail_at(t, "expected a term");
    if (t.is("qinit") || t.is("meas") || t.is("box") || t.is("unbox") || is_gate_name(t.text)) {
      return make(Const{t.text}, t);
    }
    return make(Var{t.text}, t);
  }

  TokenStream ts_;
};

bool atomic(const Term& t) {
  return std::holds_alternative<Var>(t->v) || std::holds_alternative<Unit>(t->v) ||
         std::holds_alternative<BoolLit>(t->v) || std::holds_alternative<Const>(t->v) ||
         std::holds_alternative<Pair>(t->v) || std::holds_alternative<CircLit>(t->v) ||
         std::holds_alternative<CircFn>(t->v);
}

std::string paren(const Term& t) { return atomic(t) ? to_string(t) : "(" + to_string(t) + ")"; }

}  // namespace

bool is_gate_name(std::string_view name) {
  return qnum::gate_arity(name) > 0 && qnum::gate_param_count(name) == 0;
}

Term parse(std::string_view src) { return Parser(src).parse(); }

std::string to_string(const Term& t) {
  return std::visit(
      [&](const auto& n) -> std::string {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Var>) {
          return n.name;
        } else if constexpr (std::is_same_v<N, Lam>) {
          return "fun " + n.param + " -> " + to_string(n.body);
        } else if constexpr (std::is_same_v<N, App>) {
          const bool left_ok = atomic(n.fn) || std::holds_alternative<App>(n.fn->v);
          return (left_ok ? to_string(n.fn) : "(" + to_string(n.fn) + ")") + " " + paren(n.arg);
        } else if constexpr (std::is_same_v<N, Pair>) {
          return "<" + to_string(n.first) + ", " + to_string(n.second) + ">";
        } else if constexpr (std::is_same_v<N, LetPair>) {
          return "let <" + n.x + ", " + n.y + "> = " + to_string(n.bound) + " in " + to_string(n.body);
        } else if constexpr (std::is_same_v<N, Unit>) {
          return "()";
        } else if constexpr (std::is_same_v<N, LetUnit>) {
          return "let () = " + to_string(n.bound) + " in " + to_string(n.body);
        } else if constexpr (std::is_same_v<N, BoolLit>) {
          return n.value ? "tt" : "ff";
        } else if constexpr (std::is_same_v<N, If>) {
          return "if " + to_string(n.cond) + " then " + to_string(n.then_branch) + " else " +
                 to_string(n.else_branch);
        } else if constexpr (std::is_same_v<N, Const>) {
          return n.name;
        } else if constexpr (std::is_same_v<N, LetRec>) {
          return "letrec " + n.fn + " " + n.param + " = " + to_string(n.fn_body) + " in " +
                 to_string(n.body);
        } else if constexpr (std::is_same_v<N, CircLit>) {
          return "circ[" + std::to_string(n.boxed->circuit.ops().size()) + " ops]";
        } else {
          return "(unbox circ[" + std::to_string(n.boxed->circuit.ops().size()) + " ops])";
        }
      },
      t->v);
}

std::size_t term_size(const Term& t) {
  return std::visit(
      [&](const auto& n) -> std::size_t {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Lam>) {
          return 1 + term_size(n.body);
        } else if constexpr (std::is_same_v<N, App>) {
          return 1 + term_size(n.fn) + term_size(n.arg);
        } else if constexpr (std::is_same_v<N, Pair>) {
          return 1 + term_size(n.first) + term_size(n.second);
        } else if constexpr (std::is_same_v<N, LetPair> || std::is_same_v<N, LetUnit>) {
          return 1 + term_size(n.bound) + term_size(n.body);
        } else if constexpr (std::is_same_v<N, If>) {
          return 1 + term_size(n.cond) + term_size(n.then_branch) + term_size(n.else_branch);
        } else if constexpr (std::is_same_v<N, LetRec>) {
          return 1 + term_size(n.fn_body) + term_size(n.body);
        } else {
          return 1;
        }
      },
      t->v);
}

bool is_value(const Term& t) {
  if (const auto* p = std::get_if<Pair>(&t->v)) return is_value(p->first) && is_value(p->second);
  return std::holds_alternative<Var>(t->v) || std::holds_alternative<Lam>(t->v) ||
         std::holds_alternative<Unit>(t->v) || std::holds_alternative<BoolLit>(t->v) ||
         std::holds_alternative<Const>(t->v) || std::holds_alternative<CircLit>(t->v) ||
         std::holds_alternative<CircFn>(t->v);
}

Term var(std::string name) { return make(Var{std::move(name)}, nowhere()); }
Term lam(std::string param, Term body) { return make(Lam{std::move(param), std::move(body)}, nowhere()); }
Term app(Term fn, Term arg) { return make(App{std::move(fn), std::move(arg)}, nowhere()); }
Term pair(Term a, Term b) { return make(Pair{std::move(a), std::move(b)}, nowhere()); }
Term unit() { return make(Unit{}, nowhere()); }
Term lit(bool b) { return make(BoolLit{b}, nowhere()); }
Term constant(std::string name) { return make(Const{std::move(name)}, nowhere()); }

Term unbox(const Boxed& c) {
  auto n = std::make_shared<Node>();
  n->v = CircFn{std::make_shared<const Boxed>(c)};
  return n;
}

std::optional<std::vector<bool>> bits_of(const Term& value) {
  if (const auto* b = std::get_if<BoolLit>(&value->v)) return std::vector<bool>{b->value};
  if (const auto* p = std::get_if<Pair>(&value->v)) {
    auto a = bits_of(p->first);
    auto b = bits_of(p->second);
    if (!a || !b) return std::nullopt;
    a->insert(a->end(), b->begin(), b->end());
    return a;
  }
  return std::nullopt;
}

}  // namespace qlang::qlc

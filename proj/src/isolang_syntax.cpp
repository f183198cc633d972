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
#include <map>
#include <numbers>
#include <set>

#include "qlang/isolang.hpp"
#include "qlang/lexer.hpp"

namespace qlang::iso {

namespace {

const std::vector<std::string> kSymbols = {"<->", "\xE2\x86\x94", "::", "\xE2\x8A\x97", "\xE2\x8A\x95", "\xCE\xBC",
                                           "\xE2\x8B\x86", "\xE2\x88\x9A", "\xE2\x9F\xA8", "\xE2\x9F\xA9"};
const char* const kIff = "\xE2\x86\x94";
const char* const kOtimes = "\xE2\x8A\x97";
const char* const kOplus = "\xE2\x8A\x95";
const char* const kMu = "\xCE\xBC";
const char* const kStar = "\xE2\x8B\x86";
const char* const kSqrt = "\xE2\x88\x9A";
const char* const kLangle = "\xE2\x9F\xA8";
const char* const kRangle = "\xE2\x9F\xA9";

const std::set<std::string> kKeywords = {"type", "iso", "fix", "inl", "inr", "fold", "tt",  "ff",
                                         "nil",  "mu",  "inv", "sqrt", "exp", "pi",   "i"};

bool is_upper(const std::string& s) { return !s.empty() && std::isupper(static_cast<unsigned char>(s[0])); }

Type make_type(TypeNode::Kind k, std::string name) {
  auto t = std::make_shared<TypeNode>();
  t->kind = k;
  t->name = std::move(name);
  return t;
}

Type subst_params(const Type& t, const std::map<std::string, Type>& binds) {
  using K = TypeNode::Kind;
  switch (t->kind) {
    case K::kParam: {
      auto it = binds.find(t->name);
      return it == binds.end() ? t : it->second;
    }
    case K::kMu:
      return mu(t->name, subst_params(t->a, binds));
    case K::kTensor:
      return tensor(subst_params(t->a, binds), subst_params(t->b, binds));
    case K::kSum:
      return sum(subst_params(t->a, binds), subst_params(t->b, binds));
    default:
      return t;
  }
}

bool unify_params(const Type& pat, const Type& t, std::map<std::string, Type>& binds) {
  using K = TypeNode::Kind;
  if (pat->kind == K::kParam) {
    auto it = binds.find(pat->name);
    if (it != binds.end()) return same_type(it->second, t);
    binds[pat->name] = t;
    return true;
  }
  if (pat->kind != t->kind) return false;
  switch (pat->kind) {
    case K::kUnit:
      return true;
    case K::kRec:
      return pat->name == t->name;
    case K::kMu:
      return unify_params(pat->a, t->a, binds);
    default:
      return unify_params(pat->a, t->a, binds) && unify_params(pat->b, t->b, binds);
  }
}

struct Alias {
  std::vector<std::string> params;
  Type body;
};

// Reference to an iso: name(args) or inv(arg).
struct IsoRef {
  std::string name;
  std::vector<IsoRef> args;
};

std::string ref_text(const IsoRef& r) {
  if (r.args.empty()) return r.name;
  std::string s = r.name + "(";
  for (std::size_t i = 0; i < r.args.size(); ++i) s += (i ? ", " : "") + ref_text(r.args[i]);
  return s + ")";
}

struct Param {
  std::string name;
  Type a, b;
};

}  // namespace

struct IsoDecl {
  std::string name;
  std::vector<Param> params;
  Type a, b;
  std::string fix;
  std::vector<Clause> clauses;
  bool self_called = false;
  int line = 0;
};

struct Module::Impl {
  std::map<std::string, Alias> aliases;
  std::map<std::string, IsoDecl> decls;
  std::vector<std::string> order;
  std::set<std::string> parametric;
  std::map<std::string, IsoPtr> cache;
  std::set<std::string> in_progress;

  Impl() {
    Type b = sum(unit_type(), unit_type());
    aliases["bool"] = {{}, b};
    aliases["qubit"] = {{}, b};
    aliases["list"] = {{"a"}, mu("X", sum(unit_type(), tensor(make_type(TypeNode::Kind::kParam, "a"), rec_var("X"))))};
  }

  IsoPtr resolve(const IsoRef& ref, const std::map<std::string, IsoPtr>& env);
  IsoPtr instantiate(const IsoDecl& d, const std::vector<IsoPtr>& args, const std::string& key);
  Expr rebuild(const Expr& e, const IsoDecl& d, const std::map<std::string, IsoPtr>& env, bool& quantum);
};

namespace {

class Parser {
 public:
  Parser(std::string_view src, Module::Impl& m) : ts_(tokenize(src, kSymbols)), m_(m) {}

  TokenStream& ts() { return ts_; }

  // ---- types ----

  // Params: type variables in scope; allow_free: lowercase names become
  // type variables on first use.
  Type type(std::vector<std::string>& params, bool allow_free) {
    std::vector<std::string> mus;
    return type_sum(params, allow_free, mus);
  }

  // ---- declarations ----

  void module() {
    prescan();
    while (!ts_.at_end()) {
      if (ts_.peek().is("type")) {
        type_decl();
      } else if (ts_.peek().is("iso")) {
        iso_decl();
      } else {
        ts_.fail("expected 'type' or 'iso'");
      }
      ts_.accept(";");
    }
  }

  IsoRef isoref() {
    IsoRef r;
    if (ts_.peek().is("inv")) {
      ts_.next();
      r.name = "inv";
      ts_.expect("(");
      r.args.push_back(isoref());
      ts_.expect(")");
      return r;
    }
    const Token t = ts_.expect_ident();
    if (kKeywords.count(t.text)) TokenStream::fail_at(t, "expected an iso name");
    r.name = t.text;
    if (m_.parametric.count(r.name) && ts_.peek().is("(")) {
      ts_.next();
      do {
        r.args.push_back(isoref());
      } while (ts_.accept(","));
      ts_.expect(")");
    }
    return r;
  }

  // ---- values, patterns and right-hand sides ----

  Value pattern() {
    Value head = pattern_atom();
    if (ts_.accept("::")) return cons(head, pattern());
    return head;
  }

  Expr rhs() {
    const Token start = ts_.peek();
    std::vector<std::pair<Complex, Expr>> terms;
    Complex sign = 1.0;
    if (ts_.accept("-")) sign = -1.0;
    for (;;) {
      auto [c, e] = term();
      terms.push_back({sign * c, e});
      if (ts_.accept("+")) {
        sign = 1.0;
      } else if (ts_.accept("-")) {
        sign = -1.0;
      } else {
        break;
      }
    }
    if (terms.size() == 1 && terms[0].first == Complex(1.0)) return terms[0].second;
    auto e = std::make_shared<ENode>();
    e->kind = ENode::Kind::kComb;
    e->terms = std::move(terms);
    (void)start;
    return e;
  }

  std::string current_decl;
  std::string current_fix;

 private:
  TokenStream ts_;
  Module::Impl& m_;

  void prescan() {
    for (std::size_t k = 0;; ++k) {
      const Token& t = ts_.peek(k);
      if (t.kind == TokKind::kEnd) break;
      if (t.is("iso") && ts_.peek(k + 1).kind == TokKind::kIdent && ts_.peek(k + 2).is("(")) {
        m_.parametric.insert(ts_.peek(k + 1).text);
      }
    }
  }

  Type type_sum(std::vector<std::string>& params, bool allow_free, std::vector<std::string>& mus) {
    Type a = type_prod(params, allow_free, mus);
    if (ts_.accept("+") || ts_.accept(kOplus)) return sum(a, type_sum(params, allow_free, mus));
    return a;
  }

  Type type_prod(std::vector<std::string>& params, bool allow_free, std::vector<std::string>& mus) {
    Type a = type_atom(params, allow_free, mus);
    if (ts_.accept("*") || ts_.accept(kOtimes)) return tensor(a, type_prod(params, allow_free, mus));
    return a;
  }

  Type type_atom(std::vector<std::string>& params, bool allow_free, std::vector<std::string>& mus) {
    const Token t = ts_.peek();
    if (t.kind == TokKind::kNumber && t.text == "1") {
      ts_.next();
      return unit_type();
    }
    if (ts_.accept("(")) {
      Type inner = type_sum(params, allow_free, mus);
      ts_.expect(")");
      return inner;
    }
    if (t.is("mu") || t.is(kMu)) {
      ts_.next();
      const Token x = ts_.expect_ident();
      if (!is_upper(x.text)) TokenStream::fail_at(x, "inductive type variables start with an uppercase letter");
      ts_.expect(".");
      mus.push_back(x.text);
      Type body = type_sum(params, allow_free, mus);
      mus.pop_back();
      return mu(x.text, body);
    }
    if (t.kind != TokKind::kIdent) ts_.fail("expected a type");
    ts_.next();
    for (auto it = mus.rbegin(); it != mus.rend(); ++it) {
      if (*it == t.text) return rec_var(t.text);
    }
    if (std::find(params.begin(), params.end(), t.text) != params.end()) {
      return make_type(TypeNode::Kind::kParam, t.text);
    }
    auto al = m_.aliases.find(t.text);
    if (al != m_.aliases.end()) {
      std::map<std::string, Type> binds;
      for (const auto& p : al->second.params) binds[p] = type_atom(params, allow_free, mus);
      return subst_params(al->second.body, binds);
    }
    if (allow_free && !is_upper(t.text) && !kKeywords.count(t.text)) {
      params.push_back(t.text);
      return make_type(TypeNode::Kind::kParam, t.text);
    }
    TokenStream::fail_at(t, "unknown type '" + t.text + "'");
  }

  void type_decl() {
    ts_.expect("type");
    const Token name = ts_.expect_ident();
    if (kKeywords.count(name.text)) TokenStream::fail_at(name, "reserved word");
    std::vector<std::string> params;
    while (ts_.peek().kind == TokKind::kIdent) params.push_back(ts_.next().text);
    ts_.expect("=");
    std::vector<std::string> scope = params;
    Type body = type(scope, false);
    m_.aliases[name.text] = {params, body};
  }

  bool accept_iff() { return ts_.accept("<->") || ts_.accept(kIff); }

  void iso_decl() {
    ts_.expect("iso");
    const Token name = ts_.expect_ident();
    if (kKeywords.count(name.text)) TokenStream::fail_at(name, "reserved word");
    if (m_.decls.count(name.text)) TokenStream::fail_at(name, "iso '" + name.text + "' is already defined");
    IsoDecl d;
    d.name = name.text;
    d.line = name.line;
    std::vector<std::string> tparams;
    if (ts_.accept("(")) {
      do {
        Param p;
        p.name = ts_.expect_ident().text;
        ts_.expect(":");
        p.a = type(tparams, true);
        if (!accept_iff()) ts_.fail("expected '<->'");
        p.b = type(tparams, true);
        d.params.push_back(std::move(p));
      } while (ts_.accept(","));
      ts_.expect(")");
    }
    ts_.expect(":");
    d.a = type(tparams, true);
    if (!accept_iff()) ts_.fail("expected '<->'");
    d.b = type(tparams, true);
    ts_.accept("=");
    if (ts_.accept("fix")) {
      d.fix = ts_.expect_ident().text;
      ts_.expect(".");
    }
    current_decl = d.name;
    current_fix = d.fix;
    params_ = {};
    for (const auto& p : d.params) params_.insert(p.name);
    ts_.expect("{");
    while (!ts_.peek().is("}")) {
      Clause c;
      c.line = ts_.peek().line;
      c.lhs = pattern();
      if (!accept_iff()) ts_.fail("expected '<->'");
      c.rhs = rhs();
      d.clauses.push_back(std::move(c));
      if (!ts_.accept(";") && !ts_.accept("|")) break;
    }
    ts_.expect("}");
    d.self_called = self_called_;
    self_called_ = false;
    current_decl.clear();
    current_fix.clear();
    m_.order.push_back(d.name);
    m_.decls.emplace(d.name, std::move(d));
  }

  std::set<std::string> params_;
  bool self_called_ = false;

  static Value cons(Value h, Value t) { return v_fold(v_inr(v_pair(std::move(h), std::move(t)))); }

  bool closing(const Token& t) const { return t.is(">") || t.is(kRangle); }

  Value pattern_atom() {
    const Token t = ts_.peek();
    if (t.is("*") || t.is(kStar)) {
      ts_.next();
      return v_unit();
    }
    if (t.is("tt") || t.is("ff")) {
      ts_.next();
      return v_bool(t.is("tt"));
    }
    if (t.is("nil")) {
      ts_.next();
      return v_list({});
    }
    if (t.is("inl") || t.is("inr") || t.is("fold")) {
      ts_.next();
      Value a = pattern_atom();
      return t.is("inl") ? v_inl(a) : t.is("inr") ? v_inr(a) : v_fold(a);
    }
    if (t.is("(") || t.is("<") || t.is(kLangle)) {
      ts_.next();
      const bool paren = t.is("(");
      if (paren && ts_.accept(")")) return v_unit();
      if (!paren && closing(ts_.peek())) {
        ts_.next();
        return v_unit();
      }
      std::vector<Value> items{pattern()};
      while (ts_.accept(",")) items.push_back(pattern());
      if (paren) {
        ts_.expect(")");
      } else if (!closing(ts_.next())) {
        ts_.fail("expected '>'");
      }
      Value v = items.back();
      for (std::size_t k = items.size() - 1; k-- > 0;) v = v_pair(items[k], v);
      return v;
    }
    if (t.is("[")) {
      ts_.next();
      std::vector<Value> items;
      if (!ts_.accept("]")) {
        do {
          items.push_back(pattern());
        } while (ts_.accept(","));
        ts_.expect("]");
      }
      return v_list(items);
    }
    if (t.kind == TokKind::kIdent && !kKeywords.count(t.text)) {
      ts_.next();
      return v_var(t.text);
    }
    ts_.fail("expected a pattern");
  }

  // ---- amplitudes ----

  std::optional<Complex> amp_sum() {
    auto a = amp_mul();
    if (!a) return std::nullopt;
    for (;;) {
      const std::size_t save = ts_.position();
      const bool minus = ts_.peek().is("-");
      if (!minus && !ts_.peek().is("+")) break;
      ts_.next();
      auto b = amp_mul();
      if (!b) {
        ts_.reset(save);
        break;
      }
      *a += minus ? -*b : *b;
    }
    return a;
  }

  std::optional<Complex> amp_mul() {
    auto a = amp_unary();
    if (!a) return std::nullopt;
    for (;;) {
      const std::size_t save = ts_.position();
      const bool div = ts_.peek().is("/");
      if (!div && !ts_.peek().is("*")) break;
      ts_.next();
      auto b = amp_unary();
      if (!b) {
        ts_.reset(save);
        break;
      }
      *a = div ? *a / *b : *a * *b;
    }
    return a;
  }

  std::optional<Complex> amp_unary() {
    if (ts_.peek().is("-")) {
      const std::size_t save = ts_.position();
      ts_.next();
      auto a = amp_unary();
      if (!a) {
        ts_.reset(save);
        return std::nullopt;
      }
      return -*a;
    }
    return amp_atom();
  }

  std::optional<Complex> amp_call() {
    const std::size_t save = ts_.position();
    if (!ts_.accept("(")) return std::nullopt;
    auto a = amp_sum();
    if (!a || !ts_.accept(")")) {
      ts_.reset(save);
      return std::nullopt;
    }
    return a;
  }

  std::optional<Complex> amp_atom() {
    const Token t = ts_.peek();
    const std::size_t save = ts_.position();
    if (t.kind == TokKind::kNumber) {
      ts_.next();
      try {
        return Complex(std::stod(t.text), 0.0);
      } catch (const std::exception&) {
        TokenStream::fail_at(t, "bad number");
      }
    }
    if (t.is("i")) {
      ts_.next();
      return Complex(0.0, 1.0);
    }
    if (t.is("pi")) {
      ts_.next();
      return Complex(std::numbers::pi, 0.0);
    }
    if (t.is("sqrt") || t.is("exp")) {
      ts_.next();
      auto a = amp_call();
      if (!a) {
        ts_.reset(save);
        return std::nullopt;
      }
      return t.is("sqrt") ? std::sqrt(*a) : std::exp(*a);
    }
    if (t.is(kSqrt)) {
      ts_.next();
      auto a = amp_atom();
      if (!a) {
        ts_.reset(save);
        return std::nullopt;
      }
      return std::sqrt(*a);
    }
    if (t.is("(")) return amp_call();
    return std::nullopt;
  }

  // ---- right-hand sides ----

  std::pair<Complex, Expr> term() {
    const std::size_t save = ts_.position();
    if (auto c = amp_mul()) {
      if (ts_.accept("*") || ts_.peek().is("(")) {
        if (starts_value(ts_.peek())) return {*c, rval()};
      }
      ts_.reset(save);
    }
    return {1.0, rval()};
  }

  bool starts_value(const Token& t) const {
    if (t.kind == TokKind::kIdent) return !kKeywords.count(t.text) || t.is("inl") || t.is("inr") || t.is("fold") ||
                                          t.is("tt") || t.is("ff") || t.is("nil") || t.is("inv");
    return t.is("*") || t.is(kStar) || t.is("(") || t.is("<") || t.is(kLangle) || t.is("[");
  }

  Expr rval() {
    Expr head = rapp();
    if (ts_.accept("::")) {
      Expr tail = rval();
      auto p = node(ENode::Kind::kPair);
      p->a = head;
      p->b = tail;
      return wrap(ENode::Kind::kFold, wrap(ENode::Kind::kInr, p));
    }
    return head;
  }

  static std::shared_ptr<ENode> node(ENode::Kind k) {
    auto e = std::make_shared<ENode>();
    e->kind = k;
    return e;
  }

  static Expr wrap(ENode::Kind k, Expr a) {
    auto e = node(k);
    e->a = std::move(a);
    return e;
  }

  Expr rapp() {
    const Token t = ts_.peek();
    if (t.is("inl") || t.is("inr") || t.is("fold")) {
      ts_.next();
      Expr a = rapp();
      return wrap(t.is("inl") ? ENode::Kind::kInl : t.is("inr") ? ENode::Kind::kInr : ENode::Kind::kFold, a);
    }
    const bool iso_head =
        t.is("inv") || (t.kind == TokKind::kIdent && !kKeywords.count(t.text) &&
                        ((m_.parametric.count(t.text) && ts_.peek(1).is("(")) || starts_value(ts_.peek(1))));
    if (iso_head) {
      IsoRef r = isoref();
      auto e = node(ENode::Kind::kApp);
      e->iso_text = ref_text(r);
      if (r.name == current_decl || (!current_fix.empty() && r.name == current_fix)) self_called_ = true;
      e->a = rapp();
      return e;
    }
    return ratom();
  }

  Expr ratom() {
    const Token t = ts_.peek();
    if (t.is("*") || t.is(kStar)) {
      ts_.next();
      return node(ENode::Kind::kUnit);
    }
    if (t.is("tt") || t.is("ff")) {
      ts_.next();
      return wrap(t.is("tt") ? ENode::Kind::kInr : ENode::Kind::kInl, node(ENode::Kind::kUnit));
    }
    if (t.is("nil")) {
      ts_.next();
      return wrap(ENode::Kind::kFold, wrap(ENode::Kind::kInl, node(ENode::Kind::kUnit)));
    }
    if (t.is("(") || t.is("<") || t.is(kLangle)) {
      ts_.next();
      const bool paren = t.is("(");
      if (paren && ts_.accept(")")) return node(ENode::Kind::kUnit);
      if (!paren && closing(ts_.peek())) {
        ts_.next();
        return node(ENode::Kind::kUnit);
      }
      std::vector<Expr> items{paren ? rhs() : rval_or_comb()};
      while (ts_.accept(",")) items.push_back(rval_or_comb());
      if (paren) {
        ts_.expect(")");
      } else if (!closing(ts_.next())) {
        ts_.fail("expected '>'");
      }
      Expr e = items.back();
      for (std::size_t k = items.size() - 1; k-- > 0;) {
        auto p = node(ENode::Kind::kPair);
        p->a = items[k];
        p->b = e;
        e = p;
      }
      return e;
    }
    if (t.is("[")) {
      ts_.next();
      std::vector<Expr> items;
      if (!ts_.accept("]")) {
        do {
          items.push_back(rval());
        } while (ts_.accept(","));
        ts_.expect("]");
      }
      Expr l = wrap(ENode::Kind::kFold, wrap(ENode::Kind::kInl, node(ENode::Kind::kUnit)));
      for (auto it = items.rbegin(); it != items.rend(); ++it) {
        auto p = node(ENode::Kind::kPair);
        p->a = *it;
        p->b = l;
        l = wrap(ENode::Kind::kFold, wrap(ENode::Kind::kInr, p));
      }
      return l;
    }
    if (t.kind == TokKind::kIdent && !kKeywords.count(t.text)) {
      ts_.next();
      auto e = node(ENode::Kind::kVar);
      e->name = t.text;
      return e;
    }
    ts_.fail("expected a value");
  }

  Expr rval_or_comb() { return rhs(); }
};

IsoRef parse_ref_text(const std::string& text, Module::Impl& m) {
  Parser p(text, m);
  IsoRef r = p.isoref();
  if (!p.ts().at_end()) p.ts().fail("unexpected text after iso expression");
  return r;
}

using Combo = std::map<Value, Complex, ValueLess>;

Combo expand(const Expr& e) {
  auto add = [](Combo& into, const Value& v, Complex c) {
    auto [it, fresh] = into.emplace(v, c);
    if (!fresh) it->second += c;
  };
  Combo out;
  switch (e->kind) {
    case ENode::Kind::kUnit:
      out[v_unit()] = 1.0;
      return out;
    case ENode::Kind::kPair:
      for (const auto& [a, ca] : expand(e->a)) {
        for (const auto& [b, cb] : expand(e->b)) add(out, v_pair(a, b), ca * cb);
      }
      return out;
    case ENode::Kind::kInl:
    case ENode::Kind::kInr:
    case ENode::Kind::kFold:
      for (const auto& [a, c] : expand(e->a)) {
        add(out, e->kind == ENode::Kind::kInl ? v_inl(a) : e->kind == ENode::Kind::kInr ? v_inr(a) : v_fold(a), c);
      }
      return out;
    case ENode::Kind::kComb:
      for (const auto& [c, t] : e->terms) {
        for (const auto& [v, d] : expand(t)) add(out, v, c * d);
      }
      return out;
    case ENode::Kind::kVar:
      throw IsoError("a value cannot contain the variable '" + e->name + "'");
    case ENode::Kind::kApp:
      throw IsoError("a value cannot contain an iso application");
  }
  return out;
}

bool has_comb(const Expr& e) {
  if (e->kind == ENode::Kind::kComb) return true;
  for (const auto& [c, t] : e->terms) {
    if (has_comb(t)) return true;
  }
  return (e->a && has_comb(e->a)) || (e->b && has_comb(e->b));
}

}  // namespace

Expr Module::Impl::rebuild(const Expr& e, const IsoDecl& d, const std::map<std::string, IsoPtr>& env,
                           bool& quantum) {
  auto out = std::make_shared<ENode>(*e);
  if (e->a) out->a = rebuild(e->a, d, env, quantum);
  if (e->b) out->b = rebuild(e->b, d, env, quantum);
  for (auto& [c, t] : out->terms) t = rebuild(t, d, env, quantum);
  if (e->kind == ENode::Kind::kApp) {
    const IsoRef r = parse_ref_text(e->iso_text, *this);
    if (r.name == d.name || (!d.fix.empty() && r.name == d.fix)) {
      out->iso = nullptr;
      out->iso_text = d.fix.empty() ? d.name : d.fix;
    } else {
      out->iso = resolve(r, env);
      out->iso_text = out->iso->name;
      if (out->iso->quantum) quantum = true;
    }
  }
  return out;
}

IsoPtr Module::Impl::instantiate(const IsoDecl& d, const std::vector<IsoPtr>& args, const std::string& key) {
  if (in_progress.count(key)) {
    throw IsoError("iso " + key + " refers to itself through another iso; use a fixpoint");
  }
  in_progress.insert(key);
  struct Done {
    std::set<std::string>& s;
    std::string k;
    ~Done() { s.erase(k); }
  } done{in_progress, key};

  std::map<std::string, Type> binds;
  std::map<std::string, IsoPtr> env;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const Param& p = d.params[i];
    if (!unify_params(p.a, args[i]->a, binds) || !unify_params(p.b, args[i]->b, binds)) {
      throw IsoError("argument " + args[i]->name + " of " + d.name + " has type " + to_string(args[i]->a) + " <-> " +
                     to_string(args[i]->b) + ", expected " + to_string(subst_params(p.a, binds)) + " <-> " +
                     to_string(subst_params(p.b, binds)));
    }
    env[p.name] = args[i];
  }
  auto iso = std::make_shared<Iso>();
  iso->name = key;
  iso->a = subst_params(d.a, binds);
  iso->b = subst_params(d.b, binds);
  iso->fix_binder = !d.fix.empty() ? d.fix : d.self_called ? d.name : "";
  bool quantum = false;
  for (const auto& c : d.clauses) {
    Clause n;
    n.lhs = c.lhs;
    n.line = c.line;
    n.rhs = rebuild(c.rhs, d, env, quantum);
    if (has_comb(n.rhs)) quantum = true;
    iso->clauses.push_back(std::move(n));
  }
  iso->quantum = quantum;
  cache[key] = iso;
  return iso;
}

IsoPtr Module::Impl::resolve(const IsoRef& ref, const std::map<std::string, IsoPtr>& env) {
  if (ref.name == "inv") {
    IsoPtr inner = resolve(ref.args.at(0), env);
    const std::string key = "inv(" + inner->name + ")";
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto inv = std::make_shared<const Iso>(invert(*inner));
    cache[key] = inv;
    return inv;
  }
  auto e = env.find(ref.name);
  if (e != env.end()) {
    if (!ref.args.empty()) throw IsoError("iso parameter " + ref.name + " takes no arguments");
    return e->second;
  }
  auto d = decls.find(ref.name);
  if (d == decls.end()) throw IsoError("unknown iso '" + ref.name + "'");
  if (ref.args.size() != d->second.params.size()) {
    throw IsoError("iso " + ref.name + " expects " + std::to_string(d->second.params.size()) + " argument(s), got " +
                   std::to_string(ref.args.size()));
  }
  std::vector<IsoPtr> args;
  std::string key = ref.name;
  for (std::size_t i = 0; i < ref.args.size(); ++i) {
    args.push_back(resolve(ref.args[i], env));
    key += (i ? ", " : "(") + args.back()->name;
  }
  if (!args.empty()) key += ")";
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  return instantiate(d->second, args, key);
}

Module::Module() : impl_(std::make_unique<Impl>()) {}
Module::~Module() = default;
Module::Module(Module&&) noexcept = default;
Module& Module::operator=(Module&&) noexcept = default;

IsoPtr Module::get(std::string_view expr) {
  return impl_->resolve(parse_ref_text(std::string(expr), *impl_), {});
}

std::vector<std::string> Module::names() const { return impl_->order; }

std::vector<std::string> Module::closed_names() const {
  std::vector<std::string> out;
  for (const auto& n : impl_->order) {
    if (impl_->decls.at(n).params.empty()) out.push_back(n);
  }
  return out;
}

Type Module::type(std::string_view src) const {
  Parser p(src, *impl_);
  std::vector<std::string> params;
  Type t = p.type(params, true);
  if (!p.ts().at_end()) p.ts().fail("unexpected text after type");
  return t;
}

AmpValue Module::value(std::string_view src) const {
  Parser p(src, *impl_);
  Expr e = p.rhs();
  if (!p.ts().at_end()) p.ts().fail("unexpected text after value");
  AmpValue out;
  for (const auto& [v, c] : expand(e)) {
    if (std::abs(c) > 1e-12) out.terms.push_back({c, v});
  }
  return out;
}

Module parse_module(std::string_view src) {
  Module m;
  Parser p(src, *m.impl_);
  p.module();
  return m;
}

}  // namespace qlang::iso

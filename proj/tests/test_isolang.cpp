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

#include <doctest.h>

#include <cmath>
#include <set>

#include "iso_corpus.hpp"

using namespace qlang;
using namespace qlang::iso;
using qnum::Matrix;

namespace {

Module corpus() { return parse_module(testing::iso_corpus_source()); }

Value val(Module& m, const std::string& src) {
  const AmpValue a = m.value(src);
  REQUIRE(a.terms.size() == 1);
  return a.terms[0].second;
}

bool same_value(const Value& a, const Value& b) { return compare(a, b) == 0; }

// Independent first-match oracle: counts clauses whose lhs matches v.
bool matches(const Value& p, const Value& v) {
  if (p->kind == VNode::Kind::kVar) return true;
  if (p->kind != v->kind) return false;
  if (p->kind == VNode::Kind::kUnit) return true;
  if (p->kind == VNode::Kind::kPair) return matches(p->a, v->a) && matches(p->b, v->b);
  return matches(p->a, v->a);
}

std::vector<Value> items_of(Value l) {
  std::vector<Value> out;
  while (l->a->kind == VNode::Kind::kInr) {
    out.push_back(l->a->a->a);
    l = l->a->a->b;
  }
  return out;
}

std::vector<Value> all_bool_lists(int max_len) {
  std::vector<std::vector<Value>> layer{{}};
  std::vector<Value> out{v_list({})};
  for (int n = 1; n <= max_len; ++n) {
    std::vector<std::vector<Value>> next;
    for (const auto& l : layer) {
      for (bool b : {false, true}) {
        auto k = l;
        k.push_back(v_bool(b));
        out.push_back(v_list(k));
        next.push_back(std::move(k));
      }
    }
    layer = std::move(next);
  }
  return out;
}

Matrix mat2(qnum::Complex a, qnum::Complex b, qnum::Complex c, qnum::Complex d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

Module parse_one(const std::string& src) { return parse_module(src); }

}  // namespace

TEST_CASE("iso types and values") {
  Module m = corpus();
  CHECK(to_string(m.type("bool * (1 + 1)")) == "(1 + 1) * (1 + 1)");
  CHECK(same_type(m.type("list bool"), m.type("mu Y. 1 + (1 + 1) * Y")));
  CHECK_FALSE(same_type(m.type("bool"), m.type("1 + 1 + 1")));
  CHECK(to_string(val(m, "[tt, ff]")) == "[tt, ff]");
  CHECK(same_value(val(m, "tt :: ff :: nil"), val(m, "[tt, ff]")));
  CHECK(same_value(val(m, "fold inr <tt, fold inl *>"), val(m, "[tt]")));
  CHECK(same_value(val(m, "ff"), v_inl(v_unit())));
  CHECK(enumerate(m.type("bool * bool")).size() == 4);
  // Depth d yields lists shorter than d.
  CHECK(enumerate(m.type("list bool"), 4).size() == 1 + 2 + 4 + 8);
  const auto order = enumerate(m.type("1 + bool"));
  REQUIRE(order.size() == 3);
  CHECK(to_string(order[0]) == "ff");
  CHECK(to_string(order[1]) == "inr ff");
  const AmpValue s = m.value("0.6 * ff + 0.8 * tt");
  CHECK(s.terms.size() == 2);
  CHECK(s.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("iso syntax errors") {
  CHECK_THROWS_AS(parse_one("iso f : bool <-> bool { x <-> }"), SyntaxError);
  CHECK_THROWS_AS(parse_one("iso f : bool <-> { x <-> x }"), SyntaxError);
  CHECK_THROWS_AS(parse_one("iso f : Foo <-> Foo { x <-> x }"), SyntaxError);
  CHECK_THROWS_AS(parse_one("iso f : bool <-> bool { x <-> x } iso f : bool <-> bool { x <-> x }"), SyntaxError);
  try {
    parse_one("iso f : bool <-> bool {\n  x <-> <x,\n}");
    FAIL("no error");
  } catch (const SyntaxError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("check_iso examples") {
  Module m = corpus();
  CHECK(check_iso(*m.get("omega")) == "a * (b + c) <-> a * b + a * c");
  CHECK(check_iso(*m.get("map(not)")) == "mu X. 1 + (1 + 1) * X <-> mu X. 1 + (1 + 1) * X");

  auto reject = [](const std::string& src, const std::string& needle) {
    Module bad = parse_module(src);
    try {
      check_iso(*bad.get(bad.names().front()));
      FAIL("accepted: " << src);
    } catch (const IsoError& e) {
      CHECK_MESSAGE(std::string(e.what()).find(needle) != std::string::npos, std::string(e.what()));
    }
  };
  reject("iso f : a + b <-> a + b { inl x <-> inl x }", "inr _ is not covered");
  reject("iso f : bool <-> bool * bool { x <-> <x, x> }", "more than once");
  reject("iso f : bool * bool <-> bool { <x, y> <-> x }", "'y' is not used");
  reject("iso f : bool <-> bool { x <-> y }", "not bound");
  reject("iso f : bool * bool <-> bool * bool { <x, x> <-> <x, x> }", "appears twice");
  reject("iso f : bool <-> bool { x <-> x; tt <-> ff }", "overlap");
  reject("iso f : bool <-> bool { ff <-> ff; tt <-> ff }", "right patterns overlap");
  reject("iso f : bool <-> 1 + bool { ff <-> inl *; tt <-> inr ff }", "inr tt is not covered");
  reject("iso f : bool * bool <-> bool * bool { <ff, y> <-> <ff, y> }", "<tt, _> is not covered");
  reject("iso f : bool <-> bool { * <-> * }", "does not have type");
  reject("iso f : bool <-> bool * bool { x <-> x }", "expected");
  reject("iso f : bool <-> bool { ff <-> 0.5 * ff; tt <-> tt }", "orthonormal");
  reject("iso f : bool <-> bool { ff <-> sqrt(0.5) * ff + sqrt(0.5) * tt; tt <-> sqrt(0.5) * ff + sqrt(0.5) * tt }",
         "orthonormal");
  reject("iso f : list bool <-> list bool { x <-> -1 * x }", "only checked on finite");
  reject("iso f : bool <-> bool { ff <-> 0.6 * ff + 0.8 * tt; tt <-> 0.8 * ff - 0.6 * x }", "not bound");

  CHECK_THROWS_AS(m.get("nope"), IsoError);
}

TEST_CASE("check soundness by enumeration") {
  Module m = corpus();
  for (const auto& name : testing::iso_classical_names()) {
    CAPTURE(name);
    IsoPtr f = m.get(name);
    REQUIRE_NOTHROW(check_iso(*f));
    for (const auto& v : enumerate(f->a)) {
      int hits = 0;
      for (const auto& c : f->clauses) hits += matches(c.lhs, v) ? 1 : 0;
      CHECK(hits == 1);
    }
  }
}

TEST_CASE("invert") {
  Module m = corpus();
  IsoPtr omega = m.get("omega");
  const Iso inv = invert(*omega);
  CHECK(to_string(inv.clauses[0].lhs) == "inl <x, y>");
  CHECK(to_string(inv.clauses[1].lhs) == "inr <x, y>");
  CHECK(same_type(inv.a, omega->b));
  CHECK(check_iso(inv) == "a * b + a * c <-> a * (b + c)");
  CHECK(same_iso(invert(inv), *omega));
  CHECK(same_iso(invert(*m.get("id")), *m.get("id")));

  IsoPtr omega1 = m.get("omega1");
  const Iso inv1 = invert(*omega1);
  for (const auto& v : enumerate(omega1->a)) {
    CHECK(same_value(qlang::iso::apply(inv1, qlang::iso::apply(*omega1, v)), v));
  }
  CHECK(to_string(qlang::iso::apply(*omega, val(m, "<*, inr *>"))) == "inr <*, *>");

  // Nested applications invert to the reversed chain of inverses.
  const Iso sc = invert(*m.get("swapcnot"));
  CHECK(sc.clauses[0].rhs->iso_text == "inv(cnot)");
  CHECK(sc.clauses[0].rhs->a->iso_text == "inv(swap)");
  CHECK(same_iso(invert(sc), *m.get("swapcnot")));
  CHECK(same_iso(*m.get("inv(inv(cnot))"), *m.get("cnot")));

  CHECK_THROWS_AS(invert(*m.get("had")), IsoError);
  CHECK_THROWS_AS(invert(*m.get("ctrl_h")), IsoError);
}

TEST_CASE("classical corpus is bijective and inverted exactly") {
  Module m = corpus();
  for (const auto& name : testing::iso_classical_names()) {
    CAPTURE(name);
    IsoPtr f = m.get(name);
    const auto dom = enumerate(f->a);
    const auto cod = enumerate(f->b);
    REQUIRE(dom.size() <= 16);
    REQUIRE(dom.size() == cod.size());
    IsoPtr g = m.get("inv(" + name + ")");
    REQUIRE_NOTHROW(check_iso(*g));
    std::set<Value, ValueLess> image;
    for (const auto& v : dom) {
      const Value w = qlang::iso::apply(*f, v);
      image.insert(w);
      CHECK(same_value(qlang::iso::apply(*g, w), v));
    }
    CHECK(image.size() == dom.size());
    for (const auto& w : cod) CHECK(image.count(w) == 1);
  }
}

TEST_CASE("apply on lists") {
  Module m = corpus();
  IsoPtr map_not = m.get("map(not)");
  CHECK(to_string(qlang::iso::apply(*map_not, val(m, "nil"))) == "[]");
  CHECK(to_string(qlang::iso::apply(*map_not, val(m, "[tt, ff]"))) == "[ff, tt]");
  CHECK(structural_guard(*map_not).empty());

  IsoPtr map_id = m.get("map(id)");
  IsoPtr map_notnot = m.get("map(inv(not))");
  for (const auto& l : all_bool_lists(5)) {
    const Value out = qlang::iso::apply(*map_not, l);
    const auto in = items_of(l);
    const auto got = items_of(out);
    REQUIRE(in.size() == got.size());
    for (std::size_t k = 0; k < in.size(); ++k) CHECK(same_value(got[k], v_bool(in[k]->kind == VNode::Kind::kInl)));
    CHECK(same_value(qlang::iso::apply(*map_id, l), l));
    CHECK(same_value(qlang::iso::apply(*map_notnot, out), l));
  }

  IsoPtr map_pair = m.get("map(cnot)");
  const Value pl = val(m, "[<tt, ff>, <ff, tt>, <tt, tt>]");
  CHECK(to_string(qlang::iso::apply(*map_pair, pl)) == "[<tt, tt>, <ff, tt>, <tt, ff>]");
  CHECK_THROWS_AS(qlang::iso::apply(*map_not, val(m, "[tt]"), 1), IsoError);
}

TEST_CASE("map functoriality") {
  Module m = parse_module(std::string(testing::iso_corpus_source()) + R"(
iso rot : (1 + 1) * (1 + 1) <-> (1 + 1) * (1 + 1) { p <-> inc (swap p) }
)");
  IsoPtr both = m.get("map(rot)");
  IsoPtr first = m.get("map(swap)");
  IsoPtr second = m.get("map(inc)");
  std::vector<Value> pairs = enumerate(m.type("bool * bool"));
  std::vector<std::vector<Value>> lists{{}};
  for (int n = 1; n <= 5; ++n) {
    std::vector<Value> l;
    for (int k = 0; k < n; ++k) l.push_back(pairs[static_cast<std::size_t>((k * 3 + n) % 4)]);
    lists.push_back(l);
  }
  for (const auto& items : lists) {
    const Value l = v_list(items);
    CHECK(same_value(qlang::iso::apply(*both, l), qlang::iso::apply(*second, qlang::iso::apply(*first, l))));
  }
}

TEST_CASE("quantum isos") {
  Module m = corpus();
  const double r = 1.0 / std::sqrt(2.0);
  const Matrix h = mat2(r, r, r, -r);
  CHECK((to_matrix(*m.get("had")) - h).norm() < 1e-12);
  CHECK((to_matrix(*m.get("H")) - h).norm() < 1e-12);

  const AmpValue plus = apply_quantum(*m.get("had"), m.value("ff"));
  REQUIRE(plus.terms.size() == 2);
  CHECK(std::abs(plus.terms[0].first - r) < 1e-12);
  CHECK(std::abs(plus.terms[1].first - r) < 1e-12);
  const AmpValue back = apply_quantum(*m.get("had"), m.value("1/sqrt(2) * ff + 1/sqrt(2) * tt"));
  REQUIRE(back.terms.size() == 1);
  CHECK(to_string(back.terms[0].second) == "ff");
  CHECK(std::abs(back.terms[0].first - 1.0) < 1e-12);
  CHECK_THROWS_AS(qlang::iso::apply(*m.get("had"), val(m, "ff")), IsoError);

  const AmpValue any = m.value("0.6 * ff + 0.8 * i * tt");
  const AmpValue same = apply_quantum(*m.get("id"), any);
  REQUIRE(same.terms.size() == 2);
  CHECK(std::abs(same.terms[1].first - qnum::Complex(0, 0.8)) < 1e-15);

  for (const auto& name : testing::iso_quantum_names()) {
    CAPTURE(name);
    IsoPtr f = m.get(name);
    CHECK(f->quantum == (name != "X"));
    REQUIRE_NOTHROW(check_iso(*f));
    const Matrix u = to_matrix(*f);
    CHECK((u.adjoint() * u - Matrix::Identity(u.cols(), u.cols())).norm() < 1e-9);
    for (const auto& v : enumerate(f->a)) {
      AmpValue in;
      in.terms = {{0.6, v}};
      for (const auto& w : enumerate(f->a)) {
        if (compare(w, v) != 0) {
          in.terms.push_back({qnum::Complex(0, 0.8), w});
          break;
        }
      }
      CHECK(std::abs(apply_quantum(*f, in).norm() - 1.0) < 1e-9);
    }
  }
  Module unit = parse_module("iso w : 1 * (1 + 1) <-> (1 * 1) + (1 * 1) { <x, inl y> <-> inl <x, y>; <x, inr y> <-> inr <x, y> }");
  CHECK(to_matrix(*unit.get("w")).isApprox(Matrix::Identity(2, 2)));
  // <ff, tt> goes to inr <ff, *>, the third basis value.
  const Matrix p = to_matrix(*m.get("omega1"));
  CHECK(p(2, 1) == qnum::Complex(1.0));
  CHECK(p(1, 2) == qnum::Complex(1.0));
  CHECK(p.cwiseAbs().sum() == doctest::Approx(4.0));
}

TEST_CASE("switch matches the branch products") {
  Module m = corpus();
  const double r = 1.0 / std::sqrt(2.0);
  const std::map<std::string, Matrix> gates = {
      {"X", mat2(0, 1, 1, 0)},
      {"Z", mat2(1, 0, 0, -1)},
      {"H", mat2(r, r, r, -r)},
      {"T", mat2(1, 0, 0, std::polar(1.0, qnum::kPi / 4))},
  };
  for (const auto& [u, mu_] : gates) {
    for (const auto& [v, mv] : gates) {
      CAPTURE(u);
      CAPTURE(v);
      Matrix expected = Matrix::Zero(4, 4);
      expected.block(0, 0, 2, 2) = mv * mu_;
      expected.block(2, 2, 2, 2) = mu_ * mv;
      IsoPtr s = m.get("switch(" + u + ", " + v + ")");
      CHECK_NOTHROW(check_iso(*s));
      CHECK((to_matrix(*s) - expected).norm() < 1e-12);
    }
  }
}

TEST_CASE("structural guard") {
  Module m = parse_module(R"(
iso loop : list bool <-> list bool = fix f. { x <-> f x }
iso whole : list bool <-> list bool = fix f. {
  nil <-> nil;
  fold inr <h, t> <-> f <h, t>
}
iso deep : list bool <-> list bool = fix f. {
  nil <-> nil;
  h :: t <-> h :: f t
}
)");
  CHECK(structural_guard(*m.get("loop")).size() == 1);
  CHECK(structural_guard(*m.get("whole")).size() == 1);
  CHECK(structural_guard(*m.get("deep")).empty());
  CHECK_THROWS_AS(qlang::iso::apply(*m.get("loop"), v_list({}), 1000), IsoError);
  CHECK(check_iso(*m.get("deep")) == "mu X. 1 + (1 + 1) * X <-> mu X. 1 + (1 + 1) * X");
}

TEST_CASE("module resolution") {
  Module m = corpus();
  CHECK(m.names().front() == "id");
  const auto closed = m.closed_names();
  CHECK(std::find(closed.begin(), closed.end(), "map") == closed.end());
  CHECK(m.get("map(not)") == m.get("map(not)"));
  CHECK_THROWS_AS(m.get("map"), IsoError);
  CHECK_THROWS_AS(m.get("switch(X)"), IsoError);
  CHECK_THROWS_AS(m.get("switch(X, cnot)"), IsoError);
  Module cyc = parse_module("iso p : bool <-> bool { x <-> q x }\niso q : bool <-> bool { x <-> p x }");
  CHECK_THROWS_AS(cyc.get("p"), IsoError);
}

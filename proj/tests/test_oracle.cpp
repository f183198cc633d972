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


#include "qlang/oracle.hpp"

#include <doctest.h>

#include <set>

#include "oracle_corpus.hpp"

using namespace qlang;
using namespace qlang::oracle;
using qlang::circuit::Circuit;
using qlang::testing::oracle_corpus;

namespace {

bool eval_closed(const std::string& src) {
  const auto bits = value_bits(eval_bool(parse_bterm(src)));
  REQUIRE(bits.size() == 1);
  return bits[0];
}

std::vector<bool> eval_at(const BTerm& t, const std::vector<std::string>& names, std::uint64_t x) {
  std::map<std::string, bool> env;
  for (std::size_t i = 0; i < names.size(); ++i) env[names[i]] = (x >> (names.size() - 1 - i)) & 1U;
  return value_bits(eval_bool(t, env));
}

int count(const circuit::GateCount& gc, const std::string& name) {
  auto it = gc.per_gate.find(name);
  return it == gc.per_gate.end() ? 0 : it->second;
}

}  // namespace

TEST_CASE("parse and print") {
  CHECK(to_string(parse_bterm("\\x. and x tt")) == "\\x. and x tt");
  CHECK(to_string(parse_bterm("fun x y -> x")) == "\\x. \\y. x");
  CHECK(to_string(parse_bterm("λf. f (f tt)")) == "\\f. f (f tt)");
  CHECK(to_string(parse_bterm("let (a, b) = (x, y) in b")) == "let (a, b) = (x, y) in b");
  const std::string src = "letrec f b = if b then tt else f tt in f ff";
  CHECK(to_string(parse_bterm(src)) == src);
  for (const auto& c : oracle_corpus()) {
    CAPTURE(std::string(c.name));
    const BTerm t = parse_bterm(c.src);
    CHECK(to_string(parse_bterm(to_string(t))) == to_string(t));
  }
}

TEST_CASE("parse errors carry positions") {
  try {
    parse_bterm("and x\n  (not");
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_bterm("\\. x"), SyntaxError);
  CHECK_THROWS_AS(parse_bterm("let in = tt in in"), SyntaxError);
  CHECK_THROWS_AS(parse_bterm("x )"), SyntaxError);
}

TEST_CASE("type inference") {
  CHECK(typecheck(parse_bterm("and tt")) == "bool -> bool");
  CHECK(typecheck(parse_bterm("\\f. f tt")) == "(bool -> 't1) -> 't1");
  CHECK(typecheck(parse_bterm("(x, not)"), {"x"}) == "(bool * (bool -> bool))");
  CHECK_THROWS_AS(typecheck(parse_bterm("not not")), OracleError);
  CHECK_THROWS_AS(typecheck(parse_bterm("\\x. x x")), OracleError);
  CHECK_THROWS_AS(typecheck(parse_bterm("if tt then tt else not")), OracleError);
  CHECK_THROWS_WITH_AS(typecheck(parse_bterm("and z")), doctest::Contains("unbound"), OracleError);
}

TEST_CASE("eval_bool examples") {
  CHECK_FALSE(eval_closed("and tt ff"));
  CHECK(eval_closed("(\\f. f (and (f tt) (f ff))) not"));
  CHECK(eval_closed("not (not tt)"));
  CHECK(to_string(eval_bool(parse_bterm("(tt, and ff)"))) == "(tt, <fun>)");
  CHECK(eval_closed("letrec f b = if b then tt else f tt in f ff"));
  CHECK_THROWS_AS(eval_bool(parse_bterm("letrec f b = f b in f tt"), {}, 1000), OracleError);
}

TEST_CASE("landauer blocks") {
  SUBCASE("and") {
    const Landauer l = synth_landauer(parse_bterm("and x y"), {"x", "y"});
    const auto gc = circuit::gate_count(l.circuit);
    CHECK(gc.inits == 1);
    CHECK(gc.gates == 1);
    CHECK(count(gc, "TOFFOLI") == 1);
    REQUIRE(l.outputs.size() == 1);
    CHECK(l.outputs[0] == 2);
    CHECK(l.garbage.empty());
  }
  SUBCASE("constant") {
    const Landauer l = synth_landauer(parse_bterm("tt"), {});
    const auto gc = circuit::gate_count(l.circuit);
    CHECK(gc.inits == 1);
    CHECK(count(gc, "NOT") == 1);
    CHECK(gc.gates == 1);
  }
  SUBCASE("not through a higher-order argument") {
    const Landauer l = synth_landauer(parse_bterm("(\\f. f (and (f x) (f y))) not"), {"x", "y"});
    const auto gc = circuit::gate_count(l.circuit);
    CHECK(gc.inits == 4);
    CHECK(count(gc, "CNOT") == 3);
    CHECK(count(gc, "NOT") == 3);
    CHECK(count(gc, "TOFFOLI") == 1);
    std::vector<std::string> kinds;
    for (const auto& b : l.blocks) kinds.push_back(b.op);
    CHECK(kinds == std::vector<std::string>{"not", "not", "and", "not"});
    CHECK(l.garbage.size() == 3);
  }
  SUBCASE("static control reduces away") {
    const Landauer l = synth_landauer(parse_bterm("if ff then not x else (\\v. v) x"), {"x"});
    CHECK(l.circuit.ops().empty());
    CHECK(l.outputs == std::vector<circuit::WireId>{0});
  }
  SUBCASE("non-static recursion is rejected") {
    CHECK_THROWS_AS(synth_landauer(parse_bterm("letrec f b = if b then f b else ff in f x"), {"x"}, 10000),
                    OracleError);
  }
  SUBCASE("non-bool result") {
    CHECK_THROWS_AS(synth_landauer(parse_bterm("\\v. v"), {"x"}), OracleError);
  }
}

TEST_CASE("landauer circuits compute f") {
  for (const auto& c : oracle_corpus()) {
    CAPTURE(std::string(c.name));
    const BTerm t = parse_bterm(c.src);
    const Landauer l = synth_landauer(t, c.inputs);
    const std::size_t n = c.inputs.size();
    for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
      std::vector<int> in;
      for (std::size_t i = 0; i < n; ++i) in.push_back(static_cast<int>((x >> (n - 1 - i)) & 1U));
      // Run over all wires: inputs then the initialized wires are created on the fly.
      const auto out = simulate_classical(l.circuit, in);
      REQUIRE(out.has_value());
      const auto want = eval_at(t, c.inputs, x);
      std::vector<int> got;
      for (circuit::WireId w : l.outputs) {
        for (std::size_t j = 0; j < l.circuit.outputs().size(); ++j) {
          if (l.circuit.outputs()[j].id == w) got.push_back((*out)[j]);
        }
      }
      REQUIRE(got.size() == want.size());
      for (std::size_t j = 0; j < want.size(); ++j) CHECK(got[j] == static_cast<int>(want[j]));
    }
  }
}

TEST_CASE("bennett examples") {
  SUBCASE("identity on one bit") {
    const Circuit c = bennett_wrap(synth_landauer(parse_bterm("x"), {"x"}));
    REQUIRE(c.inputs().size() == 2);
    for (int x = 0; x < 2; ++x) {
      for (int y = 0; y < 2; ++y) {
        CHECK(*simulate_classical(c, {x, y}) == std::vector<int>{x, y ^ x});
      }
    }
  }
  SUBCASE("constant ff") {
    const Circuit c = bennett_wrap(synth_landauer(parse_bterm("ff"), {"x"}));
    const std::size_t w = c.inputs().size();
    for (std::uint64_t b = 0; b < (std::uint64_t{1} << w); ++b) {
      std::vector<int> in(w, 0);
      in[0] = static_cast<int>(b & 1U);
      in[w - 1] = static_cast<int>((b >> 1) & 1U);
      CHECK(*simulate_classical(c, in) == in);
    }
  }
  SUBCASE("not through a higher-order argument gives or") {
    const Circuit c = bennett_wrap(synth_landauer(parse_bterm("(\\f. f (and (f x) (f y))) not"), {"x", "y"}));
    const std::size_t w = c.inputs().size();
    for (int x = 0; x < 2; ++x) {
      for (int y = 0; y < 2; ++y) {
        for (int t = 0; t < 2; ++t) {
          std::vector<int> in(w, 0);
          in[0] = x;
          in[1] = y;
          in[w - 1] = t;
          std::vector<int> want = in;
          want[w - 1] = t ^ (x | y);
          CHECK(*simulate_classical(c, in) == want);
        }
      }
    }
  }
}

TEST_CASE("verify_oracle") {
  SUBCASE("and oracle") {
    const BTerm t = parse_bterm("and x y");
    const Circuit c({{0, circuit::WireKind::kQbit}, {1, circuit::WireKind::kQbit}, {2, circuit::WireKind::kQbit}},
                    {circuit::GateOp{"TOFFOLI", {}, {}, {0, 1, 2}, false}},
                    {{0, circuit::WireKind::kQbit}, {1, circuit::WireKind::kQbit}, {2, circuit::WireKind::kQbit}});
    CHECK(verify_oracle(c, t, {"x", "y"}).ok);
  }
  SUBCASE("identity is not the not oracle") {
    const VerifyResult r = verify_oracle(Circuit::identity(2), parse_bterm("not x"), {"x"});
    CHECK_FALSE(r.ok);
    REQUIRE(r.counterexample.has_value());
    CHECK(r.counterexample->x == std::vector<int>{0});
    CHECK(r.counterexample->y == std::vector<int>{0});
    CHECK(r.counterexample->got == std::vector<int>{0, 0});
    CHECK(r.counterexample->expected == std::vector<int>{0, 1});
  }
  SUBCASE("non-classical gates go through the simulator") {
    Circuit c = Circuit::identity(2);
    c.gate("H", {1});
    c.gate("Z", {1}, {}, {{0, qnum::Polarity::kPositive}});
    c.gate("H", {1});
    CHECK(verify_oracle(c, parse_bterm("x"), {"x"}).ok);
    CHECK_FALSE(verify_oracle(c, parse_bterm("not x"), {"x"}).ok);
  }
  SUBCASE("width mismatch") {
    CHECK_THROWS_AS(verify_oracle(Circuit::identity(1), parse_bterm("x"), {"x"}), OracleError);
  }
}

TEST_CASE("corpus round trip") {
  CHECK(oracle_corpus().size() == 30);
  for (const auto& c : oracle_corpus()) {
    CAPTURE(std::string(c.name));
    REQUIRE(c.inputs.size() <= 8);
    const BTerm t = parse_bterm(c.src);
    const Landauer l = synth_landauer(t, c.inputs);
    const Circuit w = bennett_wrap(l);
    CHECK(w.is_pure());
    const VerifyResult r = verify_oracle(w, t, c.inputs);
    CHECK(r.ok);

    // Size stays linear in the number of residual operators.
    const auto gc = circuit::gate_count(l.circuit);
    const std::uint64_t ops = operator_count(t, c.inputs);
    CHECK(static_cast<std::uint64_t>(gc.gates) <= 4 * std::max<std::uint64_t>(ops, 1));
  }
}

TEST_CASE("wrapped circuits are bijections") {
  for (const auto& c : oracle_corpus()) {
    const Circuit w = bennett_wrap(synth_landauer(parse_bterm(c.src), c.inputs));
    const std::size_t width = w.inputs().size();
    if (width > 12) continue;
    CAPTURE(std::string(c.name));
    std::set<std::vector<int>> seen;
    for (std::uint64_t b = 0; b < (std::uint64_t{1} << width); ++b) {
      std::vector<int> in(width);
      for (std::size_t i = 0; i < width; ++i) in[i] = static_cast<int>((b >> (width - 1 - i)) & 1U);
      seen.insert(*simulate_classical(w, in));
    }
    CHECK(seen.size() == (std::size_t{1} << width));
  }
}

TEST_CASE("operator count") {
  CHECK(operator_count(parse_bterm("and x y"), {"x", "y"}) == 1);
  CHECK(operator_count(parse_bterm("(\\f. f (and (f x) (f y))) not"), {"x", "y"}) == 4);
  CHECK(operator_count(parse_bterm("x"), {"x"}) == 0);
  CHECK(operator_count(parse_bterm("if tt then not x else x"), {"x"}) == 1);
}

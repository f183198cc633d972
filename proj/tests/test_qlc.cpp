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


#include "qlang/qlc.hpp"

#include <doctest.h>

#include <cmath>

#include "qlc_corpus.hpp"
#include "test_util.hpp"

using namespace qlang;
using namespace qlang::qlc;

namespace {

std::string type_of(const std::string& src, const std::vector<std::string>& qubits = {}) {
  return to_string(typecheck(parse(src), qubits));
}

Program with_qubits(Term m, qnum::StateVector q, std::vector<std::string> names) {
  Program p = make_program(std::move(m));
  p.q = std::move(q);
  p.l = std::move(names);
  return p;
}

// Final register reordered so that wire i holds the i-th qubit of the result.
qnum::StateVector result_state(const Program& p) {
  std::vector<std::string> outs;
  std::function<void(const Term&)> walk = [&](const Term& t) {
    if (const auto* pr = std::get_if<Pair>(&t->v)) {
      walk(pr->first);
      walk(pr->second);
    } else if (const auto* v = std::get_if<Var>(&t->v)) {
      outs.push_back(v->name);
    }
  };
  walk(p.m);
  REQUIRE(outs.size() == p.l.size());
  std::vector<int> order;
  for (const auto& o : outs) {
    order.push_back(static_cast<int>(std::find(p.l.begin(), p.l.end(), o) - p.l.begin()));
  }
  return qnum::permute_wires(p.q, order);
}

}  // namespace

TEST_CASE("parser") {
  CHECK(to_string(parse("fun x -> x")) == "fun x -> x");
  CHECK(to_string(parse("\\x y. x")) == "fun x -> fun y -> x");
  const Term coin = parse("meas (H (qinit ff))");
  CHECK(to_string(coin) == "meas (H (qinit ff))");
  CHECK(term_size(coin) == 7);
  CHECK(to_string(parse("fun x -> let () = x in H (qinit ff)")) == "fun x -> let () = x in H (qinit ff)");
  CHECK(to_string(parse("let <a, b> = (p, q) in <b, a>")) == "let <a, b> = <p, q> in <b, a>");
  CHECK(to_string(parse("<a, b, c>")) == "<a, <b, c>>");
  CHECK(to_string(parse("let f x = H x in f")) == "(fun f -> f) (fun x -> H x)");
  CHECK(to_string(parse("let rec f x = f x in f")) == "letrec f x = f x in f");
  CHECK(to_string(parse("f a b")) == "f a b");
  CHECK(to_string(parse("f (a b)")) == "f (a b)");
  CHECK_THROWS_AS(parse("fun -> x"), SyntaxError);
  CHECK_THROWS_AS(parse("let H = tt in H"), SyntaxError);
  CHECK_THROWS_AS(parse("<a>"), SyntaxError);
  try {
    parse("if tt\nthen ff\nels tt");
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("type syntax") {
  for (const char* s : {"qbit", "bit * qbit", "qbit -o qbit", "!(1 -o qbit)", "(qbit -o bit) -o bit",
                        "circ(qbit * qbit, qbit * qbit)", "qbit * qbit * bit", "(qbit * qbit) * bit"}) {
    CHECK(to_string(*parse_type(s)) == s);
  }
  CHECK(to_string(*parse_type("qbit ⊗ qbit ⊸ bit")) == "qbit * qbit -o bit");
  CHECK_THROWS_AS(parse_type("!qbit"), SyntaxError);
  CHECK(qubit_count(*parse_type("qbit * (1 * qbit)")) == 2);
  CHECK(qubit_count(*parse_type("qbit * bit")) == -1);
}

TEST_CASE("typing") {
  CHECK(type_of("meas (H (qinit ff))") == "bit");
  CHECK(type_of("fun x -> H x") == "qbit -o qbit");
  CHECK(type_of("fun x -> let () = x in H (qinit ff)") == "1 -o qbit");
  CHECK(type_of("CNOT <x, y>", {"x", "y"}) == "qbit * qbit");
  CHECK(type_of("box (fun x -> H x)") == "circ(qbit, qbit)");
  CHECK(type_of("unbox (box (fun x -> H x))") == "!(qbit -o qbit)");
  CHECK(type_of("letrec f x = if x then ff else f tt in f tt") == "bit");
  CHECK(type_of("fun f -> <f (), f ()>") == "!(1 -o 'a) -o 'a * 'a");
  // A function value may be duplicated.
  CHECK(type_of("let g = fun u -> let () = u in qinit ff in <g (), g ()>") == "qbit * qbit");
  // A boxed circuit can be used twice.
  CHECK(type_of("let g = unbox (box (fun q -> H q)) in <g x, g y>", {"x", "y"}) == "qbit * qbit");
}

TEST_CASE("promotable thunk") {
  const Term t = parse("fun x -> let () = x in H (qinit ff)");
  CHECK(to_string(typecheck(t, {}, parse_type("!(1 -o qbit)"))) == "!(1 -o qbit)");
  CHECK(to_string(typecheck(t, {}, parse_type("1 -o qbit"))) == "1 -o qbit");
  // The same thunk capturing a qubit cannot be promoted.
  const Term capt = parse("fun u -> let () = u in H q");
  CHECK(to_string(typecheck(capt, {"q"})) == "1 -o qbit");
  CHECK_THROWS_AS(typecheck(capt, {"q"}, parse_type("!(1 -o qbit)")), TypeError);
}

TEST_CASE("negative corpus") {
  for (const auto& c : testing::qlc_negative_corpus()) {
    CAPTURE(std::string(c.src));
    CHECK_THROWS_AS(typecheck(parse(c.src), c.qubits), TypeError);
  }
  CHECK(testing::qlc_negative_corpus().size() >= 21);
  // Using x in both branches is fine.
  CHECK(type_of("fun x -> if x then qinit tt else qinit ff") == "bit -o qbit");
}

TEST_CASE("machine steps") {
  RandomSource rng(1);
  SUBCASE("qinit") {
    Program p = make_program(parse("qinit tt"));
    const StepResult r = step(p, rng);
    CHECK(r.rule == "qinit");
    CHECK(r.probability == 1.0);
    CHECK(p.l == std::vector<std::string>{"q0"});
    CHECK(to_string(p.m) == "q0");
    CHECK(std::abs(p.q[1] - 1.0) < 1e-15);
  }
  SUBCASE("if") {
    Program p = make_program(parse("if tt then H (qinit ff) else qinit tt"));
    CHECK(step(p, rng).rule == "if-tt");
    CHECK(to_string(p.m) == "H (qinit ff)");
  }
  SUBCASE("meas") {
    const double s = 1 / std::sqrt(2.0);
    qnum::Vector plus(2);
    plus << s, s;
    int ones = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      RandomSource r(seed);
      Program p = with_qubits(parse("meas x"), qnum::StateVector(plus), {"x"});
      const StepResult res = step(p, r);
      CHECK(res.rule == "meas");
      CHECK(std::abs(res.probability - 0.5) < 1e-12);
      CHECK(p.l.empty());
      CHECK(p.q.n_qubits() == 0);
      ones += to_string(p.m) == "tt";
    }
    CHECK(ones > 0);
    CHECK(ones < 200);
  }
  SUBCASE("values do not step") {
    Program p = make_program(parse("fun x -> x"));
    CHECK_THROWS_AS(step(p, rng), Error);
  }
  SUBCASE("arguments before functions") {
    Program p = make_program(parse("(if tt then fun x -> x else fun x -> x) (if ff then tt else ff)"));
    step(p, rng);
    CHECK(to_string(p.m) == "(if tt then fun x -> x else fun x -> x) ff");
  }
  SUBCASE("capture avoiding substitution") {
    Program p = with_qubits(parse("(fun y -> fun x -> <x, y>) x"), qnum::StateVector(1), {"x"});
    step(p, rng);
    CHECK(to_string(p.m) == "fun x'1 -> <x'1, x>");
  }
}

TEST_CASE("eval") {
  RandomSource rng(3);
  SUBCASE("value") {
    const EvalResult r = eval(make_program(parse("<tt, ff>")), rng);
    CHECK(r.trace.empty());
    CHECK(r.probability == 1.0);
  }
  SUBCASE("letrec") {
    const EvalResult r = eval(make_program(parse("letrec f x = if x then ff else f tt in f ff")), rng);
    CHECK(to_string(r.program.m) == "ff");
    int betas = 0;
    for (const auto& e : r.trace) betas += e.rule == "beta";
    CHECK(betas == 2);
  }
  SUBCASE("divergence runs out of fuel") {
    CHECK_THROWS_AS(eval(make_program(parse("letrec f x = f x in f tt")), rng, 500), EvalError);
  }
  SUBCASE("coin") {
    const Term coin = parse("meas (H (qinit ff))");
    const int runs = 10000;
    int heads = 0;
    for (int i = 0; i < runs; ++i) {
      RandomSource r = rng.split(static_cast<std::uint64_t>(i));
      const EvalResult res = eval(make_program(coin), r);
      CHECK(std::abs(res.probability - 0.5) < 1e-12);
      heads += to_string(res.program.m) == "tt";
    }
    const double sigma = std::sqrt(0.25 / runs);
    CHECK(std::abs(heads / double(runs) - 0.5) <= 3 * sigma);
  }
  SUBCASE("bell pair measurements agree") {
    const Term t = parse("let <a, b> = CNOT <H (qinit ff), qinit ff> in <meas a, meas b>");
    typecheck(t);
    for (std::uint64_t s = 0; s < 50; ++s) {
      RandomSource r(s);
      const EvalResult res = eval(make_program(t), r);
      const auto bits = bits_of(res.program.m);
      REQUIRE(bits.has_value());
      CHECK((*bits)[0] == (*bits)[1]);
      CHECK(std::abs(res.probability - 0.5) < 1e-12);
    }
  }
  SUBCASE("trace is reproducible") {
    const Term t = parse("let <a, b> = CNOT <H (qinit ff), H (qinit ff)> in <meas a, meas b>");
    std::string first, second;
    for (std::string* out : {&first, &second}) {
      RandomSource r(77);
      for (const auto& e : eval(make_program(t), r).trace) *out += format_trace(e) + "\n";
    }
    CHECK(first == second);
    CHECK(first.rfind("qinit p=1 size=", 0) == 0);
  }
}

TEST_CASE("box") {
  SUBCASE("single gate") {
    const Boxed b = box(parse("fun x -> H x"));
    REQUIRE(b.circuit.ops().size() == 1);
    CHECK(std::get<circuit::GateOp>(b.circuit.ops()[0]).name == "H");
    CHECK(qnum::phase_distance(circuit::to_unitary(b.circuit), qnum::gate_matrix("H")) < 1e-12);
  }
  SUBCASE("let pair then gates") {
    const Boxed b = box(parse("fun w -> let <x, y> = w in CNOT <x, H y>"));
    REQUIRE(b.circuit.ops().size() == 2);
    const auto& g0 = std::get<circuit::GateOp>(b.circuit.ops()[0]);
    const auto& g1 = std::get<circuit::GateOp>(b.circuit.ops()[1]);
    CHECK(g0.name == "H");
    CHECK(g0.targets == std::vector<circuit::WireId>{1});
    CHECK(g1.name == "CNOT");
    CHECK(g1.targets == std::vector<circuit::WireId>{0, 1});
    const qnum::Matrix want =
        qnum::gate_matrix("CNOT") * qnum::kron(qnum::Matrix::Identity(2, 2), qnum::gate_matrix("H"));
    CHECK((circuit::to_unitary(b.circuit) - want).norm() < 1e-12);
  }
  SUBCASE("ancillas") {
    const Boxed b = box(parse("fun x -> CNOT <x, qinit ff>"));
    CHECK(b.circuit.inputs().size() == 1);
    CHECK(b.circuit.outputs().size() == 2);
  }
  SUBCASE("meas is rejected") {
    CHECK_THROWS_WITH_AS(box(parse("fun x -> qinit (meas x)")), doctest::Contains("dynamic lifting"), EvalError);
  }
  SUBCASE("non-qubit interface") {
    CHECK_THROWS_AS(box(parse("fun x -> if x then tt else ff")), EvalError);
  }
  SUBCASE("box inside a program") {
    RandomSource rng(5);
    const Term t = parse("box (fun w -> let <x, y> = w in CNOT <x, H y>)");
    typecheck(t);
    const EvalResult r = eval(make_program(t), rng);
    CHECK(std::holds_alternative<CircLit>(r.program.m->v));
  }
}

TEST_CASE("unbox replays the circuit") {
  RandomSource rng(11);
  const char* fns[] = {
      "fun x -> H x",
      "fun x -> T (S (H x))",
      "fun w -> let <x, y> = w in CNOT <x, H y>",
      "fun w -> let <x, y> = w in SWAP (CNOT <H x, y>)",
      "fun w -> let <x, r> = w in let <y, z> = r in TOFFOLI <H x, <y, X z>>",
  };
  for (const char* src : fns) {
    CAPTURE(std::string(src));
    const Term f = parse(src);
    const Boxed b = box(f);
    const int n = static_cast<int>(b.circuit.inputs().size());
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back("x" + std::to_string(i));
    Term arg = var(names.back());
    for (int i = n - 1; i-- > 0;) arg = pair(var(names[i]), arg);
    for (std::uint64_t basis = 0; basis < (std::uint64_t{1} << n); ++basis) {
      const qnum::StateVector in = qnum::StateVector::basis(n, basis);
      const EvalResult direct = eval(with_qubits(app(f, arg), in, names), rng);
      const EvalResult boxed = eval(with_qubits(app(unbox(b), arg), in, names), rng);
      const auto a = result_state(direct.program);
      const auto c = result_state(boxed.program);
      CHECK(qnum::phase_distance(a.amps(), c.amps()) < 1e-9);
      // The circuit semantics agrees too.
      const qnum::Vector via_circuit = circuit::to_unitary(b.circuit).col(static_cast<Eigen::Index>(basis));
      CHECK(qnum::phase_distance(a.amps(), via_circuit) < 1e-9);
    }
  }
  SUBCASE("unbox(box f) on qinit ff gives |+>") {
    const Term t = parse("unbox (box (fun x -> H x)) (qinit ff)");
    typecheck(t);
    const EvalResult r = eval(make_program(t), rng);
    REQUIRE(r.program.q.n_qubits() == 1);
    CHECK(std::abs(r.program.q[0] - 1 / std::sqrt(2.0)) < 1e-12);
    CHECK(std::abs(r.program.q[1] - 1 / std::sqrt(2.0)) < 1e-12);
  }
  SUBCASE("empty circuit is the identity") {
    Boxed id;
    id.circuit = circuit::Circuit::identity(1);
    id.in = QType::qbit();
    id.out = QType::qbit();
    qnum::StateVector s = test::random_state(1, rng);
    const EvalResult r = eval(with_qubits(app(unbox(id), var("x")), s, {"x"}), rng);
    CHECK(to_string(r.program.m) == "x");
    CHECK(qnum::phase_distance(r.program.q.amps(), s.amps()) < 1e-15);
  }
  SUBCASE("interface mismatch") {
    const Boxed b = box(parse("fun w -> let <x, y> = w in CNOT <x, y>"));
    CHECK_THROWS_AS(eval(with_qubits(app(unbox(b), var("x")), qnum::StateVector(1), {"x"}), rng), EvalError);
  }
}

TEST_CASE("generated programs: subject reduction and progress") {
  RandomSource rng(2024);
  const int programs = 10000;
  std::size_t total_steps = 0;
  for (int i = 0; i < programs; ++i) {
    RandomSource r = rng.split(static_cast<std::uint64_t>(i));
    GenOptions opt;
    opt.depth = 1 + static_cast<int>(r.below(4));
    opt.free_qubits = static_cast<int>(r.below(3));
    const Term t = generate(r, opt);
    std::vector<std::string> names;
    for (int k = 0; k < opt.free_qubits; ++k) names.push_back("x" + std::to_string(k));
    std::string want;
    try {
      want = to_string(typecheck(t, names));
    } catch (const TypeError& e) {
      FAIL_CHECK("generated term does not typecheck: " << to_string(t) << ": " << e.what());
      continue;
    }
    Program p = with_qubits(t, test::random_state(opt.free_qubits, r), names);
    for (int s = 0; s < 10000 && !is_value(p.m); ++s) {
      step(p, r);
      ++total_steps;
      const std::string got = to_string(typecheck(p.m, p.l));
      if (got != want) {
        FAIL_CHECK("type changed from " << want << " to " << got << " at " << to_string(p.m));
        break;
      }
      if (static_cast<int>(p.l.size()) != p.q.n_qubits()) FAIL_CHECK("L and Q disagree");
    }
    CHECK(is_value(p.m));
  }
  MESSAGE("steps checked: " << total_steps);
}

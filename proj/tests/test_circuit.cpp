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

#include "qlang/circuit.hpp"

#include <doctest.h>

#include <cmath>

#include "test_util.hpp"

using namespace qlang;
using namespace qlang::circuit;
using qnum::Complex;
using qnum::Matrix;
using test::embed;

namespace {

const std::vector<std::string> kAllGates = {"H", "X", "Z", "S", "T", "RX", "RY",
                                            "RZ", "CNOT", "SWAP", "TOFFOLI", "MS"};

Circuit one_gate(const std::string& name, int n, std::vector<int> targets,
                 std::vector<double> params = {}) {
  Circuit c = Circuit::identity(n);
  c.gate(name, std::move(targets), std::move(params));
  return c;
}

double dist(const Matrix& a, const Matrix& b) { return (a - b).norm(); }

Matrix block_diag(const Matrix& a, const Matrix& b) {
  Matrix m = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  m.topLeftCorner(a.rows(), a.cols()) = a;
  m.bottomRightCorner(b.rows(), b.cols()) = b;
  return m;
}

}  // namespace

TEST_CASE("seq composes and renames") {
  const Circuit h = one_gate("H", 1, {0});
  const Circuit hh = seq(h, h);
  CHECK(hh.ops().size() == 2);
  CHECK(dist(to_unitary(hh), Matrix::Identity(2, 2)) < 1e-12);
  CHECK(seq(Circuit::identity(1), h) == h);

  const Circuit x5({{5, WireKind::kQbit}}, {GateOp{"X", {}, {}, {5}, false}}, {{5, WireKind::kQbit}});
  const Circuit c = seq(h, x5);
  CHECK(c.inputs() == h.inputs());
  CHECK(std::get<GateOp>(c.ops()[1]).targets == std::vector<int>{0});

  CHECK_THROWS_AS(seq(h, Circuit::identity(2)), CircuitError);
  Circuit m = Circuit::identity(1);
  m.measure(0);
  CHECK_THROWS_AS(seq(m, h), CircuitError);
}

TEST_CASE("seq adds gate counts") {
  RandomSource rng(7);
  for (int t = 0; t < 20; ++t) {
    const Circuit a = test::random_circuit(3, 10, rng, kAllGates);
    const Circuit b = test::random_circuit(3, 7, rng, kAllGates);
    const GateCount ab = gate_count(seq(a, b));
    const GateCount ca = gate_count(a), cb = gate_count(b);
    CHECK(ab.gates == ca.gates + cb.gates);
    CHECK(ab.cnots == ca.cnots + cb.cnots);
    for (const auto& [name, k] : ab.per_gate) {
      const int want = (ca.per_gate.count(name) ? ca.per_gate.at(name) : 0) +
                       (cb.per_gate.count(name) ? cb.per_gate.at(name) : 0);
      CHECK(k == want);
    }
  }
}

TEST_CASE("derived combinator composes") {
  const Circuit v = one_gate("H", 1, {0});
  const Circuit u = one_gate("T", 1, {0});
  // Pass the control wire straight through V on the left.
  const Circuit vv = par(Circuit::identity(1), v);
  const Circuit c = seq(inverse(vv), seq(control(u), vv));
  const GateCount n = gate_count(c);
  CHECK(n.per_gate.at("H") == 2);
  CHECK(n.per_gate.at("T") == 1);
  CHECK(n.gates == 3);

  const Matrix h = qnum::gate_matrix("H");
  const Matrix t = qnum::gate_matrix("T");
  const Matrix ih = qnum::kron(Matrix::Identity(2, 2), h);
  const Matrix want = ih * block_diag(Matrix::Identity(2, 2), t) * ih;
  CHECK(dist(to_unitary(c), want) < 1e-12);
}

TEST_CASE("par is the tensor product") {
  CHECK(par(Circuit(), Circuit()) == Circuit());
  const Matrix hi = to_unitary(par(one_gate("H", 1, {0}), Circuit::identity(1)));
  CHECK(dist(hi, qnum::kron(qnum::gate_matrix("H"), Matrix::Identity(2, 2))) < 1e-12);

  RandomSource rng(1);
  const Circuit xx = par(one_gate("X", 1, {0}), one_gate("X", 1, {0}));
  const RunResult r = run(xx, qnum::StateVector(2), rng);
  CHECK(std::abs(r.state[3] - Complex(1, 0)) < 1e-12);

  for (int t = 0; t < 20; ++t) {
    const Circuit a = test::random_circuit(2, 8, rng, kAllGates);
    const Circuit b = test::random_circuit(3, 8, rng, kAllGates);
    CHECK(dist(to_unitary(par(a, b)), qnum::kron(to_unitary(a), to_unitary(b))) < 1e-10);
  }
}

TEST_CASE("inverse") {
  const Circuit h = one_gate("H", 1, {0});
  CHECK(inverse(h) == h);

  const Matrix tdg = to_unitary(inverse(one_gate("T", 1, {0})));
  Matrix want = Matrix::Identity(2, 2);
  want(1, 1) = std::polar(1.0, -qnum::kPi / 4);
  CHECK(dist(tdg, want) < 1e-12);
  CHECK(gate_count(inverse(one_gate("S", 1, {0}))).per_gate.at("Sdg") == 1);

  RandomSource rng(2);
  for (int t = 0; t < 50; ++t) {
    const int n = 1 + static_cast<int>(rng.below(5));
    const Circuit c = test::random_circuit(n, 1 + static_cast<int>(rng.below(40)), rng, kAllGates);
    CHECK(inverse(inverse(c)) == c);
    const Matrix u = to_unitary(c);
    CHECK(dist(to_unitary(inverse(c)), u.adjoint()) < 1e-9);
    CHECK(dist(to_unitary(seq(c, inverse(c))), Matrix::Identity(u.rows(), u.cols())) < 1e-9);
  }

  Circuit m = Circuit::identity(1);
  m.gate("H", {0});
  m.measure(0);
  try {
    (void)inverse(m);
    FAIL("expected an error");
  } catch (const CircuitError& e) {
    CHECK(std::string(e.what()).find("measure") != std::string::npos);
  }
  Circuit i = Circuit::identity(1);
  i.init(0);
  CHECK_THROWS_AS(inverse(i), CircuitError);
}

TEST_CASE("control") {
  const Circuit cx = control(one_gate("X", 1, {0}));
  CHECK(dist(to_unitary(cx), qnum::gate_matrix("CNOT")) < 1e-12);
  CHECK(gate_count(cx).cnots == 1);

  const Circuit ce = control(Circuit());
  CHECK(ce.inputs().size() == 1);
  CHECK(dist(to_unitary(ce), Matrix::Identity(2, 2)) < 1e-12);

  const Matrix ch = to_unitary(control(one_gate("H", 1, {0})));
  CHECK(dist(ch, block_diag(Matrix::Identity(2, 2), qnum::gate_matrix("H"))) < 1e-12);
  const Matrix nch = to_unitary(control(one_gate("H", 1, {0}), qnum::Polarity::kNegative));
  CHECK(dist(nch, block_diag(qnum::gate_matrix("H"), Matrix::Identity(2, 2))) < 1e-12);

  RandomSource rng(3);
  for (int t = 0; t < 30; ++t) {
    const int n = 1 + static_cast<int>(rng.below(4));
    const Circuit a = test::random_circuit(n, 12, rng, kAllGates);
    const Circuit b = test::random_circuit(n, 12, rng, kAllGates);
    const Matrix lhs = to_unitary(control(seq(a, b)));
    CHECK(dist(lhs, to_unitary(seq(control(a), control(b)))) < 1e-9);
    const Matrix u = to_unitary(a);
    CHECK(dist(to_unitary(control(a)), block_diag(Matrix::Identity(u.rows(), u.cols()), u)) < 1e-9);
  }
  Circuit m = Circuit::identity(1);
  m.measure(0);
  CHECK_THROWS_AS(control(m), CircuitError);
}

TEST_CASE("gate counts") {
  CHECK(gate_count(Circuit()) == GateCount{});
  Circuit c = Circuit::identity(2);
  const WireId a = c.init(0);
  c.gate("TOFFOLI", {0, 1, a});
  c.gate("X", {a}, {}, {{0, qnum::Polarity::kNegative}});
  c.gate("CNOT", {1, a});
  c.measure(a);
  c.discard(0);
  const GateCount n = gate_count(c);
  CHECK(n.gates == 3);
  CHECK(n.inits == 1);
  CHECK(n.measures == 1);
  CHECK(n.discards == 1);
  CHECK(n.qubits == 3);
  CHECK(n.cnots == 2);
}

TEST_CASE("to_unitary") {
  CHECK(dist(to_unitary(Circuit::identity(3)), Matrix::Identity(8, 8)) < 1e-15);
  Circuit bell = Circuit::identity(2);
  bell.gate("H", {0}).gate("CNOT", {0, 1});
  const qnum::Vector out = to_unitary(bell).col(0);
  CHECK(std::abs(out[0] - Complex(M_SQRT1_2, 0)) < 1e-12);
  CHECK(std::abs(out[3] - Complex(M_SQRT1_2, 0)) < 1e-12);
  CHECK(std::abs(out[1]) + std::abs(out[2]) < 1e-12);

  Matrix swap = Matrix::Zero(4, 4);
  swap(0, 0) = swap(1, 2) = swap(2, 1) = swap(3, 3) = 1;
  CHECK(dist(to_unitary(one_gate("SWAP", 2, {0, 1})), swap) < 1e-15);

  // Relabelled outputs act as a wire permutation.
  const Circuit perm({{0, WireKind::kQbit}, {1, WireKind::kQbit}}, {},
                     {{1, WireKind::kQbit}, {0, WireKind::kQbit}});
  CHECK(dist(to_unitary(perm), swap) < 1e-15);

  RandomSource rng(4);
  for (int t = 0; t < 20; ++t) {
    const int n = 1 + static_cast<int>(rng.below(4));
    const Circuit c = test::random_circuit(n, 15, rng, kAllGates);
    Matrix want = Matrix::Identity(Eigen::Index{1} << n, Eigen::Index{1} << n);
    for (const auto& op : c.ops()) {
      const auto& g = std::get<GateOp>(op);
      std::vector<int> wires;
      std::vector<qnum::Polarity> pols;
      for (const auto& ctl : g.controls) {
        wires.push_back(ctl.wire);
        pols.push_back(ctl.polarity);
      }
      wires.insert(wires.end(), g.targets.begin(), g.targets.end());
      Matrix m = gate_op_matrix(g);
      for (auto it = pols.rbegin(); it != pols.rend(); ++it) m = qnum::controlled(m, *it);
      want = embed(m, std::span<const int>(wires), n) * want;
    }
    CHECK(dist(to_unitary(c), want) < 1e-10);
  }
}

TEST_CASE("run matches to_unitary on basis inputs") {
  RandomSource rng(5);
  for (int t = 0; t < 20; ++t) {
    const int n = 1 + static_cast<int>(rng.below(4));
    const Circuit c = test::random_circuit(n, 20, rng, kAllGates);
    const Matrix u = to_unitary(c);
    for (std::uint64_t b = 0; b < (std::uint64_t{1} << n); ++b) {
      const RunResult r = run(c, qnum::StateVector::basis(n, b), rng);
      CHECK(r.record.empty());
      CHECK((r.state.amps() - u.col(static_cast<Eigen::Index>(b))).norm() < 1e-9);
    }
  }
  const qnum::StateVector s = test::random_state(3, rng);
  const RunResult r = run(Circuit::identity(3), s, rng);
  CHECK((r.state.amps() - s.amps()).norm() == 0.0);
}

TEST_CASE("coin flip frequency") {
  Circuit c;
  const WireId q = c.init(0);
  c.gate("H", {q});
  c.measure(q);
  CHECK(c.outputs().size() == 1);
  CHECK(c.outputs()[0].kind == WireKind::kBit);
  RandomSource rng(2026);
  const int shots = 10000;
  int ones = 0;
  for (int s = 0; s < shots; ++s) {
    RandomSource shot = rng.split(static_cast<std::uint64_t>(s));
    const RunResult r = run(c, qnum::StateVector(0), shot);
    REQUIRE(r.record.size() == 1);
    REQUIRE(r.bits == r.record);
    ones += r.record[0];
  }
  const double sigma = std::sqrt(0.25 / shots);
  CHECK(std::abs(ones / double(shots) - 0.5) < 3 * sigma);
}

TEST_CASE("measurement frequencies follow the unitary") {
  RandomSource rng(6);
  const Circuit prep = test::random_circuit(2, 10, rng, kAllGates);
  const Matrix u = to_unitary(prep);
  const double p1 = std::norm(u(2, 0)) + std::norm(u(3, 0));
  Circuit c = prep;
  c.measure(0);
  const int shots = 10000;
  int ones = 0;
  for (int s = 0; s < shots; ++s) {
    RandomSource shot = rng.split(static_cast<std::uint64_t>(s));
    ones += run(c, qnum::StateVector(2), shot).record[0];
  }
  const double sigma = std::sqrt(p1 * (1 - p1) / shots);
  CHECK(std::abs(ones / double(shots) - p1) <= 3 * sigma + 1e-12);
}

TEST_CASE("circuit with classical control") {
  Circuit c = Circuit::identity(2);
  const WireId a = c.init(0);
  c.gate("H", {0});
  c.gate("X", {a}, {}, {{0, qnum::Polarity::kPositive}});
  c.gate("H", {1}, {}, {{a, qnum::Polarity::kNegative}});
  const WireId b = c.measure(0);
  c.gate("X", {1}, {}, {{b, qnum::Polarity::kPositive}});
  c.discard(b);
  RandomSource rng(8);
  for (int s = 0; s < 50; ++s) {
    RandomSource shot = rng.split(static_cast<std::uint64_t>(s));
    const RunResult r = run(c, qnum::StateVector(2), shot);
    REQUIRE(r.record.size() == 1);
    // Wire a copies the measured bit; wire 1 flips classically on outcome 1.
    CHECK(r.state.n_qubits() == 2);
    const int bit = r.record[0];
    const std::uint64_t idx = bit ? 0b11 : 0b00;
    if (bit) {
      CHECK(std::abs(std::abs(r.state[idx]) - 1) < 1e-12);
    } else {
      CHECK(std::abs(r.state[0]) == doctest::Approx(M_SQRT1_2));
      CHECK(std::abs(r.state[0b10]) == doctest::Approx(M_SQRT1_2));
    }
  }
}

TEST_CASE("unsafe discard is reported") {
  Circuit c = Circuit::identity(1);
  c.gate("H", {0});
  c.discard(0);
  RandomSource rng(9);
  CHECK_THROWS_AS(run(c, qnum::StateVector(1), rng), CircuitError);
  Circuit ok = Circuit::identity(1);
  ok.gate("X", {0});
  ok.discard(0);
  CHECK(run(ok, qnum::StateVector(1), rng).state.n_qubits() == 0);
}

TEST_CASE("validation") {
  Circuit c = Circuit::identity(2);
  CHECK_THROWS_AS(c.gate("CNOT", {0, 0}), CircuitError);
  CHECK_THROWS_AS(c.gate("H", {3}), CircuitError);
  CHECK_THROWS_AS(c.gate("H", {0}, {}, {{0, qnum::Polarity::kPositive}}), CircuitError);
  CHECK_THROWS_AS(c.gate("RX", {0}), CircuitError);
  CHECK_THROWS_AS(c.gate("FOO", {0}), CircuitError);
  const WireId b = c.measure(1);
  CHECK_THROWS_AS(c.gate("H", {1}), CircuitError);
  CHECK_THROWS_AS(c.gate("H", {b}), CircuitError);
  const std::vector<Wire> in{{0, WireKind::kQbit}};
  CHECK_THROWS_AS(Circuit(in, {}, {}), CircuitError);
  CHECK_THROWS_AS(Circuit(in, {DiscardOp{0}}, in), CircuitError);
}

TEST_CASE("JSON round trip") {
  Circuit c = Circuit::identity(2);
  c.gate("RZ", {0}, {0.25});
  const WireId a = c.init(1);
  c.gate("X", {a}, {}, {{1, qnum::Polarity::kNegative}});
  c.measure(a);
  const Circuit s = inverse(one_gate("S", 1, {0}));
  const auto j = to_json(c);
  CHECK(j.dump() ==
        R"({"inputs":[{"id":0,"kind":"qbit"},{"id":1,"kind":"qbit"}],"ops":[)"
        R"({"op":"gate","name":"RZ","params":[0.25],"controls":[],"targets":[0]},)"
        R"({"op":"init","wire":2,"value":1},)"
        R"({"op":"gate","name":"X","params":[],"controls":[[1,"neg"]],"targets":[2]},)"
        R"({"op":"measure","qwire":2,"bwire":3}],)"
        R"("outputs":[{"id":0,"kind":"qbit"},{"id":1,"kind":"qbit"},{"id":3,"kind":"bit"}]})");
  CHECK(from_json(nlohmann::json::parse(j.dump())) == c);
  CHECK(from_json(nlohmann::json::parse(to_json(s).dump())) == s);
  CHECK(to_json(s)["ops"][0]["name"] == "Sdg");

  RandomSource rng(10);
  for (int t = 0; t < 20; ++t) {
    const Circuit r = test::random_circuit(3, 20, rng, kAllGates);
    CHECK(from_json(nlohmann::json::parse(to_json(r).dump())) == r);
  }
  CHECK_THROWS_AS(from_json(nlohmann::json::parse(R"({"inputs":[]})")), CircuitError);
  CHECK_THROWS_AS(from_json(nlohmann::json::parse(
                      R"({"inputs":[],"ops":[{"op":"teleport"}],"outputs":[]})")),
                  CircuitError);
}

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
#include <vector>

#include "doctest.h"
#include "qlang/qnum.hpp"
#include "test_util.hpp"

using namespace qlang;
using namespace qlang::qnum;

TEST_CASE("gate_matrix returns the textbook matrices") {
  const double r = 1.0 / std::sqrt(2.0);
  Matrix h(2, 2);
  h << r, r, r, -r;
  CHECK((gate_matrix("H") - h).norm() < 1e-15);

  const double zero = 0.0;
  CHECK((gate_matrix("RZ", {&zero, 1}) - Matrix::Identity(2, 2)).norm() < 1e-15);

  Matrix cnot = Matrix::Zero(4, 4);
  cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1;
  CHECK((gate_matrix("CNOT") - cnot).norm() == 0.0);

  // |1x> -> |1 not x>, |0x> fixed.
  const Matrix c = gate_matrix("CNOT");
  CHECK(c(0, 0) == Complex(1));
  CHECK(c(3, 2) == Complex(1));

  CHECK_THROWS_AS(gate_matrix("FOO"), NumError);
  CHECK_THROWS_AS(gate_matrix("H", {&zero, 1}), NumError);
  CHECK_THROWS_AS(gate_matrix("RX"), NumError);
}

TEST_CASE("kron uses lexicographic order with the left operand high") {
  CHECK((kron(Matrix::Identity(2, 2), Matrix::Identity(2, 2)) - Matrix::Identity(4, 4)).norm() == 0);

  const StateVector s = kron(StateVector::basis(1, 0), StateVector::basis(1, 1));
  CHECK(s[1] == Complex(1));
  CHECK(s.amps().norm() == doctest::Approx(1.0));

  // Hand-written H (x) I.
  const double r = 1.0 / std::sqrt(2.0);
  Matrix hi = Matrix::Zero(4, 4);
  hi(0, 0) = r; hi(0, 2) = r; hi(1, 1) = r; hi(1, 3) = r;
  hi(2, 0) = r; hi(2, 2) = -r; hi(3, 1) = r; hi(3, 3) = -r;
  CHECK((kron(gate_matrix("H"), Matrix::Identity(2, 2)) - hi).norm() < 1e-15);
  const Vector out = hi * StateVector(2).amps();
  CHECK(std::abs(out[0] - r) < 1e-15);
  CHECK(std::abs(out[2] - r) < 1e-15);
}

TEST_CASE("kron is associative on layouts") {
  RandomSource rng(3);
  const Matrix a = test::random_unitary(2, rng), b = test::random_unitary(4, rng),
               c = test::random_unitary(2, rng);
  CHECK((kron(kron(a, b), c) - kron(a, kron(b, c))).norm() < 1e-14);
}

TEST_CASE("kron refuses to exceed the width limit") {
  set_max_qubits(3);
  CHECK_THROWS_AS(kron(StateVector(2), StateVector(2)), NumError);
  set_max_qubits(14);
}

TEST_CASE("controlled builds block matrices") {
  CHECK((controlled(gate_matrix("X")) - gate_matrix("CNOT")).norm() == 0);
  CHECK((controlled(Matrix::Identity(2, 2)) - Matrix::Identity(4, 4)).norm() == 0);
  Matrix neg = controlled(gate_matrix("X"), Polarity::kNegative);
  CHECK(neg(0, 1) == Complex(1));
  CHECK(neg(2, 2) == Complex(1));

  // Toffoli as C-CNOT on all 8 basis states: |xyz> -> |xy, z ^ (x & y)>.
  const Matrix toff = controlled(controlled(gate_matrix("X")));
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int z = 0; z < 2; ++z) {
        const int in = 4 * x + 2 * y + z;
        const int out = 4 * x + 2 * y + (z ^ (x & y));
        CHECK(toff(out, in) == Complex(1));
      }
  CHECK((toff - gate_matrix("TOFFOLI")).norm() == 0);

  Matrix bad = Matrix::Identity(2, 2) * 2.0;
  CHECK_THROWS_AS(controlled(bad), NumError);
}

TEST_CASE("controlled(U) * controlled(U^dagger) is the identity") {
  RandomSource rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int dim = 1 << (1 + static_cast<int>(rng.below(3)));
    const Matrix u = test::random_unitary(dim, rng);
    const Matrix prod = controlled(u) * controlled(u.adjoint());
    CHECK((prod - Matrix::Identity(2 * dim, 2 * dim)).norm() < 1e-9);
  }
}

TEST_CASE("apply embeds gates on arbitrary wires") {
  const double r = 1.0 / std::sqrt(2.0);
  const int w0[] = {0};
  const StateVector plus = apply(StateVector(2), gate_matrix("H"), w0);
  CHECK(std::abs(plus[0] - r) < 1e-15);
  CHECK(std::abs(plus[2] - r) < 1e-15);

  const int w01[] = {0, 1};
  const StateVector bell = apply(plus, gate_matrix("CNOT"), w01);
  CHECK(std::abs(bell[0] - r) < 1e-15);
  CHECK(std::abs(bell[3] - r) < 1e-15);
  CHECK(std::abs(bell[2]) < 1e-15);

  RandomSource rng(5);
  const StateVector s = test::random_state(3, rng);
  const int w1[] = {1};
  CHECK((apply(s, Matrix::Identity(2, 2), w1).amps() - s.amps()).norm() < 1e-15);

  const int dup[] = {1, 1};
  CHECK_THROWS_AS(apply(s, gate_matrix("CNOT"), dup), NumError);
  const int out_of_range[] = {3};
  CHECK_THROWS_AS(apply(s, gate_matrix("H"), out_of_range), NumError);
}

TEST_CASE("apply agrees with the permuted kron oracle and preserves norm") {
  RandomSource rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(3));
    const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(std::min(n, 3))));
    std::vector<int> wires(n);
    for (int i = 0; i < n; ++i) wires[i] = i;
    for (int i = n - 1; i > 0; --i) std::swap(wires[i], wires[rng.below(i + 1)]);
    std::vector<int> targets(wires.begin(), wires.begin() + k);
    const Matrix u = test::random_unitary(1 << k, rng);
    const StateVector s = test::random_state(n, rng);
    const StateVector got = apply(s, u, targets);
    const Vector want = test::embed(u, targets, n) * s.amps();
    CHECK((got.amps() - want).norm() < 1e-12);
    CHECK(std::abs(got.norm_squared() - 1.0) < 1e-9);
  }
}

TEST_CASE("measure follows the Born rule and collapses") {
  RandomSource rng(1);
  const Measurement m0 = measure(StateVector(1), 0, rng);
  CHECK(m0.bit == 0);
  CHECK(m0.probability == 1.0);

  const int w0[] = {0};
  const StateVector plus = apply(StateVector(1), gate_matrix("H"), w0);
  const Measurement mp = measure(plus, 0, rng);
  CHECK(mp.probability == doctest::Approx(0.5).epsilon(1e-12));

  const int w01[] = {0, 1};
  const StateVector bell =
      apply(apply(StateVector(2), gate_matrix("H"), w0), gate_matrix("CNOT"), w01);
  for (int i = 0; i < 20; ++i) {
    const Measurement mb = measure(bell, 0, rng);
    CHECK(mb.probability == doctest::Approx(0.5));
    const int both = mb.bit ? 3 : 0;
    CHECK(std::abs(std::abs(mb.state[both]) - 1.0) < 1e-12);
  }
}

TEST_CASE("never draws a zero-probability outcome") {
  RandomSource rng(9);
  for (int i = 0; i < 1000; ++i) {
    CHECK(measure(StateVector::basis(2, 2), 0, rng).bit == 1);
    CHECK(measure(StateVector::basis(2, 2), 1, rng).bit == 0);
  }
}

TEST_CASE("measurement probabilities form a distribution") {
  RandomSource rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(4));
    const StateVector s = test::random_state(n, rng);
    for (int w = 0; w < n; ++w) {
      const double p1 = probability_one(s, w);
      double p0 = 0;
      for (Eigen::Index i = 0; i < s.dim(); ++i) {
        if (!((i >> (n - 1 - w)) & 1)) p0 += std::norm(s[i]);
      }
      CHECK(std::abs(p0 + p1 - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("discard removes classical wires only") {
  const StateVector s = StateVector::basis(3, 0b101);
  const StateVector d = discard(s, 1);
  CHECK(d.n_qubits() == 2);
  CHECK(std::abs(d[0b11] - 1.0) < 1e-15);
  const int w0[] = {0};
  const StateVector plus = apply(StateVector(2), gate_matrix("H"), w0);
  CHECK_THROWS_AS(discard(plus, 0), NumError);
}

TEST_CASE("householder factors zero a column below the pivot") {
  Vector e1 = Vector::Zero(4);
  e1[1] = 1.0;
  CHECK(householder_factor(e1, 1).is_identity());

  Vector col(2);
  col << 0.0, 1.0;
  const HouseholderFactor f = householder_factor(col, 0);
  const Vector img = f.matrix() * col;
  CHECK(std::abs(img[1]) < 1e-12);
  CHECK(std::abs(std::abs(img[0]) - 1.0) < 1e-12);

  RandomSource rng(33);
  for (int trial = 0; trial < 100; ++trial) {
    const StateVector s = test::random_state(3, rng);
    const HouseholderFactor g = householder_factor(s.amps(), 0);
    const Matrix m = g.matrix();
    CHECK(std::abs(std::abs((m * s.amps())[0]) - 1.0) < 1e-10);
    CHECK((m * m.adjoint() - Matrix::Identity(8, 8)).norm() < 1e-9);
    CHECK((m * m - Matrix::Identity(8, 8)).norm() < 1e-9);
    CHECK((g.apply(s.amps()) - m * s.amps()).norm() < 1e-12);
  }

  // Entries above the pivot are untouched.
  Vector v(4);
  v << 0.3, 0.1, 0.5, 0.2;
  const HouseholderFactor h = householder_factor(v, 1);
  const Vector hv = h.apply(v);
  CHECK(std::abs(hv[0] - 0.3) < 1e-15);
  CHECK(std::abs(hv[2]) < 1e-12);
  CHECK(std::abs(hv[3]) < 1e-12);

  CHECK_THROWS_AS(householder_factor(Vector::Zero(4), 0), NumError);
}

TEST_CASE("ms_matrix special cases") {
  CHECK((ms_matrix(2, 0.0) - Matrix::Identity(4, 4)).norm() < 1e-14);
  const double th = 0.83;
  const Matrix one = ms_matrix(1, th);
  CHECK((one - std::exp(Complex(0, th / 4)) * Matrix::Identity(2, 2)).norm() < 1e-14);
  CHECK((ms_matrix(2, th) * ms_matrix(2, -th) - Matrix::Identity(4, 4)).norm() < 1e-10);
  CHECK(is_unitary(ms_matrix(3, 1.7), 1e-10));
}

TEST_CASE("ms_matrix matches a truncated Taylor series of the generator") {
  // Independent route: exp(iA) summed term by term.
  for (int n = 1; n <= 3; ++n) {
    const int dim = 1 << n;
    Matrix sx = Matrix::Zero(dim, dim);
    for (int q = 0; q < n; ++q) {
      const int t[] = {q};
      sx += test::embed(gate_matrix("X"), t, n);
    }
    const double th = 0.61;
    const Matrix gen = Complex(0, th / 4.0) * sx * sx;
    Matrix term = Matrix::Identity(dim, dim), sum = term;
    for (int k = 1; k < 60; ++k) {
      term = term * gen / static_cast<double>(k);
      sum += term;
    }
    CHECK((sum - ms_matrix(n, th)).norm() < 1e-12);
  }
}

TEST_CASE("matrix text format") {
  CHECK(parse_complex("1+2i") == Complex(1, 2));
  CHECK(parse_complex("-0.5") == Complex(-0.5, 0));
  CHECK(parse_complex("3i") == Complex(0, 3));
  CHECK(parse_complex("-i") == Complex(0, -1));
  CHECK(parse_complex("-2i") == Complex(0, -2));
  CHECK(parse_complex("1e-3-2.5e+2i") == Complex(1e-3, -250));
  CHECK_THROWS_AS(parse_complex("abc"), NumError);

  const Matrix m = parse_matrix("dim 2\n1 0\n0 -1i\n");
  CHECK(m(1, 1) == Complex(0, -1));
  std::ostringstream out;
  RandomSource rng(2);
  const Matrix u = test::random_unitary(4, rng);
  write_matrix(out, u);
  CHECK((parse_matrix(out.str()) - u).norm() == 0.0);
  CHECK_THROWS_AS(parse_matrix("dim 2\n1 0\n0"), NumError);
}

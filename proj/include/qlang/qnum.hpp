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

#pragma once

// Complex linear algebra substrate: pure states, gate matrices, tensor
// products, controlled gates, projective measurement in the computational
// basis and Householder reflections.
//
// Basis convention: wire 0 is the leftmost ket symbol, i.e. the most
// significant bit of the basis index.

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qlang/error.hpp"
#include "qlang/random.hpp"

namespace qlang::qnum {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kNormTol = 1e-9;
inline constexpr double kEqTol = 1e-10;
inline constexpr double kPi = 3.14159265358979323846;

class NumError : public Error {
 public:
  using Error::Error;
};

/// Largest simulated register width. Defaults to 14 qubits.
int max_qubits();
void set_max_qubits(int n);

/// Throws NumError when a 2^n-dimensional object would exceed the limit.
void check_width(int n_qubits);

/// Number of qubits n with 2^n == dim, or -1 when dim is not a power of two.
int log2_dim(Eigen::Index dim);

enum class Polarity { kPositive, kNegative };

class StateVector {
 public:
  /// |0...0> on n qubits.
  explicit StateVector(int n_qubits = 0);

  /// Takes ownership of amplitudes; the length must be a power of two and the
  /// vector normalized within kNormTol.
  explicit StateVector(Vector amps);

  static StateVector basis(int n_qubits, std::uint64_t index);

  int n_qubits() const { return n_qubits_; }
  Eigen::Index dim() const { return amps_.size(); }
  const Vector& amps() const { return amps_; }
  Complex operator[](Eigen::Index i) const { return amps_[i]; }

  double norm_squared() const { return amps_.squaredNorm(); }

 private:
  int n_qubits_;
  Vector amps_;
};

/// Exact matrix of a named gate. `width` only matters for MS, whose matrix
/// acts on `width` qubits (default 2).
Matrix gate_matrix(std::string_view name, std::span<const double> params = {},
                   int width = 0);

/// Number of qubits the named gate acts on (0 for MS, which is variadic), or
/// -1 when the name is unknown.
int gate_arity(std::string_view name);

/// Number of angle parameters the named gate takes, or -1 when unknown.
int gate_param_count(std::string_view name);

/// Mølmer-Sørensen gate exp(i*theta*(sum_i X_i)^2/4) on n qubits.
Matrix ms_matrix(int n, double theta);

Matrix kron(const Matrix& a, const Matrix& b);
StateVector kron(const StateVector& a, const StateVector& b);

/// Positive control is block-diag(I, U); negative control is block-diag(U, I).
Matrix controlled(const Matrix& u, Polarity polarity = Polarity::kPositive);

bool is_unitary(const Matrix& u, double tol = kNormTol);

/// Applies `u` to the listed wires of `state`; targets[0] is the most
/// significant qubit of u.
StateVector apply(const StateVector& state, const Matrix& u,
                  std::span<const int> targets);

/// In-place version of apply() on an unnormalized amplitude vector of n
/// qubits; used for building operator matrices column by column.
void apply_inplace(Vector& amps, int n, const Matrix& u,
                   std::span<const int> targets);

/// Multi-controlled version of u: controls come first (most significant), in
/// the listed order, each with its own polarity.
Matrix with_controls(const Matrix& u, std::span<const Polarity> polarities);

/// Reorders wires: wire i of the result is wire order[i] of the input.
StateVector permute_wires(const StateVector& state, std::span<const int> order);

/// Probability of reading 1 on `wire`.
double probability_one(const StateVector& state, int wire);

struct Measurement {
  int bit = 0;
  StateVector state;
  double probability = 1.0;
};

/// Computational-basis measurement of one wire. The collapsed state keeps the
/// measured wire (now in |bit>). Outcomes below 1e-12 probability are never
/// drawn.
Measurement measure(const StateVector& state, int wire, RandomSource& rng);

/// Removes a wire that is in a computational basis state (within tol). Returns
/// the remaining register; throws NumError when the wire is entangled or in
/// superposition.
StateVector discard(const StateVector& state, int wire, double tol = kNormTol);

/// state ⊗ |bit>: the new qubit becomes the last (least significant) wire.
StateVector append_qubit(const StateVector& state, int bit);

/// min over phi of ||a - e^{i phi} b||_F.
double phase_distance(const Matrix& a, const Matrix& b);
double phase_distance(const Vector& a, const Vector& b);

/// A Householder reflection I - a |u><u|.
struct HouseholderFactor {
  Complex a{0.0, 0.0};
  Vector u;

  bool is_identity() const { return a == Complex(0.0, 0.0) || u.squaredNorm() == 0.0; }
  Matrix matrix() const;
  /// F * v without forming the matrix.
  Vector apply(const Vector& v) const;
};

/// Reflector F with F*col = phase * e_pivot that leaves entries above the
/// pivot untouched. Returns the identity factor when col already has no mass
/// off the pivot.
HouseholderFactor householder_factor(const Vector& col, Eigen::Index pivot);

// Matrix text format: "dim N" followed by N rows of N complex tokens.
Matrix read_matrix(std::istream& in);
Matrix parse_matrix(std::string_view text);
void write_matrix(std::ostream& out, const Matrix& m);
Complex parse_complex(std::string_view token);
std::string format_complex(Complex z);

}  // namespace qlang::qnum

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

// Concrete sum-over-paths semantics for Clifford+T-style circuits.
//
// A path-sum over input variables x and path variables y denotes
//   |x> -> 2^{-k/2} sum_y exp(2 pi i P(x, y) / 2^m) |f(x, y)>
// where P is a multilinear integer polynomial taken mod 2^m and each output f
// is a XOR-of-AND polynomial. Variables are numbered 0..63 and monomials are
// bit masks over them; the empty mask is the constant monomial.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qlang/circuit.hpp"
#include "qlang/error.hpp"
#include "qlang/qnum.hpp"

namespace qlang::pathsum {

using Mask = std::uint64_t;

inline constexpr int kMaxVars = 64;
inline constexpr int kMaxPhaseBits = 62;
/// Largest in+path variable count that to_matrix will enumerate.
inline constexpr int kEnumBudget = 22;

class PathSumError : public Error {
 public:
  using Error::Error;
};

class BoolPoly {
 public:
  BoolPoly() = default;
  static BoolPoly constant(bool b);
  static BoolPoly var(int v);

  const std::set<Mask>& monomials() const { return monos_; }
  bool is_zero() const { return monos_.empty(); }

  BoolPoly& operator^=(const BoolPoly& o);
  friend BoolPoly operator^(BoolPoly a, const BoolPoly& b) { return a ^= b; }
  friend BoolPoly operator*(const BoolPoly& a, const BoolPoly& b);

  bool eval(Mask assignment) const;
  Mask support() const;

  friend bool operator==(const BoolPoly&, const BoolPoly&) = default;

 private:
  void toggle(Mask m);
  std::set<Mask> monos_;
};

class PhasePoly {
 public:
  explicit PhasePoly(int m = 1);

  int m() const { return m_; }
  const std::map<Mask, std::uint64_t>& terms() const { return terms_; }

  void add(Mask monomial, std::uint64_t coeff);
  void add(const PhasePoly& o);
  /// Re-expresses the polynomial over 2^new_m; new_m must not be smaller.
  void lift(int new_m);
  /// Integer value of the polynomial under the assignment, mod 2^m.
  std::uint64_t eval(Mask assignment) const;
  Mask support() const;

  /// Integer multilinear polynomial equal to the 0/1 value of `b`, mod 2^m.
  static PhasePoly from_bool(const BoolPoly& b, int m);
  /// Product of two polynomials over a common modulus.
  friend PhasePoly operator*(const PhasePoly& a, const PhasePoly& b);

  friend bool operator==(const PhasePoly&, const PhasePoly&) = default;

 private:
  std::uint64_t mod_mask() const;
  int m_;
  std::map<Mask, std::uint64_t> terms_;
};

struct PathSum {
  int n_in = 0;
  /// Path variables are numbered n_in .. n_in + n_path - 1.
  int n_path = 0;
  PhasePoly phase;
  std::vector<BoolPoly> outs;

  int n_out() const { return static_cast<int>(outs.size()); }
};

PathSum identity(int n);

/// Path-sum of a single gate acting on its own wires (controls first, then
/// targets). Supports I, X, NOT, Z, S, T (and adjoints), dyadic RZ, CNOT,
/// SWAP, TOFFOLI and uncontrolled H.
PathSum gate_pathsum(const circuit::GateOp& g);
PathSum gate_pathsum(const std::string& name, const std::vector<double>& params = {});

/// b after a.
PathSum compose(const PathSum& a, const PathSum& b);
PathSum tensor(const PathSum& a, const PathSum& b);
/// Same semantics over a finer phase unit.
PathSum lift(const PathSum& p, int m);

qnum::Matrix to_matrix(const PathSum& p);

PathSum circuit_pathsum(const circuit::Circuit& c);

struct Verdict {
  bool equivalent = false;
  /// Basis input on which the two circuits differ, when they do.
  std::optional<std::uint64_t> witness;
};

Verdict equiv(const circuit::Circuit& a, const circuit::Circuit& b, double tol = 1e-8);

/// Text rendering used in diagnostics, e.g. "k=1 m=1 P=x0*y0 out=[y0]".
std::string to_string(const PathSum& p);

}  // namespace qlang::pathsum

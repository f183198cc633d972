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

// Circuit synthesis from dense unitaries: Householder-based CNOT+rotation
// circuits, and parametric trapped-ion circuits fitted with BFGS.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "qlang/circuit.hpp"
#include "qlang/error.hpp"
#include "qlang/qnum.hpp"
#include "qlang/random.hpp"

namespace qlang::usynth {

using qnum::Matrix;

class SynthError : public Error {
 public:
  using Error::Error;
};

/// U = F_0 F_1 ... F_{N-2} diag(e^{i phases}).
struct HouseholderDecomp {
  std::vector<qnum::HouseholderFactor> factors;
  std::vector<double> phases;

  Matrix reconstruct() const;
};

HouseholderDecomp householder_qr(const Matrix& u, double tol = 1e-8);

/// Appends diag(e^{i phases}) on wires 0..n-1 (up to global phase) using
/// RZ and CNOT gates, acting only on the qubits the phases depend on.
void append_diagonal(circuit::Circuit& c, std::span<const double> phases, int n);

/// Appends a uniformly controlled RY or RZ: for each control value c (first
/// control most significant) the target gets a rotation by angles[c]. When
/// drop_last is set the closing CNOT is omitted, leaving an extra X on the
/// target whenever the first control is 1.
void append_uc_rotation(circuit::Circuit& c, const std::string& axis,
                        const std::vector<int>& controls, int target,
                        std::vector<double> angles, bool drop_last = false);

/// Circuit equal to the reflection up to global phase.
circuit::Circuit reflection_to_circuit(const qnum::HouseholderFactor& f, int n);

struct SynthCounts {
  int cnots = 0;
  int rotations = 0;
};

struct SynthResult {
  circuit::Circuit circuit;
  SynthCounts counts;
};

SynthResult synth_householder(const Matrix& u, int max_qubits = 6);

/// ceil((2^{n+1} - 2n - 2) / (2n + 1)), computed in integers.
std::uint64_t ms_layer_lower_bound(int n);

Matrix ms_gate(int n, double theta);

/// Rz column, then per layer an MS gate followed by a column of single-qubit
/// rotations. The columns after MS gates alternate Ry, Rz, Ry, ... so that
/// the family is not confined to a parity sector. Parameters are laid out
/// layer by layer as (MS angle, n column angles) with the first Rz column
/// last.
struct IonAnsatz {
  int n = 1;
  int layers = 0;
  std::vector<double> theta;

  static int param_count(int n, int layers) { return layers * (n + 1) + n; }
};

Matrix ansatz_eval(const IonAnsatz& a);

/// 1 - |Tr(target^dagger a)| / 2^n, clamped to [0, 1].
double synthesis_error(const Matrix& target, const Matrix& a);

using Objective = std::function<double(std::span<const double>)>;

std::vector<double> fd_gradient(const Objective& f, std::span<const double> x, double h);
/// Five-point stencil; used to sanity-check fd_gradient.
std::vector<double> fd_gradient5(const Objective& f, std::span<const double> x, double h);

struct BfgsOptions {
  int restarts = 5;
  int max_iterations = 2000;
  double grad_tol = 1e-8;
  double fd_step = 1e-6;
};

struct BfgsResult {
  std::vector<double> theta;
  double error = 1.0;
  int iterations = 0;
  bool converged = false;
};

/// Single BFGS run from x0 with backtracking line search.
BfgsResult bfgs_minimize(const Objective& f, std::vector<double> x0, const BfgsOptions& opts);

/// Best of opts.restarts runs from uniform random starting angles.
BfgsResult bfgs_synth(const Matrix& target, int layers, RandomSource& rng,
                      const BfgsOptions& opts = {});

}  // namespace qlang::usynth

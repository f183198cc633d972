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

// Circuit intermediate representation shared by every synthesis and
// verification pass, with the standard combinators (sequence, parallel,
// inverse, control), simulation and gate counting.

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "qlang/error.hpp"
#include "qlang/qnum.hpp"
#include "qlang/random.hpp"

namespace qlang::circuit {

using WireId = int;
using qnum::Polarity;

class CircuitError : public Error {
 public:
  using Error::Error;
};

enum class WireKind { kQbit, kBit };

struct Wire {
  WireId id = 0;
  WireKind kind = WireKind::kQbit;

  friend bool operator==(const Wire&, const Wire&) = default;
};

struct Control {
  WireId wire = 0;
  Polarity polarity = Polarity::kPositive;

  friend bool operator==(const Control&, const Control&) = default;
};

struct GateOp {
  std::string name;
  std::vector<double> params;
  std::vector<Control> controls;
  std::vector<WireId> targets;
  /// Adjoint of the named gate (only set on S and T, whose inverse is not in
  /// the gate set).
  bool dagger = false;

  /// Name including the adjoint marker, e.g. "Sdg".
  std::string display_name() const { return dagger ? name + "dg" : name; }

  friend bool operator==(const GateOp&, const GateOp&) = default;
};

struct InitOp {
  WireId wire = 0;
  int value = 0;

  friend bool operator==(const InitOp&, const InitOp&) = default;
};

struct MeasureOp {
  WireId qwire = 0;
  WireId bwire = 0;

  friend bool operator==(const MeasureOp&, const MeasureOp&) = default;
};

struct DiscardOp {
  WireId wire = 0;

  friend bool operator==(const DiscardOp&, const DiscardOp&) = default;
};

using CircOp = std::variant<GateOp, InitOp, MeasureOp, DiscardOp>;

/// Matrix of a gate op on its targets, without controls.
qnum::Matrix gate_op_matrix(const GateOp& g);

class Circuit {
 public:
  Circuit() = default;
  Circuit(std::vector<Wire> inputs, std::vector<CircOp> ops,
          std::vector<Wire> outputs);

  /// n fresh qubit wires 0..n-1 used as both inputs and outputs.
  static Circuit identity(int n_qubits);

  const std::vector<Wire>& inputs() const { return inputs_; }
  const std::vector<CircOp>& ops() const { return ops_; }
  const std::vector<Wire>& outputs() const { return outputs_; }

  /// Appends a gate on live qubit wires and checks scoping.
  Circuit& gate(std::string name, std::vector<WireId> targets,
                std::vector<double> params = {},
                std::vector<Control> controls = {});
  /// Allocates a fresh qubit in |value> and adds it to the outputs.
  WireId init(int value);
  /// Measures a live qubit into a fresh bit wire; returns the bit wire.
  WireId measure(WireId q);
  void discard(WireId w);
  Circuit& append(CircOp op);

  /// True when the circuit contains only gates.
  bool is_pure() const;
  /// Largest wire id in use plus one.
  WireId next_wire() const;

  /// Checks scoping, control/target disjointness, gate arities and that the
  /// declared outputs are exactly the wires live at the end.
  void validate() const;

  friend bool operator==(const Circuit&, const Circuit&) = default;

 private:
  std::vector<Wire> inputs_;
  std::vector<CircOp> ops_;
  std::vector<Wire> outputs_;
};

/// c1 then c2; c2's inputs are identified with c1's outputs positionally and
/// its other wires are renamed apart.
Circuit seq(const Circuit& c1, const Circuit& c2);
/// Side-by-side composition: inputs and outputs are concatenated.
Circuit par(const Circuit& c1, const Circuit& c2);
/// Reversed circuit with every gate inverted. Throws CircuitError naming the
/// first non-gate op.
Circuit inverse(const Circuit& c);
/// Adds a fresh control wire (first input and output) to every gate.
Circuit control(const Circuit& c, Polarity polarity = Polarity::kPositive);

struct GateCount {
  std::map<std::string, int> per_gate;
  int gates = 0;
  int inits = 0;
  int measures = 0;
  int discards = 0;
  /// Distinct qubit wires: qubit inputs plus initialized wires.
  int qubits = 0;
  /// CNOT-class gates: CNOT, or X with exactly one control.
  int cnots = 0;

  friend bool operator==(const GateCount&, const GateCount&) = default;
};

GateCount gate_count(const Circuit& c);

/// Operator of a pure circuit over its inputs in order (inputs must all be
/// qubits). The first input is the most significant wire.
qnum::Matrix to_unitary(const Circuit& c);

struct RunResult {
  /// Joint state of the qubit outputs, in output order.
  qnum::StateVector state;
  /// Measurement outcomes in op order.
  std::vector<int> record;
  /// Values of the bit outputs, in output order.
  std::vector<int> bits;
};

/// Simulates the circuit. `input` covers the qubit inputs in order; bit
/// inputs take their values from `bit_inputs` (default all 0).
RunResult run(const Circuit& c, const qnum::StateVector& input, RandomSource& rng,
              const std::vector<int>& bit_inputs = {});

nlohmann::ordered_json to_json(const Circuit& c);
Circuit from_json(const nlohmann::json& j);

}  // namespace qlang::circuit

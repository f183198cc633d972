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

// Quantum lambda calculus: terms, linear type inference, and the [Q, L, M]
// abstract machine with box/unbox circuit buffering.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qlang/circuit.hpp"
#include "qlang/error.hpp"
#include "qlang/qnum.hpp"
#include "qlang/random.hpp"

namespace qlang::qlc {

class TypeError : public Error {
 public:
  using Error::Error;
};

/// Runtime failure of the machine that is not a bug: fuel exhaustion,
/// measurement inside box, interface mismatch.
class EvalError : public Error {
 public:
  using Error::Error;
};

// ---- types ----

struct QType;
using QTypePtr = std::shared_ptr<const QType>;

struct QType {
  enum class Kind { kQbit, kBit, kUnit, kArrow, kTensor, kCirc, kVar };
  Kind kind = Kind::kVar;
  /// Only meaningful for arrows: the type is !(a -o b).
  bool bang = false;
  QTypePtr a, b;
  int var = 0;

  static QTypePtr qbit();
  static QTypePtr bit();
  static QTypePtr unit();
  static QTypePtr arrow(QTypePtr a, QTypePtr b, bool bang = false);
  static QTypePtr tensor(QTypePtr a, QTypePtr b);
  static QTypePtr circ(QTypePtr a, QTypePtr b);
};

/// ASCII rendering: qbit, bit, 1, A * B, A -o B, !(A -o B), circ(A, B).
std::string to_string(const QType& t);
inline std::string to_string(const QTypePtr& t) { return to_string(*t); }

/// Parses the rendering above; also accepts ⊗ and ⊸. "!" on anything but a
/// function type is rejected.
QTypePtr parse_type(std::string_view src);

/// Structural equality (type variables compare by id).
bool same_type(const QType& a, const QType& b);

/// Number of qubits in a type built from qbit, 1 and tensors, or -1.
int qubit_count(const QType& t);

// ---- terms ----

struct Node;
using Term = std::shared_ptr<const Node>;

/// A circuit produced by box, with the tensor shapes of its interface.
struct Boxed {
  circuit::Circuit circuit;
  QTypePtr in, out;
};

struct Var {
  std::string name;
};
struct Lam {
  std::string param;
  Term body;
};
struct App {
  Term fn, arg;
};
struct Pair {
  Term first, second;
};
struct LetPair {
  std::string x, y;
  Term bound, body;
};
struct Unit {};
struct LetUnit {
  Term bound, body;
};
struct BoolLit {
  bool value;
};
struct If {
  Term cond, then_branch, else_branch;
};
/// qinit, meas, box, unbox, or a gate name.
struct Const {
  std::string name;
};
struct LetRec {
  std::string fn, param;
  Term fn_body, body;
};
/// A circuit value of type circ(A, B).
struct CircLit {
  std::shared_ptr<const Boxed> boxed;
};
/// unbox applied to a circuit: a function that replays it.
struct CircFn {
  std::shared_ptr<const Boxed> boxed;
};

struct Node {
  std::variant<Var, Lam, App, Pair, LetPair, Unit, LetUnit, BoolLit, If, Const, LetRec, CircLit,
               CircFn>
      v;
  int line = 0;
  int column = 0;
  /// Interface of a box constant, filled in by typecheck.
  mutable std::shared_ptr<const std::pair<QTypePtr, QTypePtr>> box_shape;
};

Term parse(std::string_view src);
std::string to_string(const Term& t);
/// Number of AST nodes.
std::size_t term_size(const Term& t);
bool is_value(const Term& t);
bool is_gate_name(std::string_view name);

// builders
Term var(std::string name);
Term lam(std::string param, Term body);
Term app(Term fn, Term arg);
Term pair(Term a, Term b);
Term unit();
Term lit(bool b);
Term constant(std::string name);

/// Infers the type of t with each listed free variable of type qbit.
/// Throws TypeError. Also records box interfaces on the term.
QTypePtr typecheck(const Term& t, const std::vector<std::string>& qubit_vars = {});

/// Checks that t can be given exactly `expected`; throws TypeError otherwise.
QTypePtr typecheck(const Term& t, const std::vector<std::string>& qubit_vars,
                   const QTypePtr& expected);

// ---- machine ----

struct Program {
  qnum::StateVector q{0};
  /// L: wire i of q holds the qubit named l[i].
  std::vector<std::string> l;
  Term m;
  /// Counter used to name fresh qubits.
  int next_qubit = 0;
};

Program make_program(Term m);

struct StepResult {
  std::string rule;
  double probability = 1.0;
};

/// Fires the single redex of a non-value program. Throws InternalError if the
/// program is stuck.
StepResult step(Program& p, RandomSource& rng);

struct TraceEntry {
  std::string rule;
  double probability = 1.0;
  std::size_t size = 0;
};

struct EvalResult {
  Program program;
  std::vector<TraceEntry> trace;
  double probability = 1.0;
  std::size_t steps = 0;
};

/// Steps until a value; EvalError when fuel runs out first.
EvalResult eval(Program p, RandomSource& rng, std::uint64_t fuel = 1000000);

/// "rule p=<prob> size=<n>"
std::string format_trace(const TraceEntry& e);

/// Symbolic execution of a closed function value into a circuit.
Boxed box(const Term& fn, std::uint64_t fuel = 1000000);

/// The function value unbox(c).
Term unbox(const Boxed& c);

/// Reads a value made of tt/ff: tt, ff or pairs of them, flattened.
std::optional<std::vector<bool>> bits_of(const Term& value);

// ---- random programs ----

struct GenOptions {
  int depth = 4;
  /// Qubit variables free in the generated term (typed qbit).
  int free_qubits = 0;
};

/// A random well-typed program; the result type is one of bit, qbit,
/// qbit * qbit, bit * bit or 1. Free qubits are named x0, x1, ...
Term generate(RandomSource& rng, const GenOptions& opt = {});

}  // namespace qlang::qlc

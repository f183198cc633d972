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

// Classical Boolean programs compiled to reversible circuits: a
// partial evaluator emits Landauer embeddings, and Bennett's construction
// turns them into oracles (x, 0, y) -> (x, 0, y xor f(x)).
//
// Concrete syntax:
//   M ::= \x y. M | fun x y -> M | let x = M in M | let (x, y) = M in M
//       | letrec f x y = M in M | if M then M else M | M M | (M, M)
//       | x | tt | ff | not | and | (M)

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qlang/circuit.hpp"
#include "qlang/error.hpp"

namespace qlang::oracle {

class OracleError : public Error {
 public:
  using Error::Error;
};

struct Term;
using BTerm = std::shared_ptr<const Term>;

enum class Prim { kNot, kAnd };

struct Var {
  std::string name;
};
struct Lam {
  std::string param;
  BTerm body;
};
struct App {
  BTerm fn, arg;
};
struct BoolLit {
  bool value;
};
struct PrimOp {
  Prim op;
};
struct PairT {
  BTerm first, second;
};
struct LetPair {
  std::string x, y;
  BTerm bound, body;
};
struct If {
  BTerm cond, then_branch, else_branch;
};
struct Let {
  std::string name;
  BTerm bound, body;
};
/// letrec f x = fn_body in body
struct LetRec {
  std::string fn, param;
  BTerm fn_body, body;
};

struct Term {
  std::variant<Var, Lam, App, BoolLit, PrimOp, PairT, LetPair, If, Let, LetRec> node;
  int line = 0;
  int column = 0;
};

BTerm parse_bterm(std::string_view src);
std::string to_string(const BTerm& t);

// Builders, mostly for tests.
BTerm var(std::string name);
BTerm lam(std::string param, BTerm body);
BTerm app(BTerm fn, BTerm arg);
BTerm app(BTerm fn, std::initializer_list<BTerm> args);
BTerm lit(bool b);
BTerm prim(Prim p);

/// Infers the type of `t` with the named free variables of type bool.
/// Returns a rendering such as "bool -> bool".
std::string typecheck(const BTerm& t, const std::vector<std::string>& bool_vars = {});

/// Term applied to n fresh input variables x1..xn (names returned).
BTerm apply_inputs(const BTerm& t, int n, std::vector<std::string>* names);

struct Value;
using ValuePtr = std::shared_ptr<const Value>;

/// Evaluates under call-by-value with the given boolean inputs bound.
/// Throws OracleError on fuel exhaustion or a runtime type error.
ValuePtr eval_bool(const BTerm& t, const std::map<std::string, bool>& inputs = {},
                   std::uint64_t fuel = 1'000'000);
/// Flattens a boolean or nested pair of booleans; throws otherwise.
std::vector<bool> value_bits(const ValuePtr& v);
std::string to_string(const ValuePtr& v);

struct Block {
  std::string op;  // "not", "and", "if" or "const"
  std::size_t first_op = 0;
  std::size_t end_op = 0;  // one past the last op
};

struct Landauer {
  circuit::Circuit circuit;
  std::vector<circuit::WireId> inputs;
  /// One wire per output bit (may repeat or be an input wire).
  std::vector<circuit::WireId> outputs;
  /// Initialized wires that are not outputs.
  std::vector<circuit::WireId> garbage;
  std::vector<Block> blocks;
};

/// Partially evaluates `t` with each named input carried by a wire.
Landauer synth_landauer(const BTerm& t, const std::vector<std::string>& inputs,
                        std::uint64_t fuel = 1'000'000);

/// Number of not/and/if/constant operators in the beta-normal form of t
/// with the named inputs left symbolic (constants counted only where they
/// survive in the residual term).
std::uint64_t operator_count(const BTerm& t, const std::vector<std::string>& inputs,
                             std::uint64_t fuel = 1'000'000);

/// Pure circuit with inputs and outputs (x, ancillas, y): the Landauer core,
/// a CNOT fan-out of the results into y, then the inverse core.
circuit::Circuit bennett_wrap(const Landauer& l);

struct Counterexample {
  std::vector<int> x, y;
  std::vector<int> got, expected;
};

struct VerifyResult {
  bool ok = true;
  std::optional<Counterexample> counterexample;
};

/// Brute-force check of (x, 0, y) -> (x, 0, y xor f(x)) on every basis input.
/// The circuit's inputs are read as n input wires, ancillas, then m target
/// wires, where m is the number of result bits of the term.
VerifyResult verify_oracle(const circuit::Circuit& c, const BTerm& f,
                           const std::vector<std::string>& inputs);

/// Applies a classical reversible circuit (X/NOT/CNOT/TOFFOLI/SWAP with
/// controls) to a bit vector indexed by input position; nullopt when the
/// circuit contains other operations.
std::optional<std::vector<int>> simulate_classical(const circuit::Circuit& c, std::vector<int> bits);

}  // namespace qlang::oracle

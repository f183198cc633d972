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

// Reversible pattern-matching isos over 1, tensors, sums and inductive
// types, with linear combinations of values on the right-hand side.

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qlang/error.hpp"
#include "qlang/qnum.hpp"

namespace qlang::iso {

class IsoError : public Error {
 public:
  using Error::Error;
};

using Complex = std::complex<double>;

// ---- types ----

struct TypeNode;
using Type = std::shared_ptr<const TypeNode>;

struct TypeNode {
  enum class Kind { kUnit, kTensor, kSum, kMu, kRec, kParam };
  Kind kind = Kind::kUnit;
  Type a, b;
  /// Binder of kMu, name of kRec (bound μ variable) or kParam (type variable).
  std::string name;
};

Type unit_type();
Type tensor(Type a, Type b);
Type sum(Type a, Type b);
Type mu(std::string x, Type body);
Type rec_var(std::string x);
/// a[X := μX.a] for t = μX.a.
Type unfold(const Type& t);
/// Equality up to renaming of μ binders.
bool same_type(const Type& a, const Type& b);
bool has_params(const Type& t);
std::string to_string(const Type& t);

// ---- values and patterns ----

struct VNode;
using Value = std::shared_ptr<const VNode>;

/// A pattern; a value is a pattern without variables.
struct VNode {
  enum class Kind { kVar, kUnit, kPair, kInl, kInr, kFold };
  Kind kind = Kind::kUnit;
  Value a, b;
  std::string name;
};

Value v_unit();
Value v_pair(Value a, Value b);
Value v_inl(Value a);
Value v_inr(Value a);
Value v_fold(Value a);
Value v_var(std::string x);
/// ff = inl *, tt = inr *.
Value v_bool(bool b);
/// nil = fold inl *, h :: t = fold inr <h, t>.
Value v_list(const std::vector<Value>& items);

/// Canonical order: * < inl < inr, pairs lexicographic, fold transparent.
int compare(const Value& a, const Value& b);
struct ValueLess {
  bool operator()(const Value& a, const Value& b) const { return compare(a, b) < 0; }
};
bool is_closed(const Value& v);
std::string to_string(const Value& v);

/// A finite linear combination of distinct values, kept sorted.
struct AmpValue {
  std::vector<std::pair<Complex, Value>> terms;

  static AmpValue basis(Value v);
  double norm() const;
};
std::string to_string(const AmpValue& v);

// ---- isos ----

struct Iso;
using IsoPtr = std::shared_ptr<const Iso>;

struct ENode;
using Expr = std::shared_ptr<const ENode>;

/// Right-hand side: a pattern extended with iso applications and linear
/// combinations.
struct ENode {
  enum class Kind { kVar, kUnit, kPair, kInl, kInr, kFold, kApp, kComb };
  Kind kind = Kind::kUnit;
  Expr a, b;
  std::string name;
  /// kApp: the applied iso; null means the enclosing iso (recursive call).
  IsoPtr iso;
  /// kApp: how the reference was written, for printing.
  std::string iso_text;
  /// kComb
  std::vector<std::pair<Complex, Expr>> terms;
};

struct Clause {
  Value lhs;
  Expr rhs;
  int line = 0;
};

struct Iso {
  std::string name;
  Type a, b;
  std::vector<Clause> clauses;
  /// Binder of "fix f." or the iso's own name when it calls itself.
  std::string fix_binder;
  /// Uses amplitudes, directly or through an applied iso.
  bool quantum = false;
};

std::string to_string(const Iso& iso);

/// Linearity, typing, non-overlap and exhaustivity on both sides (the right
/// side of quantum isos is checked for unitarity instead). Returns the type
/// "a <-> b"; throws IsoError naming the clause or an uncovered value.
std::string check_iso(const Iso& iso, int depth = 4);

/// Clause sides swapped; iso applications move to the other side as
/// inverse applications. Quantum isos are refused.
Iso invert(const Iso& iso);

/// Exact structural equality of clauses (used to compare an iso with its
/// double inverse).
bool same_iso(const Iso& a, const Iso& b);

Value apply(const Iso& iso, const Value& v, std::uint64_t fuel = 1000000);
AmpValue apply_quantum(const Iso& iso, const AmpValue& v, std::uint64_t fuel = 1000000);

/// Values of t in canonical order, with μ-types unrolled `depth` times.
/// Throws when there are more than `limit` values.
std::vector<Value> enumerate(const Type& t, int depth = 4, std::size_t limit = 4096);

/// Matrix on the canonical bases of both sides (μ unrolled to depth).
qnum::Matrix to_matrix(const Iso& iso, int depth = 4);

/// Warnings for recursive calls not applied to a variable found strictly
/// under a fold of the clause's left side. Empty means structural.
std::vector<std::string> structural_guard(const Iso& iso);

// ---- source files ----

struct IsoDecl;

class Module {
 public:
  Module();
  ~Module();
  Module(Module&&) noexcept;
  Module& operator=(Module&&) noexcept;

  /// Instantiates an iso expression such as "not", "map(not)" or "inv(w)".
  IsoPtr get(std::string_view expr);
  /// Declared iso names in file order.
  std::vector<std::string> names() const;
  /// Names of declarations without parameters.
  std::vector<std::string> closed_names() const;
  Type type(std::string_view src) const;

  /// Parses a value or linear combination such as "tt", "[ff, tt]" or
  /// "0.6 * ff + 0.8 * tt".
  AmpValue value(std::string_view src) const;

  struct Impl;

 private:
  friend Module parse_module(std::string_view src);
  std::unique_ptr<Impl> impl_;
};

/// Predefined aliases: bool = qubit = 1 + 1, list a = mu X. 1 + a * X.
Module parse_module(std::string_view src);

}  // namespace qlang::iso

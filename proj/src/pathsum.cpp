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

#include "qlang/pathsum.hpp"

#include <bit>
#include <cmath>
#include <sstream>
#include <unordered_map>

namespace qlang::pathsum {

namespace {

Mask bit(int v) { return Mask{1} << v; }

// Applies a variable renaming to a monomial.
Mask rename(Mask m, const std::vector<int>& to) {
  Mask out = 0;
  while (m) {
    const int v = std::countr_zero(m);
    m &= m - 1;
    out |= bit(to.at(static_cast<std::size_t>(v)));
  }
  return out;
}

BoolPoly rename(const BoolPoly& b, const std::vector<int>& to) {
  BoolPoly out;
  for (Mask m : b.monomials()) {
    BoolPoly t = BoolPoly::constant(true);
    const Mask r = rename(m, to);
    for (Mask rest = r; rest; rest &= rest - 1) t = t * BoolPoly::var(std::countr_zero(rest));
    out ^= t;
  }
  return out;
}

PhasePoly rename(const PhasePoly& p, const std::vector<int>& to) {
  PhasePoly out(p.m());
  for (const auto& [m, c] : p.terms()) out.add(rename(m, to), c);
  return out;
}

// Substitutes sub[v] for every variable v of monomial m.
BoolPoly substitute(Mask m, const std::vector<BoolPoly>& sub) {
  BoolPoly t = BoolPoly::constant(true);
  while (m) {
    const int v = std::countr_zero(m);
    m &= m - 1;
    t = t * sub.at(static_cast<std::size_t>(v));
    if (t.is_zero()) break;
  }
  return t;
}

BoolPoly substitute(const BoolPoly& b, const std::vector<BoolPoly>& sub) {
  BoolPoly out;
  for (Mask m : b.monomials()) out ^= substitute(m, sub);
  return out;
}

std::string var_name(int v, int n_in) {
  return v < n_in ? "x" + std::to_string(v) : "y" + std::to_string(v - n_in);
}

std::string mono_name(Mask m, int n_in) {
  if (m == 0) return "1";
  std::string s;
  while (m) {
    if (!s.empty()) s += "*";
    s += var_name(std::countr_zero(m), n_in);
    m &= m - 1;
  }
  return s;
}

// theta = 2 pi c / 2^j with the smallest such j.
std::optional<std::pair<std::int64_t, int>> dyadic_angle(double theta) {
  const double turns = theta / (2 * qnum::kPi);
  for (int j = 0; j <= 40; ++j) {
    const double v = std::ldexp(turns, j);
    const double r = std::round(v);
    if (std::abs(v - r) < 1e-9 && std::abs(r) < 9e15) {
      return std::make_pair(static_cast<std::int64_t>(r), j);
    }
  }
  return std::nullopt;
}

}  // namespace

// ---- BoolPoly ----

BoolPoly BoolPoly::constant(bool b) {
  BoolPoly p;
  if (b) p.monos_.insert(0);
  return p;
}

BoolPoly BoolPoly::var(int v) {
  if (v < 0 || v >= kMaxVars) throw PathSumError("variable index out of range");
  BoolPoly p;
  p.monos_.insert(bit(v));
  return p;
}

void BoolPoly::toggle(Mask m) {
  auto [it, inserted] = monos_.insert(m);
  if (!inserted) monos_.erase(it);
}

BoolPoly& BoolPoly::operator^=(const BoolPoly& o) {
  for (Mask m : o.monos_) toggle(m);
  return *this;
}

BoolPoly operator*(const BoolPoly& a, const BoolPoly& b) {
  BoolPoly out;
  for (Mask x : a.monos_)
    for (Mask y : b.monos_) out.toggle(x | y);
  return out;
}

bool BoolPoly::eval(Mask assignment) const {
  bool v = false;
  for (Mask m : monos_) v ^= (m & assignment) == m;
  return v;
}

Mask BoolPoly::support() const {
  Mask s = 0;
  for (Mask m : monos_) s |= m;
  return s;
}

// ---- PhasePoly ----

PhasePoly::PhasePoly(int m) : m_(m) {
  if (m < 1 || m > kMaxPhaseBits) throw PathSumError("phase precision out of range");
}

std::uint64_t PhasePoly::mod_mask() const { return (std::uint64_t{1} << m_) - 1; }

void PhasePoly::add(Mask monomial, std::uint64_t coeff) {
  coeff &= mod_mask();
  if (coeff == 0) return;
  auto [it, inserted] = terms_.try_emplace(monomial, coeff);
  if (!inserted) {
    it->second = (it->second + coeff) & mod_mask();
    if (it->second == 0) terms_.erase(it);
  }
}

void PhasePoly::add(const PhasePoly& o) {
  if (o.m_ > m_) lift(o.m_);
  const int shift = m_ - o.m_;
  for (const auto& [m, c] : o.terms_) add(m, c << shift);
}

void PhasePoly::lift(int new_m) {
  if (new_m < m_) throw PathSumError("cannot lower phase precision");
  if (new_m > kMaxPhaseBits) throw PathSumError("phase precision out of range");
  const int shift = new_m - m_;
  m_ = new_m;
  for (auto& [m, c] : terms_) c <<= shift;
}

std::uint64_t PhasePoly::eval(Mask assignment) const {
  std::uint64_t v = 0;
  for (const auto& [m, c] : terms_)
    if ((m & assignment) == m) v += c;
  return v & mod_mask();
}

Mask PhasePoly::support() const {
  Mask s = 0;
  for (const auto& [m, c] : terms_) s |= m;
  return s;
}

PhasePoly PhasePoly::from_bool(const BoolPoly& b, int m) {
  // a xor t = a + t - 2 a t, folded over the monomials.
  PhasePoly p(m);
  for (Mask t : b.monomials()) {
    PhasePoly next = p;
    for (const auto& [mono, c] : p.terms_) next.add(mono | t, (~(c << 1)) + 1);
    next.add(t, 1);
    p = std::move(next);
  }
  return p;
}

PhasePoly operator*(const PhasePoly& a, const PhasePoly& b) {
  if (a.m_ != b.m_) throw InternalError("phase product over different moduli");
  PhasePoly out(a.m_);
  for (const auto& [x, cx] : a.terms_)
    for (const auto& [y, cy] : b.terms_) out.add(x | y, cx * cy);
  return out;
}

// ---- PathSum ----

PathSum identity(int n) {
  PathSum p;
  p.n_in = n;
  for (int i = 0; i < n; ++i) p.outs.push_back(BoolPoly::var(i));
  return p;
}

PathSum gate_pathsum(const circuit::GateOp& g) {
  const int nc = static_cast<int>(g.controls.size());
  const int nt = static_cast<int>(g.targets.size());
  const std::string& name = g.name;
  const int arity = qnum::gate_arity(name);
  if (arity < 0) throw PathSumError("unknown gate " + name);
  if (arity > 0 && nt != arity) throw PathSumError("gate " + name + " has wrong arity");
  if (nc + nt >= kMaxVars) throw PathSumError("gate too wide");

  PathSum p = identity(nc + nt);
  auto x = [&](int t) { return BoolPoly::var(nc + t); };
  BoolPoly guard = BoolPoly::constant(true);
  for (int c = 0; c < nc; ++c) {
    BoolPoly lit = BoolPoly::var(c);
    if (g.controls[static_cast<std::size_t>(c)].polarity == qnum::Polarity::kNegative) {
      lit ^= BoolPoly::constant(true);
    }
    guard = guard * lit;
  }
  auto diagonal = [&](int m, std::uint64_t c) {
    PhasePoly local(m);
    local.add(bit(nc), c);
    p.phase = PhasePoly::from_bool(guard, m) * local;
  };

  if (name == "I") {
  } else if (name == "X" || name == "NOT") {
    p.outs[nc] ^= guard;
  } else if (name == "CNOT") {
    p.outs[nc + 1] ^= guard * x(0);
  } else if (name == "TOFFOLI") {
    p.outs[nc + 2] ^= guard * x(0) * x(1);
  } else if (name == "SWAP") {
    const BoolPoly d = guard * (x(0) ^ x(1));
    p.outs[nc] ^= d;
    p.outs[nc + 1] ^= d;
  } else if (name == "Z") {
    diagonal(1, 1);
  } else if (name == "S") {
    diagonal(2, g.dagger ? 3 : 1);
  } else if (name == "T") {
    diagonal(3, g.dagger ? 7 : 1);
  } else if (name == "RZ") {
    const auto d = dyadic_angle(g.params.at(0));
    if (!d || d->second + 1 > kMaxPhaseBits) {
      throw PathSumError("RZ angle is not a dyadic multiple of 2pi");
    }
    // diag(e^{-i theta/2}, e^{i theta/2}) = exp(2 pi i (-c + 2 c x) / 2^{j+1})
    const int m = d->second + 1;
    const auto c = static_cast<std::uint64_t>(d->first);
    PhasePoly local(m);
    local.add(0, ~c + 1);
    local.add(bit(nc), c << 1);
    p.phase = PhasePoly::from_bool(guard, m) * local;
  } else if (name == "H") {
    if (nc > 0) throw PathSumError("controlled H is not supported");
    p.n_path = 1;
    p.phase.add(bit(0) | bit(1), 1);
    p.outs[0] = BoolPoly::var(1);
  } else {
    throw PathSumError("gate " + name + " is not supported by path-sums");
  }
  return p;
}

PathSum gate_pathsum(const std::string& name, const std::vector<double>& params) {
  circuit::GateOp g;
  g.name = name;
  g.params = params;
  const int arity = qnum::gate_arity(name);
  if (arity < 0) throw PathSumError("unknown gate " + name);
  for (int t = 0; t < std::max(arity, 2); ++t) {
    g.targets.push_back(t);
    if (arity > 0 && t + 1 == arity) break;
  }
  return gate_pathsum(g);
}

PathSum lift(const PathSum& p, int m) {
  PathSum out = p;
  out.phase.lift(m);
  return out;
}

PathSum compose(const PathSum& a, const PathSum& b) {
  if (a.n_out() != b.n_in) {
    throw PathSumError("compose: arity mismatch (" + std::to_string(a.n_out()) + " vs " +
                       std::to_string(b.n_in) + ")");
  }
  const int base = a.n_in + a.n_path;
  if (base + b.n_path > kMaxVars) throw PathSumError("too many path variables");
  std::vector<BoolPoly> sub(a.outs);
  for (int j = 0; j < b.n_path; ++j) sub.push_back(BoolPoly::var(base + j));

  PathSum out;
  out.n_in = a.n_in;
  out.n_path = a.n_path + b.n_path;
  out.phase = a.phase;
  const int m = std::max(a.phase.m(), b.phase.m());
  out.phase.lift(m);
  const int shift = m - b.phase.m();
  for (const auto& [mono, c] : b.phase.terms()) {
    PhasePoly t = PhasePoly::from_bool(substitute(mono, sub), m);
    PhasePoly scaled(m);
    scaled.add(0, c << shift);
    out.phase.add(t * scaled);
  }
  for (const auto& o : b.outs) out.outs.push_back(substitute(o, sub));
  return out;
}

PathSum tensor(const PathSum& a, const PathSum& b) {
  const int total = a.n_in + b.n_in + a.n_path + b.n_path;
  if (total > kMaxVars) throw PathSumError("too many variables");
  // Inputs of a, inputs of b, paths of a, paths of b.
  std::vector<int> ra, rb;
  for (int i = 0; i < a.n_in; ++i) ra.push_back(i);
  for (int j = 0; j < a.n_path; ++j) ra.push_back(a.n_in + b.n_in + j);
  for (int i = 0; i < b.n_in; ++i) rb.push_back(a.n_in + i);
  for (int j = 0; j < b.n_path; ++j) rb.push_back(a.n_in + b.n_in + a.n_path + j);

  PathSum out;
  out.n_in = a.n_in + b.n_in;
  out.n_path = a.n_path + b.n_path;
  out.phase = rename(a.phase, ra);
  out.phase.add(rename(b.phase, rb));
  for (const auto& o : a.outs) out.outs.push_back(rename(o, ra));
  for (const auto& o : b.outs) out.outs.push_back(rename(o, rb));
  return out;
}

qnum::Matrix to_matrix(const PathSum& p) {
  const int nv = p.n_in + p.n_path;
  if (nv > kEnumBudget) {
    throw PathSumError("path-sum has " + std::to_string(nv) + " variables; enumeration budget is " +
                       std::to_string(kEnumBudget));
  }
  const Eigen::Index din = Eigen::Index{1} << p.n_in;
  const Eigen::Index dout = Eigen::Index{1} << p.n_out();
  const int m = p.phase.m();
  const double unit = 2 * qnum::kPi / std::ldexp(1.0, m);
  const double scale = std::pow(2.0, -0.5 * p.n_path);
  std::unordered_map<std::uint64_t, qnum::Complex> roots;
  auto root = [&](std::uint64_t k) {
    auto it = roots.find(k);
    if (it != roots.end()) return it->second;
    const auto z = std::polar(1.0, unit * static_cast<double>(k));
    roots.emplace(k, z);
    return z;
  };

  qnum::Matrix u = qnum::Matrix::Zero(dout, din);
  const Mask path_bits = ((Mask{1} << p.n_path) - 1) << p.n_in;
  for (Eigen::Index col = 0; col < din; ++col) {
    Mask xs = 0;
    for (int i = 0; i < p.n_in; ++i) {
      if ((static_cast<std::uint64_t>(col) >> (p.n_in - 1 - i)) & 1U) xs |= bit(i);
    }
    for (Mask ys = 0; ys < (Mask{1} << p.n_path); ++ys) {
      const Mask a = xs | ((ys << p.n_in) & path_bits);
      std::uint64_t row = 0;
      for (const auto& o : p.outs) row = (row << 1) | (o.eval(a) ? 1U : 0U);
      u(static_cast<Eigen::Index>(row), col) += scale * root(p.phase.eval(a));
    }
  }
  return u;
}

PathSum circuit_pathsum(const circuit::Circuit& c) {
  const int n = static_cast<int>(c.inputs().size());
  std::unordered_map<circuit::WireId, int> pos;
  for (int i = 0; i < n; ++i) {
    if (c.inputs()[i].kind != circuit::WireKind::kQbit) throw PathSumError("bit input wire");
    pos[c.inputs()[i].id] = i;
  }
  PathSum acc = identity(n);
  for (std::size_t k = 0; k < c.ops().size(); ++k) {
    const auto* g = std::get_if<circuit::GateOp>(&c.ops()[k]);
    if (!g) throw PathSumError("op " + std::to_string(k) + " is not a gate");
    PathSum local;
    try {
      local = gate_pathsum(*g);
    } catch (const PathSumError& e) {
      throw PathSumError("op " + std::to_string(k) + ": " + e.what());
    }
    std::vector<int> wires;
    for (const auto& ctl : g->controls) wires.push_back(pos.at(ctl.wire));
    for (circuit::WireId t : g->targets) wires.push_back(pos.at(t));
    // Embed the local path-sum on all n wires.
    std::vector<int> to(wires);
    for (int j = 0; j < local.n_path; ++j) to.push_back(n + j);
    PathSum e = identity(n);
    e.n_path = local.n_path;
    e.phase = rename(local.phase, to);
    for (std::size_t l = 0; l < wires.size(); ++l) {
      e.outs[static_cast<std::size_t>(wires[l])] = rename(local.outs[l], to);
    }
    acc = compose(acc, e);
  }
  std::vector<BoolPoly> outs;
  for (const auto& w : c.outputs()) outs.push_back(acc.outs.at(static_cast<std::size_t>(pos.at(w.id))));
  acc.outs = std::move(outs);
  return acc;
}

Verdict equiv(const circuit::Circuit& a, const circuit::Circuit& b, double tol) {
  constexpr int kMaxWidth = 6;
  if (a.inputs().size() != b.inputs().size() || a.outputs().size() != b.outputs().size()) {
    throw PathSumError("circuits have different widths");
  }
  if (a.inputs().size() > kMaxWidth) throw PathSumError("equivalence check limited to 6 qubits");
  const qnum::Matrix ua = to_matrix(circuit_pathsum(a));
  const qnum::Matrix ub = to_matrix(circuit_pathsum(b));
  Verdict v;
  if (qnum::phase_distance(ua, ub) <= tol) {
    v.equivalent = true;
    return v;
  }
  const qnum::Complex overlap = (ua.adjoint() * ub).trace();
  const qnum::Complex phase =
      std::abs(overlap) > 1e-12 ? overlap / std::abs(overlap) : qnum::Complex(1, 0);
  const qnum::Matrix diff = ua * phase - ub;
  Eigen::Index worst = 0;
  diff.colwise().norm().maxCoeff(&worst);
  v.witness = static_cast<std::uint64_t>(worst);
  return v;
}

std::string to_string(const PathSum& p) {
  std::ostringstream s;
  s << "k=" << p.n_path << " m=" << p.phase.m() << " P=";
  if (p.phase.terms().empty()) s << "0";
  bool first = true;
  for (const auto& [m, c] : p.phase.terms()) {
    if (!first) s << "+";
    first = false;
    if (c != 1 || m == 0) s << c << (m ? "*" : "");
    if (m) s << mono_name(m, p.n_in);
  }
  s << " out=[";
  for (std::size_t i = 0; i < p.outs.size(); ++i) {
    if (i) s << ",";
    const auto& monos = p.outs[i].monomials();
    if (monos.empty()) s << "0";
    bool f = true;
    for (Mask m : monos) {
      if (!f) s << "+";
      f = false;
      s << mono_name(m, p.n_in);
    }
  }
  s << "]";
  return s.str();
}

}  // namespace qlang::pathsum

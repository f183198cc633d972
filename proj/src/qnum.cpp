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

#include "qlang/qnum.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace qlang::qnum {

namespace {

std::atomic<int> g_max_qubits{14};

const Complex kI{0.0, 1.0};

struct GateInfo {
  int arity;
  int params;
};

const std::map<std::string, GateInfo, std::less<>>& gate_table() {
  static const std::map<std::string, GateInfo, std::less<>> table = {
      {"I", {1, 0}},     {"H", {1, 0}},       {"X", {1, 0}},
      {"NOT", {1, 0}},   {"Z", {1, 0}},       {"S", {1, 0}},
      {"T", {1, 0}},     {"RX", {1, 1}},      {"RY", {1, 1}},
      {"RZ", {1, 1}},    {"CNOT", {2, 0}},    {"SWAP", {2, 0}},
      {"TOFFOLI", {3, 0}}, {"MS", {0, 1}},
  };
  return table;
}

}  // namespace

int max_qubits() { return g_max_qubits.load(); }

void set_max_qubits(int n) {
  if (n < 1 || n > 30) throw NumError("max qubits must lie in [1, 30]");
  g_max_qubits.store(n);
}

void check_width(int n_qubits) {
  if (n_qubits > max_qubits()) {
    throw NumError("register of " + std::to_string(n_qubits) +
                   " qubits exceeds the configured maximum of " +
                   std::to_string(max_qubits()));
  }
}

int log2_dim(Eigen::Index dim) {
  if (dim <= 0) return -1;
  const auto u = static_cast<std::uint64_t>(dim);
  if (!std::has_single_bit(u)) return -1;
  return std::countr_zero(u);
}

StateVector::StateVector(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 0) throw NumError("negative qubit count");
  check_width(n_qubits);
  amps_ = Vector::Zero(Eigen::Index{1} << n_qubits);
  amps_[0] = 1.0;
}

StateVector::StateVector(Vector amps) : amps_(std::move(amps)) {
  n_qubits_ = log2_dim(amps_.size());
  if (n_qubits_ < 0) throw NumError("state length is not a power of two");
  check_width(n_qubits_);
  if (!amps_.allFinite()) throw NumError("state has non-finite amplitudes");
  if (std::abs(amps_.squaredNorm() - 1.0) > kNormTol) {
    throw NumError("state is not normalized");
  }
}

StateVector StateVector::basis(int n_qubits, std::uint64_t index) {
  StateVector s(n_qubits);
  if (index >= static_cast<std::uint64_t>(s.dim())) {
    throw NumError("basis index out of range");
  }
  s.amps_[0] = 0.0;
  s.amps_[static_cast<Eigen::Index>(index)] = 1.0;
  return s;
}

int gate_arity(std::string_view name) {
  const auto& t = gate_table();
  auto it = t.find(name);
  return it == t.end() ? -1 : it->second.arity;
}

int gate_param_count(std::string_view name) {
  const auto& t = gate_table();
  auto it = t.find(name);
  return it == t.end() ? -1 : it->second.params;
}

Matrix ms_matrix(int n, double theta) {
  if (n < 1) throw NumError("MS gate needs at least one qubit");
  check_width(n);
  const Eigen::Index dim = Eigen::Index{1} << n;
  // (sum X_i)^2 is diagonal in the Hadamard basis with eigenvalue
  // (n - 2|x|)^2 on |x>.
  Vector phases(dim);
  for (Eigen::Index x = 0; x < dim; ++x) {
    const int s = n - 2 * std::popcount(static_cast<std::uint64_t>(x));
    phases[x] = std::exp(kI * (theta * s * s / 4.0));
  }
  const double scale = 1.0 / static_cast<double>(dim);
  Matrix m(dim, dim);
  for (Eigen::Index a = 0; a < dim; ++a) {
    for (Eigen::Index b = 0; b < dim; ++b) {
      Complex acc = 0.0;
      for (Eigen::Index x = 0; x < dim; ++x) {
        const int sign = std::popcount(static_cast<std::uint64_t>((a & x) ^ (b & x))) & 1;
        acc += sign ? -phases[x] : phases[x];
      }
      m(a, b) = acc * scale;
    }
  }
  return m;
}

Matrix gate_matrix(std::string_view name, std::span<const double> params,
                   int width) {
  const int expected = gate_param_count(name);
  if (expected < 0) throw NumError("unknown gate '" + std::string(name) + "'");
  if (static_cast<int>(params.size()) != expected) {
    throw NumError("gate '" + std::string(name) + "' takes " +
                   std::to_string(expected) + " parameter(s), got " +
                   std::to_string(params.size()));
  }
  const double r = 1.0 / std::sqrt(2.0);
  Matrix m;
  if (name == "I") {
    m = Matrix::Identity(2, 2);
  } else if (name == "H") {
    m.resize(2, 2);
    m << r, r, r, -r;
  } else if (name == "X" || name == "NOT") {
    m.resize(2, 2);
    m << 0, 1, 1, 0;
  } else if (name == "Z") {
    m.resize(2, 2);
    m << 1, 0, 0, -1;
  } else if (name == "S") {
    m.resize(2, 2);
    m << 1, 0, 0, kI;
  } else if (name == "T") {
    m.resize(2, 2);
    m << 1, 0, 0, std::exp(kI * (kPi / 4.0));
  } else if (name == "RX") {
    const double c = std::cos(params[0] / 2), s = std::sin(params[0] / 2);
    m.resize(2, 2);
    m << c, -kI * s, -kI * s, c;
  } else if (name == "RY") {
    const double c = std::cos(params[0] / 2), s = std::sin(params[0] / 2);
    m.resize(2, 2);
    m << c, -s, s, c;
  } else if (name == "RZ") {
    m.resize(2, 2);
    m << std::exp(-kI * (params[0] / 2)), 0, 0, std::exp(kI * (params[0] / 2));
  } else if (name == "CNOT") {
    m = Matrix::Zero(4, 4);
    m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
  } else if (name == "SWAP") {
    m = Matrix::Zero(4, 4);
    m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1.0;
  } else if (name == "TOFFOLI") {
    m = Matrix::Identity(8, 8);
    m(6, 6) = m(7, 7) = 0.0;
    m(6, 7) = m(7, 6) = 1.0;
  } else {  // MS
    m = ms_matrix(width == 0 ? 2 : width, params[0]);
  }
  return m;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  if (!a.allFinite() || !b.allFinite()) throw NumError("kron of non-finite operand");
  const int na = log2_dim(a.rows()), nb = log2_dim(b.rows());
  if (na >= 0 && nb >= 0) check_width(na + nb);
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

StateVector kron(const StateVector& a, const StateVector& b) {
  check_width(a.n_qubits() + b.n_qubits());
  Vector out(a.dim() * b.dim());
  for (Eigen::Index i = 0; i < a.dim(); ++i) {
    out.segment(i * b.dim(), b.dim()) = a[i] * b.amps();
  }
  return StateVector(std::move(out));
}

bool is_unitary(const Matrix& u, double tol) {
  if (u.rows() != u.cols() || !u.allFinite()) return false;
  const Matrix id = Matrix::Identity(u.rows(), u.cols());
  return (u.adjoint() * u - id).norm() <= tol;
}

Matrix controlled(const Matrix& u, Polarity polarity) {
  if (!is_unitary(u)) throw NumError("controlled() needs a unitary operand");
  const Eigen::Index d = u.rows();
  Matrix out = Matrix::Identity(2 * d, 2 * d);
  const Eigen::Index off = polarity == Polarity::kPositive ? d : 0;
  out.block(off, off, d, d) = u;
  return out;
}

StateVector apply(const StateVector& state, const Matrix& u,
                  std::span<const int> targets) {
  Vector out = state.amps();
  apply_inplace(out, state.n_qubits(), u, targets);
  return StateVector(std::move(out));
}

void apply_inplace(Vector& amps, int n, const Matrix& u,
                   std::span<const int> targets) {
  const int k = static_cast<int>(targets.size());
  if (u.rows() != u.cols() || u.rows() != (Eigen::Index{1} << k)) {
    throw NumError("matrix dimension does not match the number of targets");
  }
  std::uint64_t target_mask = 0;
  for (int t : targets) {
    if (t < 0 || t >= n) throw NumError("target wire " + std::to_string(t) + " out of range");
    const std::uint64_t bit = std::uint64_t{1} << (n - 1 - t);
    if (target_mask & bit) throw NumError("duplicate target wire " + std::to_string(t));
    target_mask |= bit;
  }
  const std::size_t sub = std::size_t{1} << k;
  std::vector<std::uint64_t> offset(sub, 0);
  for (std::size_t j = 0; j < sub; ++j) {
    for (int i = 0; i < k; ++i) {
      if ((j >> (k - 1 - i)) & 1U) offset[j] |= std::uint64_t{1} << (n - 1 - targets[i]);
    }
  }
  if (amps.size() != (Eigen::Index{1} << n)) throw NumError("amplitude vector length mismatch");
  Vector gathered(static_cast<Eigen::Index>(sub));
  Vector moved(static_cast<Eigen::Index>(sub));
  const std::uint64_t dim = std::uint64_t{1} << n;
  for (std::uint64_t base = 0; base < dim; ++base) {
    if (base & target_mask) continue;
    for (std::size_t j = 0; j < sub; ++j) {
      gathered[static_cast<Eigen::Index>(j)] = amps[static_cast<Eigen::Index>(base | offset[j])];
    }
    moved.noalias() = u * gathered;
    for (std::size_t j = 0; j < sub; ++j) {
      amps[static_cast<Eigen::Index>(base | offset[j])] = moved[static_cast<Eigen::Index>(j)];
    }
  }
}

Matrix with_controls(const Matrix& u, std::span<const Polarity> polarities) {
  Matrix out = u;
  for (auto it = polarities.rbegin(); it != polarities.rend(); ++it) {
    const Eigen::Index d = out.rows();
    Matrix next = Matrix::Identity(2 * d, 2 * d);
    const Eigen::Index off = *it == Polarity::kPositive ? d : 0;
    next.block(off, off, d, d) = out;
    out = std::move(next);
  }
  return out;
}

StateVector permute_wires(const StateVector& state, std::span<const int> order) {
  const int n = state.n_qubits();
  if (static_cast<int>(order.size()) != n) throw NumError("permutation has the wrong length");
  std::vector<bool> seen(n, false);
  for (int w : order) {
    if (w < 0 || w >= n || seen[w]) throw NumError("invalid wire permutation");
    seen[w] = true;
  }
  Vector out(state.dim());
  for (Eigen::Index i = 0; i < state.dim(); ++i) {
    std::uint64_t src = 0;
    for (int k = 0; k < n; ++k) {
      if ((static_cast<std::uint64_t>(i) >> (n - 1 - k)) & 1U) {
        src |= std::uint64_t{1} << (n - 1 - order[k]);
      }
    }
    out[i] = state[static_cast<Eigen::Index>(src)];
  }
  return StateVector(std::move(out));
}

double probability_one(const StateVector& state, int wire) {
  const int n = state.n_qubits();
  if (wire < 0 || wire >= n) throw NumError("wire " + std::to_string(wire) + " out of range");
  const std::uint64_t bit = std::uint64_t{1} << (n - 1 - wire);
  double p = 0.0;
  for (Eigen::Index i = 0; i < state.dim(); ++i) {
    if (static_cast<std::uint64_t>(i) & bit) p += std::norm(state[i]);
  }
  return std::clamp(p, 0.0, 1.0);
}

namespace {

StateVector project(const StateVector& state, int wire, int bit) {
  const int n = state.n_qubits();
  const std::uint64_t mask = std::uint64_t{1} << (n - 1 - wire);
  Vector v = state.amps();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const bool one = (static_cast<std::uint64_t>(i) & mask) != 0;
    if (one != (bit == 1)) v[i] = 0.0;
  }
  v /= v.norm();
  return StateVector(std::move(v));
}

}  // namespace

Measurement measure(const StateVector& state, int wire, RandomSource& rng) {
  constexpr double kNeverDraw = 1e-12;
  const double p1 = probability_one(state, wire);
  const double p0 = 1.0 - p1;
  int bit;
  if (p1 < kNeverDraw) {
    bit = 0;
  } else if (p0 < kNeverDraw) {
    bit = 1;
  } else {
    bit = rng.uniform() < p1 ? 1 : 0;
  }
  return {bit, project(state, wire, bit), bit ? p1 : p0};
}

StateVector discard(const StateVector& state, int wire, double tol) {
  const double p1 = probability_one(state, wire);
  int bit;
  if (p1 <= tol) {
    bit = 0;
  } else if (1.0 - p1 <= tol) {
    bit = 1;
  } else {
    throw NumError("cannot discard wire " + std::to_string(wire) +
                   ": not in a computational basis state");
  }
  const int n = state.n_qubits();
  const int low = n - 1 - wire;
  Vector v(state.dim() / 2);
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    const auto ju = static_cast<std::uint64_t>(j);
    const std::uint64_t hi = (ju >> low) << (low + 1);
    const std::uint64_t lo = ju & ((std::uint64_t{1} << low) - 1);
    v[j] = state[static_cast<Eigen::Index>(hi | (static_cast<std::uint64_t>(bit) << low) | lo)];
  }
  v /= v.norm();
  return StateVector(std::move(v));
}

StateVector append_qubit(const StateVector& state, int bit) {
  return kron(state, StateVector::basis(1, bit ? 1 : 0));
}

double phase_distance(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw NumError("phase_distance: shape mismatch");
  }
  const Complex overlap = (b.adjoint() * a).trace();
  const Complex phase = std::abs(overlap) > 0 ? overlap / std::abs(overlap) : Complex(1.0);
  return (a - phase * b).norm();
}

double phase_distance(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw NumError("phase_distance: length mismatch");
  const Complex overlap = b.dot(a);
  const Complex phase = std::abs(overlap) > 0 ? overlap / std::abs(overlap) : Complex(1.0);
  return (a - phase * b).norm();
}

Matrix HouseholderFactor::matrix() const {
  const Eigen::Index d = u.size();
  return Matrix::Identity(d, d) - a * (u * u.adjoint());
}

Vector HouseholderFactor::apply(const Vector& v) const {
  if (is_identity()) return v;
  return v - a * u * u.dot(v);
}

HouseholderFactor householder_factor(const Vector& col, Eigen::Index pivot) {
  const Eigen::Index d = col.size();
  if (pivot < 0 || pivot >= d) throw NumError("householder pivot out of range");
  const Vector x = col.tail(d - pivot);
  const double norm = x.norm();
  if (norm < kEqTol) throw NumError("householder_factor: zero active suffix");
  HouseholderFactor f;
  f.u = Vector::Zero(d);
  if (x.tail(x.size() - 1).norm() <= kEqTol * norm) return f;  // identity
  // alpha = -e^{i arg x0} |x| keeps v0 = x0 - alpha free of cancellation.
  const Complex x0 = x[0];
  const Complex phase = std::abs(x0) > 0 ? x0 / std::abs(x0) : Complex(1.0);
  Vector v = x;
  v[0] += phase * norm;
  v /= v.norm();
  f.u.tail(d - pivot) = v;
  f.a = 2.0;
  return f;
}

Complex parse_complex(std::string_view token) {
  std::string t(token);
  if (t.empty()) throw NumError("empty complex token");
  auto number = [&](const std::string& s, double if_empty) -> double {
    if (s.empty() || s == "+") return if_empty;
    if (s == "-") return -if_empty;
    std::size_t used = 0;
    double v;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw NumError("malformed complex token '" + t + "'");
    }
    if (used != s.size()) throw NumError("malformed complex token '" + t + "'");
    return v;
  };
  if (t.back() != 'i') return {number(t, 0.0), 0.0};
  const std::string body = t.substr(0, t.size() - 1);
  std::size_t split = std::string::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  if (split == std::string::npos) return {0.0, number(body, 1.0)};
  return {number(body.substr(0, split), 0.0), number(body.substr(split), 1.0)};
}

std::string format_complex(Complex z) {
  char buf[80];
  std::snprintf(buf, sizeof buf, "%.17g%+.17gi", z.real(), z.imag());
  return buf;
}

Matrix read_matrix(std::istream& in) {
  std::string word;
  long long n = 0;
  if (!(in >> word) || word != "dim" || !(in >> n) || n <= 0) {
    throw NumError("matrix text must start with 'dim N'");
  }
  Matrix m(n, n);
  for (long long i = 0; i < n; ++i) {
    for (long long j = 0; j < n; ++j) {
      std::string tok;
      if (!(in >> tok)) throw NumError("matrix text ended early");
      m(i, j) = parse_complex(tok);
    }
  }
  return m;
}

Matrix parse_matrix(std::string_view text) {
  std::istringstream in{std::string(text)};
  return read_matrix(in);
}

void write_matrix(std::ostream& out, const Matrix& m) {
  out << "dim " << m.rows() << "\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      out << format_complex(m(i, j));
    }
    out << "\n";
  }
}

}  // namespace qlang::qnum

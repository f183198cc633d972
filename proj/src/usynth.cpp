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

#include "qlang/usynth.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace qlang::usynth {

using circuit::Circuit;
using qnum::Complex;
using qnum::Vector;

namespace {

constexpr double kTwoPi = 2 * qnum::kPi;
constexpr double kSupportTol = 1e-15;

double wrap(double a) { return std::remainder(a, kTwoPi); }

bool same_phase(double a, double b) { return std::abs(wrap(a - b)) < 1e-12; }

int bit_of(std::uint64_t x, int q, int n) { return static_cast<int>((x >> (n - 1 - q)) & 1U); }

// Gray code g(j) = j ^ (j >> 1).
std::uint64_t gray(std::uint64_t j) { return j ^ (j >> 1); }

}  // namespace

Matrix HouseholderDecomp::reconstruct() const {
  const auto dim = static_cast<Eigen::Index>(phases.size());
  Matrix m = Matrix::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) m(i, i) = std::polar(1.0, phases[static_cast<std::size_t>(i)]);
  for (auto it = factors.rbegin(); it != factors.rend(); ++it) {
    for (Eigen::Index j = 0; j < dim; ++j) m.col(j) = it->apply(m.col(j));
  }
  return m;
}

HouseholderDecomp householder_qr(const Matrix& u, double tol) {
  if (u.rows() != u.cols() || u.rows() == 0) throw SynthError("matrix is not square");
  if (!qnum::is_unitary(u, tol)) throw SynthError("matrix is not unitary within tolerance");
  const Eigen::Index dim = u.rows();
  Matrix a = u;
  HouseholderDecomp d;
  for (Eigen::Index k = 0; k + 1 < dim; ++k) {
    const qnum::HouseholderFactor f = qnum::householder_factor(a.col(k), k);
    if (f.is_identity()) continue;
    for (Eigen::Index j = k; j < dim; ++j) a.col(j) = f.apply(a.col(j));
    d.factors.push_back(f);
  }
  for (Eigen::Index i = 0; i < dim; ++i) d.phases.push_back(std::arg(a(i, i)));
  return d;
}

void append_uc_rotation(Circuit& c, const std::string& axis, const std::vector<int>& controls,
                        int target, std::vector<double> angles, bool drop_last) {
  const int k = static_cast<int>(controls.size());
  const std::uint64_t count = std::uint64_t{1} << k;
  if (angles.size() != count) throw InternalError("multiplexor angle count");
  if (k == 0) {
    if (std::abs(wrap(angles[0])) > 1e-14) c.gate(axis, {target}, {angles[0]});
    return;
  }
  if (drop_last) {
    // X RY(pi - b)|0> = RY(b)|0>, so pre-compensate the branches whose first
    // control is set.
    for (std::uint64_t v = count / 2; v < count; ++v) angles[v] = qnum::kPi - angles[v];
  }
  // alpha_j = 2^-k sum_c (-1)^{|c & g(j)|} beta_c
  for (std::uint64_t j = 0; j < count; ++j) {
    double alpha = 0;
    for (std::uint64_t v = 0; v < count; ++v) {
      alpha += (std::popcount(v & gray(j)) & 1) ? -angles[v] : angles[v];
    }
    alpha /= static_cast<double>(count);
    // Rotations by multiples of 2 pi are global phases.
    if (std::abs(wrap(alpha)) > 1e-14) c.gate(axis, {target}, {alpha});
    const bool last = j + 1 == count;
    if (last && drop_last) break;
    const std::uint64_t flip = gray(j) ^ gray(last ? 0 : j + 1);
    const int bit = std::countr_zero(flip);
    c.gate("CNOT", {controls[static_cast<std::size_t>(k - 1 - bit)], target});
  }
}

void append_diagonal(Circuit& c, std::span<const double> phases, int n) {
  const std::uint64_t dim = std::uint64_t{1} << n;
  if (phases.size() != dim) throw InternalError("diagonal size");
  std::vector<int> rel;
  for (int q = 0; q < n; ++q) {
    const std::uint64_t b = std::uint64_t{1} << (n - 1 - q);
    for (std::uint64_t x = 0; x < dim; ++x) {
      if (!(x & b) && !same_phase(phases[x], phases[x | b])) {
        rel.push_back(q);
        break;
      }
    }
  }
  const int m = static_cast<int>(rel.size());
  if (m == 0) return;
  std::vector<double> psi(std::uint64_t{1} << m);
  for (std::uint64_t y = 0; y < psi.size(); ++y) {
    std::uint64_t x = 0;
    for (int i = 0; i < m; ++i) {
      if ((y >> (m - 1 - i)) & 1U) x |= std::uint64_t{1} << (n - 1 - rel[static_cast<std::size_t>(i)]);
    }
    psi[y] = phases[x];
  }
  // Peel the last relevant qubit: diag(p0, p1) = e^{i(p0+p1)/2} RZ(p1 - p0).
  for (int level = m; level >= 1; --level) {
    const std::uint64_t half = std::uint64_t{1} << (level - 1);
    std::vector<double> theta(half), rest(half);
    for (std::uint64_t v = 0; v < half; ++v) {
      const double p0 = psi[2 * v], p1 = psi[2 * v + 1];
      theta[v] = wrap(p1 - p0);
      rest[v] = p0 + theta[v] / 2;
    }
    const std::vector<int> controls(rel.begin(), rel.begin() + (level - 1));
    append_uc_rotation(c, "RZ", controls, rel[static_cast<std::size_t>(level - 1)], theta);
    psi = std::move(rest);
  }
}

namespace {

struct ReflectionParts {
  Circuit prep;                  // W on the free qubits
  std::vector<double> d_phases;  // D_u, depending on free qubits only
  std::vector<double> z_phases;  // phase (1 - a|u|^2) on the fixed basis state
};

ReflectionParts reflection_parts(const qnum::HouseholderFactor& f, int n) {
  const std::uint64_t dim = std::uint64_t{1} << n;
  if (static_cast<std::uint64_t>(f.u.size()) != dim) throw SynthError("factor size does not match width");
  const double norm = f.u.norm();
  const Vector u = f.u / norm;
  const Complex lambda = 1.0 - f.a * norm * norm;
  if (std::abs(std::abs(lambda) - 1) > 1e-8) throw SynthError("factor is not unitary");

  std::uint64_t all_and = ~std::uint64_t{0}, all_or = 0;
  for (std::uint64_t x = 0; x < dim; ++x) {
    if (std::abs(u[static_cast<Eigen::Index>(x)]) > kSupportTol) {
      all_and &= x;
      all_or |= x;
    }
  }
  const std::uint64_t fixed_mask = (all_and | ~all_or) & (dim - 1);
  const std::uint64_t fixed_val = all_and & fixed_mask;
  std::vector<int> free;
  for (int q = 0; q < n; ++q) {
    if (!(fixed_mask & (std::uint64_t{1} << (n - 1 - q)))) free.push_back(q);
  }

  ReflectionParts parts;
  parts.prep = Circuit::identity(n);
  // Magnitude-state cascade over the free qubits.
  auto mass = [&](int depth, std::uint64_t prefix) {
    double s = 0;
    for (std::uint64_t x = 0; x < dim; ++x) {
      if ((x & fixed_mask) != fixed_val) continue;
      std::uint64_t p = 0;
      for (int i = 0; i < depth; ++i) p = (p << 1) | static_cast<std::uint64_t>(bit_of(x, free[static_cast<std::size_t>(i)], n));
      if (p == prefix) s += std::norm(u[static_cast<Eigen::Index>(x)]);
    }
    return s;
  };
  for (std::size_t j = 0; j < free.size(); ++j) {
    const int depth = static_cast<int>(j);
    std::vector<double> beta(std::uint64_t{1} << depth);
    for (std::uint64_t v = 0; v < beta.size(); ++v) {
      const double p0 = mass(depth + 1, v << 1), p1 = mass(depth + 1, (v << 1) | 1U);
      beta[v] = 2 * std::atan2(std::sqrt(p1), std::sqrt(p0));
    }
    const std::vector<int> controls(free.begin(), free.begin() + depth);
    append_uc_rotation(parts.prep, "RY", controls, free[j], beta, true);
  }

  // Phases relative to what the cascade produced.
  qnum::Vector w = qnum::Vector::Zero(static_cast<Eigen::Index>(dim));
  w[0] = 1;
  for (const auto& op : parts.prep.ops()) {
    const auto& g = std::get<circuit::GateOp>(op);
    std::vector<int> wires(g.targets.begin(), g.targets.end());
    qnum::apply_inplace(w, n, circuit::gate_op_matrix(g), wires);
  }
  parts.d_phases.assign(dim, 0.0);
  for (std::uint64_t x = 0; x < dim; ++x) {
    const std::uint64_t src = (x & ~fixed_mask) | fixed_val;
    const Complex ux = u[static_cast<Eigen::Index>(src)];
    const Complex wx = w[static_cast<Eigen::Index>(src & ~fixed_mask)];
    if (std::abs(ux) > kSupportTol && std::abs(wx) > kSupportTol) {
      parts.d_phases[x] = std::arg(ux) - std::arg(wx);
    }
  }
  parts.z_phases.assign(dim, 0.0);
  parts.z_phases[fixed_val] = std::arg(lambda);
  return parts;
}

void append_ops(Circuit& dst, const Circuit& src) {
  for (const auto& op : src.ops()) dst.append(op);
}

}  // namespace

Circuit reflection_to_circuit(const qnum::HouseholderFactor& f, int n) {
  Circuit c = Circuit::identity(n);
  if (f.is_identity()) return c;
  const ReflectionParts p = reflection_parts(f, n);
  std::vector<double> neg(p.d_phases.size());
  std::transform(p.d_phases.begin(), p.d_phases.end(), neg.begin(), [](double a) { return -a; });
  append_diagonal(c, neg, n);
  append_ops(c, circuit::inverse(p.prep));
  append_diagonal(c, p.z_phases, n);
  append_ops(c, p.prep);
  append_diagonal(c, p.d_phases, n);
  return c;
}

SynthResult synth_householder(const Matrix& u, int max_qubits) {
  const int n = qnum::log2_dim(u.rows());
  if (n < 0 || u.rows() != u.cols()) throw SynthError("matrix dimension is not a power of two");
  if (n > max_qubits) {
    throw SynthError("width " + std::to_string(n) + " exceeds synthesis limit " + std::to_string(max_qubits));
  }
  qnum::check_width(n);
  const HouseholderDecomp d = householder_qr(u);
  const std::size_t dim = d.phases.size();

  // Time order: diag(phases), F_{N-2}, ..., F_0, with neighbouring diagonal
  // layers of adjacent reflections merged.
  Circuit c = Circuit::identity(n);
  std::vector<double> pending = d.phases;
  for (auto it = d.factors.rbegin(); it != d.factors.rend(); ++it) {
    const ReflectionParts p = reflection_parts(*it, n);
    for (std::size_t x = 0; x < dim; ++x) pending[x] -= p.d_phases[x];
    append_diagonal(c, pending, n);
    append_ops(c, circuit::inverse(p.prep));
    append_diagonal(c, p.z_phases, n);
    append_ops(c, p.prep);
    pending = p.d_phases;
  }
  append_diagonal(c, pending, n);

  SynthResult r{c, {}};
  const circuit::GateCount gc = circuit::gate_count(c);
  r.counts.cnots = gc.cnots;
  for (const auto& [name, k] : gc.per_gate) {
    if (name == "RX" || name == "RY" || name == "RZ") r.counts.rotations += k;
  }
  return r;
}

std::uint64_t ms_layer_lower_bound(int n) {
  if (n < 1) throw SynthError("MS layer bound needs n >= 1");
  if (n > 60) throw SynthError("MS layer bound limited to n <= 60");
  const std::uint64_t num = (std::uint64_t{1} << (n + 1)) - 2 * static_cast<std::uint64_t>(n) - 2;
  const std::uint64_t den = 2 * static_cast<std::uint64_t>(n) + 1;
  return (num + den - 1) / den;
}

Matrix ms_gate(int n, double theta) {
  if (n > 6) throw SynthError("MS gate limited to 6 qubits");
  return qnum::ms_matrix(n, theta);
}

namespace {

// Normalized n-fold Hadamard, real.
const Eigen::MatrixXd& hadamard_n(int n) {
  static thread_local std::vector<Eigen::MatrixXd> cache;
  if (cache.size() <= static_cast<std::size_t>(n)) cache.resize(static_cast<std::size_t>(n) + 1);
  Eigen::MatrixXd& h = cache[static_cast<std::size_t>(n)];
  if (h.size() == 0) {
    const Eigen::Index dim = Eigen::Index{1} << n;
    h.resize(dim, dim);
    const double s = 1.0 / std::sqrt(static_cast<double>(dim));
    for (Eigen::Index a = 0; a < dim; ++a)
      for (Eigen::Index b = 0; b < dim; ++b)
        h(a, b) = (std::popcount(static_cast<std::uint64_t>(a & b)) & 1) ? -s : s;
  }
  return h;
}

}  // namespace

Matrix ansatz_eval(const IonAnsatz& a) {
  if (a.n < 1 || a.n > 6) throw SynthError("ansatz width must be in 1..6");
  if (a.layers < 0) throw SynthError("negative layer count");
  if (static_cast<int>(a.theta.size()) != IonAnsatz::param_count(a.n, a.layers)) {
    throw SynthError("ansatz expects " + std::to_string(IonAnsatz::param_count(a.n, a.layers)) +
                     " parameters, got " + std::to_string(a.theta.size()));
  }
  const int n = a.n;
  const Eigen::Index dim = Eigen::Index{1} << n;
  // Local columns alternate between Rz (even) and Ry (odd); the first
  // column is even.
  auto rz_column = [&](const double* phi) {
    Vector d(dim);
    for (Eigen::Index x = 0; x < dim; ++x) {
      double s = 0;
      for (int q = 0; q < n; ++q) s += (bit_of(static_cast<std::uint64_t>(x), q, n) ? 0.5 : -0.5) * phi[q];
      d[x] = std::polar(1.0, s);
    }
    return d;
  };
  auto ry_column = [&](const double* phi) {
    Matrix k = Matrix::Identity(1, 1);
    for (int q = 0; q < n; ++q) {
      const double c = std::cos(phi[q] / 2), s = std::sin(phi[q] / 2);
      Matrix r(2, 2);
      r << c, -s, s, c;
      k = qnum::kron(k, r);
    }
    return k;
  };
  const Eigen::MatrixXd& h = hadamard_n(n);
  const double* first = a.theta.data() + static_cast<std::ptrdiff_t>(a.layers) * (n + 1);
  Matrix m = rz_column(first).asDiagonal();
  for (int l = 0; l < a.layers; ++l) {
    const double* p = a.theta.data() + static_cast<std::ptrdiff_t>(l) * (n + 1);
    Vector ms(dim);
    for (Eigen::Index x = 0; x < dim; ++x) {
      const int s = n - 2 * std::popcount(static_cast<std::uint64_t>(x));
      ms[x] = std::polar(1.0, p[0] * s * s / 4.0);
    }
    m = h * (ms.asDiagonal() * (h * m));
    if (l % 2 == 0) {
      m = ry_column(p + 1) * m;
    } else {
      m = rz_column(p + 1).asDiagonal() * m;
    }
  }
  return m;
}

double synthesis_error(const Matrix& target, const Matrix& a) {
  if (target.rows() != a.rows() || target.cols() != a.cols()) throw SynthError("shape mismatch");
  const double f = std::abs((target.adjoint() * a).trace()) / static_cast<double>(target.rows());
  return std::clamp(1.0 - f, 0.0, 1.0);
}

std::vector<double> fd_gradient(const Objective& f, std::span<const double> x, double h) {
  std::vector<double> p(x.begin(), x.end()), g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    p[i] = x[i] + h;
    const double fp = f(p);
    p[i] = x[i] - h;
    const double fm = f(p);
    p[i] = x[i];
    g[i] = (fp - fm) / (2 * h);
  }
  return g;
}

std::vector<double> fd_gradient5(const Objective& f, std::span<const double> x, double h) {
  std::vector<double> p(x.begin(), x.end()), g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double v[4];
    const double offs[4] = {2 * h, h, -h, -2 * h};
    for (int k = 0; k < 4; ++k) {
      p[i] = x[i] + offs[k];
      v[k] = f(p);
    }
    p[i] = x[i];
    g[i] = (-v[0] + 8 * v[1] - 8 * v[2] + v[3]) / (12 * h);
  }
  return g;
}

BfgsResult bfgs_minimize(const Objective& f, std::vector<double> x0, const BfgsOptions& opts) {
  const auto dim = static_cast<Eigen::Index>(x0.size());
  Eigen::VectorXd x = Eigen::Map<Eigen::VectorXd>(x0.data(), dim);
  auto eval = [&](const Eigen::VectorXd& v) { return f(std::span<const double>(v.data(), v.size())); };
  auto grad = [&](const Eigen::VectorXd& v) {
    const std::vector<double> g = fd_gradient(f, std::span<const double>(v.data(), v.size()), opts.fd_step);
    return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(g.data(), dim));
  };
  double fx = eval(x);
  Eigen::VectorXd g = grad(x);
  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(dim, dim);
  bool fresh = true;
  BfgsResult r;
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    if (dim == 0 || g.lpNorm<Eigen::Infinity>() < opts.grad_tol) {
      r.converged = true;
      break;
    }
    Eigen::VectorXd p = -hinv * g;
    double slope = g.dot(p);
    if (slope >= 0) {
      hinv.setIdentity();
      fresh = true;
      p = -g;
      slope = g.dot(p);
    }
    double t = 1.0;
    Eigen::VectorXd xn;
    double fn = 0;
    bool accepted = false;
    for (int k = 0; k < 60; ++k) {
      xn = x + t * p;
      fn = eval(xn);
      if (fn <= fx + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      if (fresh) break;  // no progress even along the gradient
      hinv.setIdentity();
      fresh = true;
      continue;
    }
    const Eigen::VectorXd gn = grad(xn);
    const Eigen::VectorXd s = xn - x, y = gn - g;
    const double sy = s.dot(y);
    if (sy > 1e-14) {
      if (fresh) hinv *= sy / y.squaredNorm();
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd i = Eigen::MatrixXd::Identity(dim, dim);
      hinv = (i - rho * s * y.transpose()) * hinv * (i - rho * y * s.transpose()) + rho * s * s.transpose();
      fresh = false;
    }
    x = xn;
    fx = fn;
    g = gn;
  }
  r.theta.assign(x.data(), x.data() + dim);
  r.error = fx;
  r.iterations = it;
  return r;
}

BfgsResult bfgs_synth(const Matrix& target, int layers, RandomSource& rng, const BfgsOptions& opts) {
  const int n = qnum::log2_dim(target.rows());
  if (n < 1 || target.rows() != target.cols()) throw SynthError("target dimension is not a power of two");
  if (layers < 0) throw SynthError("negative layer count");
  if (!qnum::is_unitary(target, 1e-8)) throw SynthError("target is not unitary");
  IonAnsatz a{n, layers, {}};
  const Objective f = [&](std::span<const double> th) {
    a.theta.assign(th.begin(), th.end());
    return synthesis_error(target, ansatz_eval(a));
  };
  BfgsResult best;
  const int count = IonAnsatz::param_count(n, layers);
  for (int r = 0; r < std::max(1, opts.restarts); ++r) {
    std::vector<double> x0(static_cast<std::size_t>(count));
    for (double& v : x0) v = qnum::kPi * (2 * rng.uniform() - 1);
    BfgsResult res = bfgs_minimize(f, std::move(x0), opts);
    if (r == 0 || res.error < best.error) best = std::move(res);
  }
  return best;
}

}  // namespace qlang::usynth

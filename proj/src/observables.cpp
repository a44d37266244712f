// Copyright 2026 The hlaser Authors
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

#include "hlaser/observables.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <array>
#include <cmath>

#include "hlaser/error.hpp"

namespace hlaser {

BandVector apply_annihilation(const CavityOperators& ops, const BandVector& v) {
  const int D = ops.dim();
  const int k = v.band;
  BandVector out;
  out.band = k + 1;
  if (k >= 0) {
    const int n = D - k - 1;
    out.x.assign(std::max(n, 0), 0.0);
    for (int i = 0; i < n; ++i) out.x[i] = ops.L(i + 1) * v.x[i + 1];
  } else {
    const int kp = -k;
    const int n = D - kp + 1;
    out.x.assign(n, 0.0);
    for (int i = 0; i + kp <= D - 1; ++i) out.x[i] = ops.L(i + kp) * v.x[i];
  }
  return out;
}

BandVector apply_creation(const CavityOperators& ops, const BandVector& v) {
  const int D = ops.dim();
  const int k = v.band;
  BandVector out;
  out.band = k - 1;
  if (k >= 1) {
    const int n = D - k + 1;
    out.x.assign(n, 0.0);
    for (int i = 0; i + k <= D - 1; ++i) out.x[i] = v.x[i] * ops.L(i + k);
  } else {
    const int kp = -k;
    const int n = D - kp - 1;
    out.x.assign(std::max(n, 0), 0.0);
    for (int i = 0; i < n; ++i) out.x[i] = v.x[i + 1] * ops.L(i + 1);
  }
  return out;
}

double band_trace(const BandVector& v) {
  if (v.band != 0) return 0.0;
  double s = 0.0;
  for (double x : v.x) s += x;
  return s;
}

std::vector<double> steady_state(const BandLiouvillian& liou) {
  return kernel_vector(liou.block(0), !liou.params.is_markovian());
}

double flux(const BandLiouvillian& liou, const std::vector<double>& rho_ss) {
  return compute_flux(liou.ops, rho_ss);
}

double coherence(const BandLiouvillian& liou) {
  const auto& ops = liou.ops;
  const int D = liou.dim();
  const BandMatrix& b1 = liou.block(1);
  BandLU lu(b1);
  if (lu.singular() || lu.rcond() < 1e-15)
    raise(ErrorKind::SingularBandOne, "band-1 block is numerically singular");
  std::vector<double> v(D - 1), w(D - 1);
  for (int m = 0; m < D - 1; ++m) {
    v[m] = ops.L(m + 1) * liou.rho_ss[m + 1];
    w[m] = ops.L(m + 1);
  }
  auto y = lu.solve(v);
  double s = 0.0;
  for (int m = 0; m < D - 1; ++m) s += w[m] * y[m];
  return -2.0 * s;
}

namespace {

// Solve L0 y = chi with 1^T y = 0, for traceless chi.
std::vector<double> deflated_solve(const BandLiouvillian& liou, const std::vector<double>& chi,
                                   double* residual) {
  const BandMatrix& b0 = liou.block(0);
  const int n = b0.size();
  const int r = n / 2;
  BandLU lu(b0.without(r));
  if (lu.singular() || lu.pivot_ratio() < 1e-13)
    raise(ErrorKind::DegenerateKernel, "band-0 kernel is not one-dimensional");
  std::vector<double> rhs(n - 1);
  for (int i = 0, ii = 0; i < n; ++i)
    if (i != r) rhs[ii++] = chi[i];
  auto z = lu.solve(rhs);
  std::vector<double> y(n);
  for (int i = 0, ii = 0; i < n; ++i) y[i] = (i == r) ? 0.0 : z[ii++];
  double s = 0.0;
  for (double v : y) s += v;
  for (int i = 0; i < n; ++i) y[i] -= s * liou.rho_ss[i];
  if (residual) {
    auto ly = b0.apply(y);
    double m = 0.0, cm = 0.0;
    for (int i = 0; i < n; ++i) {
      m = std::max(m, std::abs(ly[i] - chi[i]));
      cm = std::max(cm, std::abs(chi[i]));
    }
    *residual = cm > 0.0 ? m / cm : m;
  }
  return y;
}

std::vector<double> jump_band0(const CavityOperators& ops, const std::vector<double>& x) {
  const int D = ops.dim();
  std::vector<double> y(D, 0.0);
  for (int m = 0; m + 1 < D; ++m) y[m] = ops.L(m + 1) * ops.L(m + 1) * x[m + 1];
  return y;
}

double mandel_q_impl(const BandLiouvillian& liou, double* residual) {
  const auto& ops = liou.ops;
  const int D = liou.dim();
  const double F = liou.flux;
  auto chi = jump_band0(ops, liou.rho_ss);
  for (int m = 0; m < D; ++m) chi[m] -= F * liou.rho_ss[m];
  auto y = deflated_solve(liou, chi, residual);
  double s = 0.0;
  for (int m = 1; m < D; ++m) s += ops.L(m) * ops.L(m) * y[m];
  return -2.0 / F * s;
}

}  // namespace

double mandel_q(const BandLiouvillian& liou) { return mandel_q_impl(liou, nullptr); }

double mandel_q_discrete(const BandLiouvillian& liou, double gamma) {
  const int D = liou.dim();
  TransferSet ts = build_transfer(liou.ops, gamma);
  Eigen::MatrixXd T = ts.block(0).to_dense();
  Eigen::VectorXd rho = Eigen::Map<const Eigen::VectorXd>(liou.rho_ss.data(), D);
  Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(D, D) - rho * Eigen::RowVectorXd::Ones(D);
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(D, D) - Q * T * Q;
  auto jr = jump_band0(liou.ops, liou.rho_ss);
  Eigen::VectorXd v = M.partialPivLu().solve(Eigen::Map<Eigen::VectorXd>(jr.data(), D));
  std::vector<double> vv(v.data(), v.data() + D);
  auto jv = jump_band0(liou.ops, vv);
  double s = 0.0;
  for (double x : jv) s += x;
  return 2.0 * gamma * s / liou.flux;
}

BeamObservables observe(const BandLiouvillian& liou) {
  BeamObservables o;
  o.params = liou.params;
  o.dim = liou.dim();
  o.flux = liou.flux;
  o.coherence = coherence(liou);
  o.linewidth = 4.0 * o.flux / o.coherence;
  double res = 0.0;
  o.mandel_q = mandel_q_impl(liou, &res);
  // Steady-state residual relative to the largest block entry.
  auto r = liou.block(0).apply(liou.rho_ss);
  double m = 0.0;
  for (double v : r) m = std::max(m, std::abs(v));
  o.solver_residual = std::max(res, m / liou.block(0).max_abs());
  return o;
}

BeamDynamics::BeamDynamics(const BandLiouvillian& liou, ExpmOptions opts)
    : liou_(liou), opts_(opts), props_(liou.blocks.size()) {}

const ExpAction& BeamDynamics::propagator(int band) const {
  const int a = std::abs(band);
  std::lock_guard<std::mutex> lock(mu_);
  if (a >= static_cast<int>(props_.size()))
    raise(ErrorKind::InconsistentInputs, "band " + std::to_string(band) + " not built");
  if (!props_[a]) props_[a] = std::make_unique<ExpAction>(liou_.block(a), opts_);
  return *props_[a];
}

BandVector BeamDynamics::evolve(const BandVector& v, double t) const {
  if (t == 0.0) return v;
  return BandVector{v.band, propagator(v.band).apply(t, v.x)};
}

double BeamDynamics::g1(double s) const {
  BandVector v{0, liou_.rho_ss};
  v = apply_annihilation(liou_.ops, v);
  v = evolve(v, std::abs(s));
  v = apply_creation(liou_.ops, v);
  return band_trace(v) / liou_.flux;
}

double BeamDynamics::g2(double s, double s2, double t2, double t) const {
  std::array<std::pair<double, bool>, 4> ev{{{s, false}, {s2, false}, {t2, true}, {t, true}}};
  std::stable_sort(ev.begin(), ev.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  BandVector v{0, liou_.rho_ss};
  double prev = ev[0].first;
  for (const auto& [time, ann] : ev) {
    v = evolve(v, time - prev);
    v = ann ? apply_annihilation(liou_.ops, v) : apply_creation(liou_.ops, v);
    prev = time;
  }
  return band_trace(v) / (liou_.flux * liou_.flux);
}

CorrelationTrace g1_trace(const BandLiouvillian& liou, const std::vector<double>& times,
                          ExpmOptions opts) {
  BeamDynamics dyn(liou, opts);
  CorrelationTrace tr;
  tr.kind = TraceKind::G1;
  tr.times = times;
  for (double s : times) {
    if (s < 0.0) raise(ErrorKind::InvalidParams, "g1 trace times must be >= 0");
    tr.values.push_back(dyn.g1(s));
  }
  return tr;
}

CorrelationTrace g2ps_trace(const BandLiouvillian& liou, const std::vector<double>& times,
                            ExpmOptions opts) {
  BeamDynamics dyn(liou, opts);
  CorrelationTrace tr;
  tr.kind = TraceKind::G2ps;
  tr.times = times;
  for (double s : times) tr.values.push_back(dyn.g2ps(s));
  return tr;
}

double g2_general(const BandLiouvillian& liou, double s, double s2, double t2, double t,
                  ExpmOptions opts) {
  return BeamDynamics(liou, opts).g2(s, s2, t2, t);
}

QFromG2 mandel_q_from_g2(const BandLiouvillian& liou, double horizon, double tail_tol) {
  if (!(horizon > 0.0)) raise(ErrorKind::HorizonTooShort, "horizon must be > 0");
  const int D = liou.dim();
  const double F = liou.flux;
  const auto& ops = liou.ops;
  auto chi = jump_band0(ops, liou.rho_ss);
  for (int m = 0; m < D; ++m) chi[m] -= F * liou.rho_ss[m];
  ExpAction prop(liou.block(0));
  // g2ps(s) - 1 = (1| J exp(L0 s) chi / F^2
  auto f = [&](double s) {
    auto y = prop.apply(s, chi);
    double acc = 0.0;
    for (int m = 1; m < D; ++m) acc += ops.L(m) * ops.L(m) * y[m];
    return acc / (F * F);
  };
  QFromG2 out;
  out.horizon = horizon;
  double err = 0.0;
  const double integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, 0.0, horizon, 20, 1e-10, &err);
  out.q = 2.0 * F * integral;
  out.quadrature_error = 2.0 * F * err;
  const double fh = f(horizon), fh2 = f(0.5 * horizon);
  double tail;
  if (fh == 0.0) {
    tail = 0.0;
  } else if (fh * fh2 > 0.0 && std::abs(fh) < std::abs(fh2)) {
    const double kappa = 2.0 * std::log(std::abs(fh2) / std::abs(fh)) / horizon;
    tail = 2.0 * F * std::abs(fh) / kappa;
  } else {
    tail = 2.0 * F * std::abs(fh) * horizon;
  }
  out.tail_estimate = tail;
  if (tail > tail_tol)
    raise(ErrorKind::HorizonTooShort, "tail estimate " + std::to_string(tail) +
                                          " exceeds budget at horizon " + std::to_string(horizon));
  return out;
}

QFromG2 mandel_q_from_g2_auto(const BandLiouvillian& liou, double tail_tol) {
  double h = static_cast<double>(liou.dim()) * liou.dim();
  for (int it = 0; it < 12; ++it, h *= 2.0) {
    try {
      return mandel_q_from_g2(liou, h, tail_tol);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::HorizonTooShort) throw;
    }
  }
  return mandel_q_from_g2(liou, h, tail_tol);
}

}  // namespace hlaser

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

#include "hlaser/analytics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "hlaser/error.hpp"
#include "hlaser/superop.hpp"

namespace hlaser {

using std::numbers::pi;

void IdealBeam::validate() const {
  if (!(flux > 0.0) || !(linewidth > 0.0))
    raise(ErrorKind::InvalidParams, "ideal beam needs flux > 0 and linewidth > 0");
}

double ideal_g1(const IdealBeam& beam, double s) {
  return std::exp(-0.5 * beam.linewidth * std::abs(s));
}

double ideal_g2(const IdealBeam& beam, double s, double s2, double t2, double t) {
  const double v = std::abs(t - s) + std::abs(t - s2) + std::abs(t2 - s) + std::abs(t2 - s2) -
                   std::abs(t - t2) - std::abs(s - s2);
  return std::exp(-0.5 * beam.linewidth * v);
}

namespace {

// Average of cos(sum_i c_i phi(t_i)) with phi = sqrt(l) W. Only differences
// matter since sum_i c_i = 0, so the path starts at the earliest time.
template <std::size_t N>
McEstimate mc_phase(const IdealBeam& beam, std::array<double, N> times,
                    std::array<double, N> coef, int paths, std::uint64_t seed) {
  std::array<std::size_t, N> order;
  for (std::size_t i = 0; i < N; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return times[a] < times[b]; });
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double amp = std::sqrt(beam.linewidth);
  double sum = 0.0, sum2 = 0.0;
  for (int p = 0; p < paths; ++p) {
    double w = 0.0, phase = 0.0, prev = times[order[0]];
    for (std::size_t j = 0; j < N; ++j) {
      const double tj = times[order[j]];
      w += std::sqrt(tj - prev) * normal(rng);
      prev = tj;
      phase += coef[order[j]] * amp * w;
    }
    const double c = std::cos(phase);
    sum += c;
    sum2 += c * c;
  }
  McEstimate e;
  e.mean = sum / paths;
  const double var = std::max(0.0, sum2 / paths - e.mean * e.mean);
  e.stderr_ = std::sqrt(var / paths);
  return e;
}

}  // namespace

McEstimate mc_ideal_g1(const IdealBeam& beam, double s, int paths, std::uint64_t seed) {
  beam.validate();
  return mc_phase<2>(beam, {s, 0.0}, {-1.0, 1.0}, paths, seed);
}

McEstimate mc_ideal_g2(const IdealBeam& beam, double s, double s2, double t2, double t,
                       int paths, std::uint64_t seed) {
  beam.validate();
  return mc_phase<4>(beam, {s, s2, t2, t}, {-1.0, -1.0, 1.0, 1.0}, paths, seed);
}

const char* regime_name(FnRegime r) {
  return r == FnRegime::EdgeDominated ? "edge-dominated" : "center-dominated";
}

double fn_taylor_element(double p, int dim, int n) {
  if (n <= 1 || n >= dim - 1) return 0.0;
  const double x = pi * (n + 1) / (dim + 1);
  const double cot = std::cos(x) / std::sin(x);
  const double pre = std::pow(pi, 4.5) * p * p / (8.0 * std::pow(dim + 1.0, 5)) *
                     std::exp(std::lgamma(0.5 * (2.0 + p)) - std::lgamma(0.5 * (1.0 + p)));
  const double b = 1.0 + cot * cot;
  return -pre * b * b * std::pow(std::sin(x), p);
}

double fn_closed_form_plambda(const std::vector<double>& rho, double lambda, int n) {
  const double a = std::pow(rho[n - 1] / rho[n], 0.5 * (1.0 - lambda)) -
                   std::pow(rho[n] / rho[n + 1], 0.5 * (1.0 - lambda));
  const double b = std::pow(rho[n + 1] / rho[n], 0.5 * lambda) -
                   std::pow(rho[n + 2] / rho[n + 1], 0.5 * lambda);
  return -0.5 * std::sqrt(rho[n] * rho[n + 1]) * (a * a + b * b);
}

double fn_closed_form_pq(const std::vector<double>& rho, double q, int n) {
  const double e = 0.25 * (2.0 + q);
  const double a = std::pow(rho[n - 1] / rho[n], e) - std::pow(rho[n] / rho[n + 1], e);
  return -0.5 * std::sqrt(rho[n] * rho[n + 1]) * a * a;
}

namespace {

std::vector<double> pure_state_band1(const std::vector<double>& rho) {
  std::vector<double> u(rho.size() - 1);
  for (std::size_t m = 0; m + 1 < rho.size(); ++m) u[m] = std::sqrt(rho[m] * rho[m + 1]);
  return u;
}

double taylor_factor(const ModelParams& params) {
  switch (params.family) {
    case Family::P: return 1.0;
    case Family::PLambda:
      return 2.0 * params.lambda * params.lambda - 2.0 * params.lambda + 1.0;
    case Family::PQ: return (1.0 + 0.5 * params.q) * (1.0 + 0.5 * params.q);
  }
  return 1.0;
}

}  // namespace

FnSum fn_elements(const ModelParams& params) {
  params.validate();
  const int D = params.dim;
  CavityOperators ops = build_operators(params);
  const auto& r = ops.rho;
  FnSum out;
  out.family = params.family;
  if (params.family == Family::P) {
    out.elements.assign(D, 0.0);
    out.elements[1] = -r[0] * r[0] / (2.0 * r[1]);
    for (int n = 2; n < D - 1; ++n) {
      const double d = std::sqrt(r[n - 2] / r[n - 1]) - std::sqrt(r[n - 1] / r[n]);
      out.elements[n] = -0.5 * r[n - 1] * d * d;
    }
    // Top level: the loss term carries the same sign as the interior ones.
    const double d = std::sqrt(r[D - 3] / r[D - 2]) - std::sqrt(r[D - 2] / r[D - 1]);
    out.elements[D - 1] = -0.5 * r[D - 2] * d * d - 0.5 * r[D - 2];
  } else {
    BandMatrix b1 = liouvillian_block(ops, params, 1);
    out.elements = b1.apply(pure_state_band1(r));
  }
  const double fac = taylor_factor(params);
  out.approx_elements.assign(out.elements.size(), 0.0);
  for (std::size_t n = 0; n < out.elements.size(); ++n)
    out.approx_elements[n] = fac * fn_taylor_element(params.p, D, static_cast<int>(n));
  for (double v : out.elements) out.total += v;
  for (double v : out.approx_elements) out.approx_total += v;
  // Two outermost elements at each end against everything in between.
  const std::size_t m = out.elements.size();
  double edge = 0.0, center = 0.0;
  for (std::size_t n = 0; n < m; ++n) {
    if (n < 2 || n + 2 >= m)
      edge += std::abs(out.elements[n]);
    else
      center += out.elements[n];
  }
  out.regime = edge > std::abs(center) ? FnRegime::EdgeDominated : FnRegime::CenterDominated;
  return out;
}

double linewidth_ansatz(const ModelParams& params) {
  params.validate();
  CavityOperators ops = build_operators(params);
  BandMatrix b1 = liouvillian_block(ops, params, 1);
  auto y = b1.apply(pure_state_band1(ops.rho));
  double s = 0.0;
  for (double v : y) s += v;
  return -2.0 * s;
}

double coherence_prefactor(double p) {
  if (!(p > 3.0)) raise(ErrorKind::OutOfDomain, "closed form needs p > 3 (fourth-power regime)");
  const double lg = std::lgamma(0.5 * (p + 1.0)) + std::lgamma(0.5 * (p - 2.0)) -
                    std::lgamma(0.5 * (p + 2.0)) - std::lgamma(0.5 * (p - 3.0));
  return 256.0 / (std::pow(pi, 4) * p * p) * std::exp(lg);
}

double family_divisor(const ModelParams& params) {
  switch (params.family) {
    case Family::P: return 1.0;
    case Family::PLambda:
      return 2.0 * (params.lambda - 0.5) * (params.lambda - 0.5) + 0.5;
    case Family::PQ: return (1.0 + 0.5 * params.q) * (1.0 + 0.5 * params.q);
  }
  return 1.0;
}

double coherence_formula(const ModelParams& params) {
  params.validate();
  const double mu = params.mu();
  return coherence_prefactor(params.p) * mu * mu * mu * mu / family_divisor(params);
}

double optimal_p() {
  auto neg = [](double p) { return -coherence_prefactor(p); };
  auto r = boost::math::tools::brent_find_minima(neg, 3.5, 6.0, 50);
  return r.first;
}

double heisenberg_bound(double mu) {
  if (!(mu > 0.0)) raise(ErrorKind::InvalidParams, "mu must be > 0");
  const double z = std::abs(kAiryZero / 3.0);
  return 4.0 * z * z * z / (mu * mu);
}

double mse_optimal_window(const IdealBeam& beam) {
  beam.validate();
  return std::sqrt(1.5 / (beam.flux * beam.linewidth));
}

double mse_full_window(const IdealBeam& beam) {
  beam.validate();
  const double c = 4.0 * beam.flux / beam.linewidth;
  return std::sqrt(1.5 * c) / beam.flux;
}

double mse_asymptote(const IdealBeam& beam) {
  beam.validate();
  return 2.0 * std::sqrt(2.0 * beam.linewidth / (3.0 * beam.flux));
}

namespace {

double mse_combine(const IdealBeam& beam, double tau, double I, double IminusK) {
  const double N = beam.flux;
  const double IplusK = 2.0 * I - IminusK;
  return 1.0 / (2.0 * N * N * tau * tau) + I / (N * tau * tau * tau) +
         IminusK * IplusK / (2.0 * tau * tau * tau * tau);
}

}  // namespace

MseResult retrofiltering_mse_ideal(const IdealBeam& beam, double tau) {
  beam.validate();
  if (!(tau > 0.0)) raise(ErrorKind::InvalidParams, "tau must be > 0");
  using boost::math::quadrature::gauss_kronrod;
  const double a = 0.5 * beam.linewidth;
  // First-order term: int_0^tau int_0^tau g1 = 2 int_0^tau (tau - u) e^{-a u} du.
  const double I = 2.0 * gauss_kronrod<double, 61>::integrate(
                             [&](double u) { return (tau - u) * std::exp(-a * u); }, 0.0, tau, 15,
                             1e-14);
  // Second-order terms factorise into I^2 - K^2 with
  // K = int int exp(-a (x + y + 2 min(x, y))); I - K is integrated directly.
  auto inner = [&](double x) {
    return gauss_kronrod<double, 61>::integrate(
        [&](double y) { return std::exp(-a * (x + 3.0 * y)) * std::expm1(4.0 * a * y); }, 0.0, x,
        15, 1e-14);
  };
  const double IminusK = 2.0 * gauss_kronrod<double, 61>::integrate(inner, 0.0, tau, 15, 1e-13);
  MseResult r;
  r.value = mse_combine(beam, tau, I, IminusK);
  r.asymptote = mse_asymptote(beam);
  r.in_window = beam.linewidth * tau < 0.1 && beam.flux * tau > 10.0;
  return r;
}

double retrofiltering_mse_closed_form(const IdealBeam& beam, double tau) {
  beam.validate();
  const double a = 0.5 * beam.linewidth;
  const double I = 2.0 * (tau / a + std::expm1(-a * tau) / (a * a));
  const double K = 2.0 / (3.0 * a) * (-std::expm1(-a * tau) / a + std::expm1(-4.0 * a * tau) / (4.0 * a));
  return mse_combine(beam, tau, I, I - K);
}

double retrofiltering_mse_bruteforce(const IdealBeam& beam, double tau, int n) {
  beam.validate();
  const double N = beam.flux;
  const double h = tau / n;
  std::vector<double> pos(n), neg(n);
  for (int i = 0; i < n; ++i) {
    pos[i] = (i + 0.5) * h;
    neg[i] = -(i + 0.5) * h;
  }
  double g1sum = 0.0;
  for (double s : pos)
    for (double t : pos) g1sum += ideal_g1(beam, s - t);
  const double g1int = g1sum * h * h;
  double caseA = 0.0, caseB = 0.0;
  for (double s : pos)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          // s in [0,tau], s' in [-tau,0], t' in [0,tau], t in [-tau,0]
          caseA += ideal_g2(beam, s, neg[j], pos[k], neg[l]);
          // s, s' in [0,tau], t', t in [-tau,0]
          caseB += ideal_g2(beam, s, pos[j], neg[k], neg[l]);
        }
  const double h4 = h * h * h * h;
  return 1.0 / (2.0 * N * N * tau * tau) + g1int / (N * tau * tau * tau) +
         (caseA - caseB) * h4 / (2.0 * tau * tau * tau * tau);
}

}  // namespace hlaser

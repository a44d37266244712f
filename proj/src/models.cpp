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

#include "hlaser/models.hpp"

#include <cmath>
#include <numbers>

#include "hlaser/error.hpp"

namespace hlaser {

const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::InconsistentInputs: return "InconsistentInputs";
    case ErrorKind::GammaTooLarge: return "GammaTooLarge";
    case ErrorKind::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorKind::DegenerateKernel: return "DegenerateKernel";
    case ErrorKind::SingularBandOne: return "SingularBandOne";
    case ErrorKind::ExpmTolFailure: return "ExpmTolFailure";
    case ErrorKind::HorizonTooShort: return "HorizonTooShort";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::InsufficientSamples: return "InsufficientSamples";
    case ErrorKind::OptimizerStall: return "OptimizerStall";
  }
  return "Unknown";
}

const char* family_name(Family f) {
  switch (f) {
    case Family::P: return "p";
    case Family::PLambda: return "plambda";
    case Family::PQ: return "pq";
  }
  return "?";
}

Family parse_family(const std::string& s) {
  if (s == "p") return Family::P;
  if (s == "plambda") return Family::PLambda;
  if (s == "pq") return Family::PQ;
  raise(ErrorKind::InvalidParams, "unknown family '" + s + "'");
}

void ModelParams::validate() const {
  if (!(p > 0.0) || !std::isfinite(p)) raise(ErrorKind::InvalidParams, "p must be > 0");
  if (dim < 3) raise(ErrorKind::InvalidParams, "dim must be >= 3");
  if (family == Family::PLambda && !std::isfinite(lambda))
    raise(ErrorKind::InvalidParams, "lambda must be finite");
  if (family == Family::PQ && !(q >= -1.0 && q <= 0.0))
    raise(ErrorKind::InvalidParams, "q must lie in [-1, 0]");
}

double ModelParams::gain_x() const {
  return family == Family::PLambda ? lambda : 0.0;
}

double ModelParams::loss_x() const {
  switch (family) {
    case Family::P: return 0.0;
    case Family::PLambda: return lambda;
    case Family::PQ: return -0.5 * q;  // q = -1 lands on the boundary x = 1/2
  }
  return 0.0;
}

bool ModelParams::heisenberg_regime() const {
  if (p <= 3.0) return false;
  if (family == Family::PLambda && (lambda < 0.0 || lambda > 1.0)) return false;
  return true;
}

ModelParams ModelParams::p_family(double p, int dim) {
  return ModelParams{Family::P, p, 0.0, 0.0, dim};
}
ModelParams ModelParams::plambda_family(double p, double lambda, int dim) {
  return ModelParams{Family::PLambda, p, lambda, 0.0, dim};
}
ModelParams ModelParams::pq_family(double p, double q, int dim) {
  return ModelParams{Family::PQ, p, 0.0, q, dim};
}

namespace {

// s_k = sin(pi k / (D+1)), k = 0..D+1; evaluated directly, no recurrence.
std::vector<double> sines(int dim) {
  std::vector<double> s(dim + 2);
  const double h = std::numbers::pi / (dim + 1);
  for (int k = 0; k <= dim + 1; ++k) s[k] = std::sin(h * k);
  s[0] = 0.0;
  s[dim + 1] = 0.0;
  return s;
}

}  // namespace

double normalization_alpha(const ModelParams& params) {
  params.validate();
  auto s = sines(params.dim);
  double sum = 0.0;
  for (int k = 1; k <= params.dim; ++k) sum += std::pow(s[k], params.p);
  return 1.0 / sum;
}

std::vector<double> analytic_steady_state(const ModelParams& params) {
  params.validate();
  auto s = sines(params.dim);
  std::vector<double> rho(params.dim);
  double sum = 0.0;
  for (int n = 0; n < params.dim; ++n) {
    rho[n] = std::pow(s[n + 1], params.p);
    sum += rho[n];
  }
  for (double& r : rho) r /= sum;
  return rho;
}

double alpha_limit(double p) {
  return std::sqrt(std::numbers::pi) *
         std::exp(std::lgamma(0.5 * (2.0 + p)) - std::lgamma(0.5 * (1.0 + p)));
}

CavityOperators build_operators(const ModelParams& params) {
  params.validate();
  const int D = params.dim;
  auto s = sines(D);
  CavityOperators ops;
  ops.gain.resize(D - 1);
  ops.loss.resize(D - 1);
  const double eg = 0.5 * params.p * params.gain_x();
  const double el = 0.5 * params.p * (1.0 - params.loss_x());
  for (int n = 1; n <= D - 1; ++n) {
    const double up = s[n + 1] / s[n];
    ops.gain[n - 1] = eg == 0.0 ? 1.0 : std::pow(up, eg);
    ops.loss[n - 1] = std::pow(1.0 / up, el);
  }
  ops.rho = analytic_steady_state(params);
  ops.alpha = normalization_alpha(params);
  return ops;
}

double mean_excitation(const ModelParams& params) {
  params.validate();
  return params.mu();
}

double weighted_mean_excitation(const std::vector<double>& rho) {
  double m = 0.0;
  for (std::size_t n = 0; n < rho.size(); ++n) m += static_cast<double>(n) * rho[n];
  return m;
}

}  // namespace hlaser

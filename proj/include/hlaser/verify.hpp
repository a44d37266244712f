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

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hlaser/models.hpp"

namespace hlaser {

struct PowerLawFit {
  double c = 0.0;  // y = c x^w
  double w = 0.0;
  double stderr_w = 0.0;
  double x_min = 0.0, x_max = 0.0;
  std::vector<std::pair<double, double>> samples;
  double runs_p_value = 1.0;  // Wald-Wolfowitz on residual signs, reported only
};

// Least squares in log-log space over samples with x in [x_min, x_max].
// InsufficientSamples below min_samples points or for non-positive values.
PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& samples,
                          double x_min = 0.0, double x_max = 1e300, int min_samples = 4);

// Half-width tau = sqrt(3 C / 8) / F (the window minimising the ideal-beam
// heterodyne error) or the full tau = sqrt(3 C / 2) / F.
enum class Window { Optimal, Full };
const char* window_name(Window w);
Window parse_window(const std::string& s);

struct Condition4Options {
  int workers = 1;
  double g1_window = 10.0;   // search s in [0, g1_window / l]
  int g1_grid = 200;
  int n_starts = 8;
  std::uint64_t seed = 1;
  int probes = 30;
  Window window = Window::Optimal;
  bool determinism_check = true;
};

struct G1Deviation {
  int dim = 0;
  double coherence = 0.0;
  double linewidth = 0.0;
  double max = 0.0;
  double argmax = 0.0;
};

struct G2Deviation {
  int dim = 0;
  double coherence = 0.0;
  double tau = 0.0;                  // box half-width
  double max = 0.0;
  std::array<double, 4> argmax{};    // (s, s', t', t), s pinned to 0
  double best_probe = 0.0;
  int evals = 0;
};

struct DeviationReport {
  std::vector<int> dims;
  std::vector<G1Deviation> g1;
  std::vector<G2Deviation> g2;
  PowerLawFit fit_g2;  // max |dg2| against coherence
  // Prefactor with the exponent held at -1/2: geometric mean of max * sqrt(C).
  double prefactor_half = 0.0;
};

// max_s |g1_laser(s) - exp(-l s / 2)| per model.
std::vector<G1Deviation> condition4_g1(const std::vector<ModelParams>& models,
                                       const Condition4Options& opts = {});
// max |g2_laser - g2_ideal| over (s', t', t) in [-tau, tau]^3 with s = 0.
// OptimizerStall if a second run with the same seed disagrees by > 1e-6.
DeviationReport condition4_g2(const std::vector<ModelParams>& models,
                              const Condition4Options& opts = {});

enum class Regime { Heisenberg, SubHeisenberg, Crossover };
const char* regime_name(Regime r);

struct RegimeRow {
  double p = 0.0;
  PowerLawFit fit;  // coherence against mu
  Regime regime = Regime::Crossover;
};

std::vector<RegimeRow> regime_scan(const ModelParams& base, const std::vector<double>& p_grid,
                                   const std::vector<int>& d_grid, int workers = 1);

struct OracleMismatch {
  int draw = -1;
  std::string quantity;
  ModelParams params;
  double band = 0.0;
  double dense = 0.0;
};

struct OracleReport {
  bool passed = true;
  int draws = 0;
  double tolerance = 1e-10;
  double max_deviation = 0.0;
  OracleMismatch first_failure;
};

// Seeded random models with D <= 12 over all families; one draw is pq with
// q = -1. corrupt perturbs one band-1 entry to exercise the mismatch path.
OracleReport oracle_equivalence(std::uint64_t seed, bool corrupt = false, int draws = 20);

struct SsPqReport {
  std::vector<int> dims;
  double q = 0.0;
  std::vector<double> liouvillian_norm, loss_norm, gain_map_norm, top_norm, floor;
  bool residual_is_roundoff = false;  // every liouvillian_norm below floor
  double w_liouvillian = 0.0;         // -inf when identically zero
  double w_loss = 0.0, w_gain_map = 0.0, w_top = 0.0;
  bool passed = false;
};

// Exponents over as few as 3 dims; passes if the steady-state residual
// decays at least like D^-1.5 (or vanishes) and the top-level term decays
// faster than the gain-map term.
SsPqReport verify_ss_pq(double p, double q, const std::vector<int>& dims);

}  // namespace hlaser

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

#include <cstdint>
#include <vector>

#include "hlaser/models.hpp"

namespace hlaser {

struct IdealBeam {
  double flux = 1.0;
  double linewidth = 1.0;
  void validate() const;
};

double ideal_g1(const IdealBeam& beam, double s);
// exp(-(l/2) Var[W(t) + W(t') - W(s) - W(s')]) for phase diffusion.
double ideal_g2(const IdealBeam& beam, double s, double s2, double t2, double t);

struct McEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
};

// Phase-diffusion Monte-Carlo over Wiener paths (mt19937_64).
McEstimate mc_ideal_g1(const IdealBeam& beam, double s, int paths, std::uint64_t seed);
McEstimate mc_ideal_g2(const IdealBeam& beam, double s, double s2, double t2, double t,
                       int paths, std::uint64_t seed);

enum class FnRegime { EdgeDominated, CenterDominated };
const char* regime_name(FnRegime r);

struct FnSum {
  Family family = Family::P;
  std::vector<double> elements;         // exact
  double total = 0.0;
  std::vector<double> approx_elements;  // Taylor form, 0 where not defined
  double approx_total = 0.0;
  FnRegime regime = FnRegime::CenterDominated;
};

// P family: f_n from the steady-state closed form, n = 0..D-1.
// PLambda / PQ: f_n = (L varrho)_{n,n+1}, n = 0..D-2, with the pure phase state.
FnSum fn_elements(const ModelParams& params);
// Leading-order Taylor element for the p family, defined for 1 < n < D-1.
double fn_taylor_element(double p, int dim, int n);
// Closed-form sub-Poissonian elements from the steady state (interior n only).
double fn_closed_form_plambda(const std::vector<double>& rho, double lambda, int n);
double fn_closed_form_pq(const std::vector<double>& rho, double q, int n);

// l_est = -2 sum_n (L varrho)_{n,n+1}
double linewidth_ansatz(const ModelParams& params);

// c in C = c mu^4 for the p family; OutOfDomain for p <= 3.
double coherence_prefactor(double p);
double family_divisor(const ModelParams& params);
double coherence_formula(const ModelParams& params);
double optimal_p();

constexpr double kAiryZero = -2.338107410459767;
double heisenberg_bound(double mu);

struct MseResult {
  double value = 0.0;
  double asymptote = 0.0;  // 2 sqrt(2 l / 3 N)
  bool in_window = true;   // l tau << 1 and N tau >> 1
};

// Window minimising the leading-order MSE, sqrt(3 / (2 N l)).
double mse_optimal_window(const IdealBeam& beam);
// tau = sqrt(3 C / 2) / N with C = 4 N / l.
double mse_full_window(const IdealBeam& beam);
double mse_asymptote(const IdealBeam& beam);

// Reduced quadrature of the heterodyne/retrofilter MSE for the ideal beam.
MseResult retrofiltering_mse_ideal(const IdealBeam& beam, double tau);
// Same integrals in closed form (oracle for the reduction).
double retrofiltering_mse_closed_form(const IdealBeam& beam, double tau);
// Midpoint rule on the full 2- and 4-dimensional integrals, n points per axis.
double retrofiltering_mse_bruteforce(const IdealBeam& beam, double tau, int n);

}  // namespace hlaser

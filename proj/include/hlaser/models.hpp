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

#include <string>
#include <vector>

namespace hlaser {

enum class Family { P, PLambda, PQ };

const char* family_name(Family f);          // "p", "plambda", "pq"
Family parse_family(const std::string& s);  // throws InvalidParams

struct ModelParams {
  Family family = Family::P;
  double p = 4.0;
  double lambda = 0.0;  // PLambda only
  double q = 0.0;       // PQ only, in [-1, 0]
  int dim = 100;

  double mu() const { return 0.5 * (dim - 1); }
  void validate() const;

  // Exponent x of the gain and loss matrix elements.
  double gain_x() const;
  double loss_x() const;

  // Outside p > 3 (or lambda outside [0,1]) the run is still valid, just not
  // in the fourth-power regime. Surfaced as metadata.
  bool heisenberg_regime() const;
  bool is_markovian() const { return family != Family::PQ; }

  static ModelParams p_family(double p, int dim);
  static ModelParams plambda_family(double p, double lambda, int dim);
  static ModelParams pq_family(double p, double q, int dim);
};

// Band amplitudes. gain[n-1] = G_n, loss[n-1] = L_n for n = 1..D-1.
// G_n moves |n-1> -> |n>, L_n moves |n> -> |n-1>.
struct CavityOperators {
  std::vector<double> gain;
  std::vector<double> loss;
  std::vector<double> rho;  // analytic weights, n = 0..D-1
  double alpha = 0.0;

  int dim() const { return static_cast<int>(rho.size()); }
  double G(int n) const { return gain[n - 1]; }
  double L(int n) const { return loss[n - 1]; }
};

CavityOperators build_operators(const ModelParams& params);
std::vector<double> analytic_steady_state(const ModelParams& params);
double normalization_alpha(const ModelParams& params);
// lim_{D->inf} D*alpha = sqrt(pi) Gamma((2+p)/2) / Gamma((1+p)/2)
double alpha_limit(double p);
double mean_excitation(const ModelParams& params);
double weighted_mean_excitation(const std::vector<double>& rho);

}  // namespace hlaser

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

#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "hlaser/propagator.hpp"
#include "hlaser/superop.hpp"

namespace hlaser {

struct BeamObservables {
  ModelParams params;
  int dim = 0;
  double flux = 0.0;
  double coherence = 0.0;
  double linewidth = 0.0;  // 4 flux / coherence
  double mandel_q = 0.0;
  double solver_residual = 0.0;
};

enum class TraceKind { G1, G2ps, G2general };

struct CorrelationTrace {
  TraceKind kind = TraceKind::G1;
  std::vector<double> times;
  std::vector<double> values;
};

// A matrix element vector living on one band.
struct BandVector {
  int band = 0;
  std::vector<double> x;
};

BandVector apply_annihilation(const CavityOperators& ops, const BandVector& v);  // L X
BandVector apply_creation(const CavityOperators& ops, const BandVector& v);      // X L^T
double band_trace(const BandVector& v);

std::vector<double> steady_state(const BandLiouvillian& liou);
double flux(const BandLiouvillian& liou, const std::vector<double>& rho_ss);
double coherence(const BandLiouvillian& liou);
double mandel_q(const BandLiouvillian& liou);
// Discrete transfer-matrix form at finite gamma (Markovian families).
double mandel_q_discrete(const BandLiouvillian& liou, double gamma);
BeamObservables observe(const BandLiouvillian& liou);

// Time evolution on bands 0..2 with lazily built propagators; safe for
// concurrent queries.
class BeamDynamics {
 public:
  explicit BeamDynamics(const BandLiouvillian& liou, ExpmOptions opts = {});

  const BandLiouvillian& liouvillian() const { return liou_; }
  double g1(double s) const;
  double g2(double s, double s2, double t2, double t) const;
  double g2ps(double s) const { return g2(0.0, s, s, 0.0); }
  // Propagate a band vector for time t >= 0.
  BandVector evolve(const BandVector& v, double t) const;
  const ExpAction& propagator(int band) const;

 private:
  BandLiouvillian liou_;
  ExpmOptions opts_;
  mutable std::mutex mu_;
  mutable std::vector<std::unique_ptr<ExpAction>> props_;
};

CorrelationTrace g1_trace(const BandLiouvillian& liou, const std::vector<double>& times,
                          ExpmOptions opts = {});
CorrelationTrace g2ps_trace(const BandLiouvillian& liou, const std::vector<double>& times,
                            ExpmOptions opts = {});
double g2_general(const BandLiouvillian& liou, double s, double s2, double t2, double t,
                  ExpmOptions opts = {});

struct QFromG2 {
  double q = 0.0;
  double quadrature_error = 0.0;
  double tail_estimate = 0.0;
  double horizon = 0.0;
};

// Q = 2 F int_0^H (g2ps(s) - 1) ds; HorizonTooShort when the tail estimate
// exceeds tail_tol or horizon <= 0.
QFromG2 mandel_q_from_g2(const BandLiouvillian& liou, double horizon, double tail_tol = 1e-4);
// Doubles the horizon from D^2 until the tail is within budget.
QFromG2 mandel_q_from_g2_auto(const BandLiouvillian& liou, double tail_tol = 1e-4);

}  // namespace hlaser

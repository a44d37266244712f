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

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "hlaser/band_matrix.hpp"
#include "hlaser/models.hpp"

namespace hlaser {

// Band k holds x_m = X(m, m+k) for m = 0..D-|k|-1 (k >= 0); band -k holds
// X(m+k, m) and uses the same block since every amplitude is real.
struct BandLiouvillian {
  ModelParams params;
  CavityOperators ops;
  std::vector<BandMatrix> blocks;  // index |k|
  std::vector<double> rho_ss;      // kernel of block 0, unit trace
  double flux = 0.0;               // sum_n L_n^2 rho_n

  int dim() const { return params.dim; }
  int max_band() const { return static_cast<int>(blocks.size()) - 1; }
  const BandMatrix& block(int k) const;
};

// Dissipator D[c] restricted to band k, for an operator c with a single
// nonzero diagonal: c(i, i + offset) = amp(i) (amp returns 0 outside range).
BandMatrix dissipator_block(int dim, int offset, const std::function<double(int)>& amp, int k);

BandMatrix gain_block(const CavityOperators& ops, int k);
BandMatrix loss_block(const CavityOperators& ops, int k);
BandMatrix liouvillian_block(const CavityOperators& ops, const ModelParams& params, int k);

BandLiouvillian build_liouvillian(const CavityOperators& ops, const ModelParams& params,
                                  int max_band = 2);
BandLiouvillian build_liouvillian(const ModelParams& params, int max_band = 2);

// Unit-trace kernel vector of a band-0 block. Deflation by dropping the
// middle row/column; DegenerateKernel if the reduced system is singular.
// Entries in [-1e-12, 0) are clipped to zero. The pq generator is not of
// Lindblad form and its kernel dips below zero near the top level at small
// D (about -1e-4 at D = 50, -3e-9 at D = 400); allow_negative keeps those.
std::vector<double> kernel_vector(const BandMatrix& block0, bool allow_negative = false);
double compute_flux(const CavityOperators& ops, const std::vector<double>& rho);

// Discrete-time iMPS data. a0 = sqrt(gamma) G, a3 = sqrt(gamma) L, a1 is the
// diagonal completion, a2 = 0.
struct TransferSet {
  double gamma = 0.0;
  std::vector<double> a0;  // a0[n-1] = A0(n, n-1)
  std::vector<double> a1;  // a1[n] = A1(n, n)
  std::vector<double> a2;  // all zero
  std::vector<double> a3;  // a3[n-1] = A3(n-1, n)

  int dim() const { return static_cast<int>(a1.size()); }
  // max |sum_j A_j^T A_j - I|
  double isometry_error() const;
  // Transfer map X -> sum_j A_j X A_j^T restricted to band k.
  BandMatrix block(int k) const;
  std::vector<double> gain_recovered() const;  // a0 / sqrt(gamma)
  std::vector<double> loss_recovered() const;  // a3 / sqrt(gamma)
};

TransferSet build_transfer(const CavityOperators& ops, double gamma);

// Frobenius norms (standard (Tr A^T A)^{1/2}) of the pq-family diagnostics.
struct PqNormRow {
  int dim = 0;
  double loss_on_pure = 0.0;      // ||D[L] varrho||
  double gain_map_on_pure = 0.0;  // ||(G - 1) varrho||
  double top_on_pure = 0.0;       // ||D[Pi_top] varrho||
  double liouvillian_on_ss = 0.0; // ||L_NM rho_ss|| with analytic rho_ss
  double roundoff_floor = 0.0;    // below this the last norm is zero to working precision
};

std::vector<PqNormRow> pq_norm_diagnostics(const ModelParams& params, const std::vector<int>& dims);

// Full flattened-space oracle. vec index i + D*j for X(i, j).
Eigen::MatrixXd dense_oracle(const CavityOperators& ops, const ModelParams& params);
constexpr int kDenseOracleMaxDim = 64;

// Observable evaluation in the flattened space; cross-checks the band route.
class DenseModel {
 public:
  DenseModel(const CavityOperators& ops, const ModelParams& params);

  const Eigen::MatrixXd& liouvillian() const { return L_; }
  Eigen::MatrixXd gain_matrix() const { return G_; }
  Eigen::MatrixXd loss_matrix() const { return Lo_; }

  Eigen::VectorXd steady_state() const;  // diagonal of rho_ss
  double flux() const;
  double coherence() const;
  double mandel_q() const;
  double g1(double s) const;
  double g2(double s, double s2, double t2, double t) const;
  // Literal discrete formula with transfer matrix built from the Kraus set.
  double mandel_q_discrete(double gamma) const;
  // Restriction of the dense Liouvillian to band k, in band order.
  Eigen::MatrixXd band_restriction(int k) const;

 private:
  Eigen::MatrixXd reduced_inverse() const;  // Q (L - P)^{-1} Q
  int D_;
  ModelParams params_;
  CavityOperators ops_;
  Eigen::MatrixXd G_, Lo_, L_;
  Eigen::VectorXd rho_vec_;  // vec(rho_ss)
  double flux_;
};

}  // namespace hlaser

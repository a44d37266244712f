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
#include <vector>

namespace hlaser {

// General real band matrix, diagonal storage (see kernels::band_matvec).
class BandMatrix {
 public:
  BandMatrix() = default;
  BandMatrix(int n, int kl, int ku);

  int size() const { return n_; }
  int kl() const { return kl_; }
  int ku() const { return ku_; }

  bool in_band(int i, int j) const { return j - i >= -kl_ && j - i <= ku_; }
  double operator()(int i, int j) const;
  // Element must be inside the band.
  double& ref(int i, int j);
  void add(int i, int j, double v) { ref(i, j) += v; }

  const double* diagonals() const { return d_.data(); }
  double* diagonals() { return d_.data(); }

  std::vector<double> apply(const std::vector<double>& x) const;
  void apply(const double* x, double* y) const;
  // Row vector times matrix: (1^T A)_j and general w^T A.
  std::vector<double> apply_transpose(const std::vector<double>& w) const;

  BandMatrix operator*(const BandMatrix& rhs) const;
  BandMatrix operator+(const BandMatrix& rhs) const;
  BandMatrix scaled(double a) const;
  // Drops row r and column r; bandwidths are unchanged.
  BandMatrix without(int r) const;

  double norm1() const;
  double max_abs() const;
  Eigen::MatrixXd to_dense() const;

 private:
  int n_ = 0, kl_ = 0, ku_ = 0;
  std::vector<double> d_;
};

// Banded LU with partial pivoting (LAPACK dgbtrf) plus one refinement step.
class BandLU {
 public:
  explicit BandLU(const BandMatrix& a);

  std::vector<double> solve(const std::vector<double>& b) const;
  double residual_norm(const std::vector<double>& x, const std::vector<double>& b) const;

  // min |u_ii| / max |a_ij|; tiny values flag a (near) singular matrix.
  double pivot_ratio() const { return pivot_ratio_; }
  bool singular() const { return info_ > 0; }
  // Reciprocal 1-norm condition estimate (dgbcon).
  double rcond() const;

 private:
  std::vector<double> raw_solve(const std::vector<double>& b) const;

  BandMatrix a_;
  std::vector<double> ab_;
  std::vector<int> ipiv_;
  int ldab_ = 0;
  int info_ = 0;
  double pivot_ratio_ = 0.0;
};

}  // namespace hlaser

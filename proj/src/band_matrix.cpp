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

#include "hlaser/band_matrix.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>

#include "hlaser/error.hpp"
#include "hlaser/kernels.hpp"

namespace hlaser {

BandMatrix::BandMatrix(int n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), d_(static_cast<std::size_t>(kl + ku + 1) * n, 0.0) {}

double BandMatrix::operator()(int i, int j) const {
  if (!in_band(i, j)) return 0.0;
  return d_[static_cast<std::size_t>(j - i + kl_) * n_ + i];
}

double& BandMatrix::ref(int i, int j) {
  if (!in_band(i, j) || i < 0 || j < 0 || i >= n_ || j >= n_)
    raise(ErrorKind::InconsistentInputs, "band element out of range");
  return d_[static_cast<std::size_t>(j - i + kl_) * n_ + i];
}

void BandMatrix::apply(const double* x, double* y) const {
  kernels::band_matvec(n_, kl_, ku_, d_.data(), x, y);
}

std::vector<double> BandMatrix::apply(const std::vector<double>& x) const {
  std::vector<double> y(n_);
  apply(x.data(), y.data());
  return y;
}

std::vector<double> BandMatrix::apply_transpose(const std::vector<double>& w) const {
  std::vector<double> y(n_, 0.0);
  for (int d = -kl_; d <= ku_; ++d) {
    const double* a = d_.data() + static_cast<std::size_t>(d + kl_) * n_;
    for (int i = std::max(0, -d); i < std::min(n_, n_ - d); ++i) y[i + d] += w[i] * a[i];
  }
  return y;
}

BandMatrix BandMatrix::operator*(const BandMatrix& b) const {
  BandMatrix c(n_, std::min(n_ - 1, kl_ + b.kl_), std::min(n_ - 1, ku_ + b.ku_));
  for (int i = 0; i < n_; ++i)
    for (int k = std::max(0, i - kl_); k <= std::min(n_ - 1, i + ku_); ++k) {
      const double aik = (*this)(i, k);
      if (aik == 0.0) continue;
      for (int j = std::max(0, k - b.kl_); j <= std::min(n_ - 1, k + b.ku_); ++j)
        c.add(i, j, aik * b(k, j));
    }
  return c;
}

BandMatrix BandMatrix::operator+(const BandMatrix& b) const {
  BandMatrix c(n_, std::max(kl_, b.kl_), std::max(ku_, b.ku_));
  for (int i = 0; i < n_; ++i)
    for (int j = std::max(0, i - c.kl_); j <= std::min(n_ - 1, i + c.ku_); ++j)
      c.ref(i, j) = (*this)(i, j) + b(i, j);
  return c;
}

BandMatrix BandMatrix::scaled(double a) const {
  BandMatrix c = *this;
  for (double& v : c.d_) v *= a;
  return c;
}

BandMatrix BandMatrix::without(int r) const {
  BandMatrix c(n_ - 1, kl_, ku_);
  for (int i = 0; i < n_; ++i) {
    if (i == r) continue;
    for (int j = std::max(0, i - kl_); j <= std::min(n_ - 1, i + ku_); ++j) {
      if (j == r) continue;
      c.ref(i < r ? i : i - 1, j < r ? j : j - 1) = (*this)(i, j);
    }
  }
  return c;
}

double BandMatrix::norm1() const {
  std::vector<double> col(n_, 0.0);
  for (int i = 0; i < n_; ++i)
    for (int j = std::max(0, i - kl_); j <= std::min(n_ - 1, i + ku_); ++j)
      col[j] += std::abs((*this)(i, j));
  return n_ ? *std::max_element(col.begin(), col.end()) : 0.0;
}

double BandMatrix::max_abs() const {
  double m = 0.0;
  for (double v : d_) m = std::max(m, std::abs(v));
  return m;
}

Eigen::MatrixXd BandMatrix::to_dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = std::max(0, i - kl_); j <= std::min(n_ - 1, i + ku_); ++j) m(i, j) = (*this)(i, j);
  return m;
}

BandLU::BandLU(const BandMatrix& a) : a_(a) {
  const int n = a.size(), kl = a.kl(), ku = a.ku();
  ldab_ = 2 * kl + ku + 1;
  ab_.assign(static_cast<std::size_t>(ldab_) * n, 0.0);
  for (int j = 0; j < n; ++j)
    for (int i = std::max(0, j - ku); i <= std::min(n - 1, j + kl); ++i)
      ab_[static_cast<std::size_t>(j) * ldab_ + kl + ku + i - j] = a(i, j);
  ipiv_.assign(n, 0);
  info_ = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, n, n, kl, ku, ab_.data(), ldab_, ipiv_.data());
  if (info_ < 0) raise(ErrorKind::InconsistentInputs, "dgbtrf argument error");
  double umin = INFINITY;
  for (int j = 0; j < n; ++j)
    umin = std::min(umin, std::abs(ab_[static_cast<std::size_t>(j) * ldab_ + kl + ku]));
  const double amax = a.max_abs();
  pivot_ratio_ = amax > 0.0 ? umin / amax : 0.0;
}

std::vector<double> BandLU::raw_solve(const std::vector<double>& b) const {
  std::vector<double> x = b;
  const int n = a_.size();
  lapack_int rc = LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', n, a_.kl(), a_.ku(), 1, ab_.data(),
                                 ldab_, ipiv_.data(), x.data(), n);
  if (rc != 0) raise(ErrorKind::InconsistentInputs, "dgbtrs failed");
  return x;
}

std::vector<double> BandLU::solve(const std::vector<double>& b) const {
  if (info_ > 0) raise(ErrorKind::DegenerateKernel, "band matrix is singular");
  std::vector<double> x = raw_solve(b);
  // One step of iterative refinement.
  std::vector<double> r = a_.apply(x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  std::vector<double> dx = raw_solve(r);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += dx[i];
  return x;
}

double BandLU::residual_norm(const std::vector<double>& x, const std::vector<double>& b) const {
  std::vector<double> r = a_.apply(x);
  double m = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) m = std::max(m, std::abs(b[i] - r[i]));
  return m;
}

double BandLU::rcond() const {
  if (info_ > 0) return 0.0;
  double rc = 0.0;
  LAPACKE_dgbcon(LAPACK_COL_MAJOR, '1', a_.size(), a_.kl(), a_.ku(), ab_.data(), ldab_,
                 ipiv_.data(), a_.norm1(), &rc);
  return rc;
}

}  // namespace hlaser

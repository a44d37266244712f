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

#include "hlaser/propagator.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hlaser/error.hpp"
#include "hlaser/kernels.hpp"

namespace hlaser {

namespace {

double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

ExpAction::ExpAction(BandMatrix a, ExpmOptions opts) : a_(std::move(a)), opts_(opts) {
  norm_ = a_.norm1();
  h0_ = norm_ > 0.0 ? 0.5 / norm_ : 1.0;
  coarse_.h = h0_;
  fine_.h = 0.5 * h0_;
}

void ExpAction::ensure(Table& tab, int levels) const {
  if (tab.built.load(std::memory_order_acquire) >= levels) return;
  std::lock_guard<std::mutex> lock(tab.grow);
  int have = tab.built.load(std::memory_order_relaxed);
  if (have == 0) {
    Eigen::MatrixXd m = a_.to_dense() * tab.h;
    tab.e[0] = std::make_unique<RowMat>(m.exp());
    have = 1;
    tab.built.store(1, std::memory_order_release);
  }
  for (; have < levels; ++have) {
    const RowMat& prev = *tab.e[have - 1];
    tab.e[have] = std::make_unique<RowMat>(prev * prev);
    tab.built.store(have + 1, std::memory_order_release);
  }
}

std::vector<double> ExpAction::taylor(double r, const std::vector<double>& v) const {
  std::vector<double> out = v, term = v, next(v.size());
  if (r == 0.0) return out;
  const double vmax = std::max(inf_norm(v), std::numeric_limits<double>::min());
  for (int k = 1; k < 60; ++k) {
    a_.apply(term.data(), next.data());
    const double c = r / k;
    for (std::size_t i = 0; i < next.size(); ++i) term[i] = next[i] * c;
    kernels::axpy(term.size(), 1.0, term.data(), out.data());
    if (inf_norm(term) < 1e-18 * vmax) break;
  }
  return out;
}

std::vector<double> ExpAction::run(Table& tab, double t, const std::vector<double>& v) const {
  const double q = std::floor(t / tab.h);
  if (q > 4.0e15)
    raise(ErrorKind::ExpmTolFailure, "time " + std::to_string(t) + " exceeds table range");
  auto n = static_cast<unsigned long long>(q);
  const double r = t - static_cast<double>(n) * tab.h;
  std::vector<double> y = taylor(r, v);
  int levels = 0;
  for (unsigned long long m = n; m; m >>= 1) ++levels;
  ensure(tab, levels);
  std::vector<double> tmp(y.size());
  const int N = static_cast<int>(y.size());
  for (int j = 0; n; ++j, n >>= 1) {
    if (!(n & 1ULL)) continue;
    kernels::dense_matvec(N, N, tab.e[j]->data(), N, y.data(), tmp.data());
    y.swap(tmp);
  }
  return y;
}

std::vector<double> ExpAction::apply(double t, const std::vector<double>& v) const {
  return apply(t, v, nullptr);
}

std::vector<double> ExpAction::apply(double t, const std::vector<double>& v,
                                     double* err_est) const {
  if (static_cast<int>(v.size()) != a_.size())
    raise(ErrorKind::InconsistentInputs, "vector size does not match propagator");
  if (!(t >= 0.0) || !std::isfinite(t))
    raise(ErrorKind::InvalidParams, "propagation time must be finite and >= 0");
  std::vector<double> y = run(coarse_, t, v);
  if (err_est) *err_est = 0.0;
  if (!opts_.check) return y;
  std::vector<double> y2 = run(fine_, t, v);
  double err = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) err = std::max(err, std::abs(y[i] - y2[i]));
  if (err_est) *err_est = err;
  const double vn = inf_norm(v);
  const double floor = 16.0 * std::numeric_limits<double>::epsilon() * (1.0 + t * norm_);
  if (err > vn * (opts_.tol + floor))
    raise(ErrorKind::ExpmTolFailure, "step-doubling estimate " + std::to_string(err) +
                                         " exceeds tolerance at t=" + std::to_string(t));
  return y;
}

}  // namespace hlaser

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

#include <algorithm>

#include "hlaser/kernels.hpp"

namespace hlaser::kernels {

namespace {

void band_matvec_scalar(int n, int kl, int ku, const double* diags, const double* x,
                        double* y) {
  std::fill(y, y + n, 0.0);
  for (int d = -kl; d <= ku; ++d) {
    const double* a = diags + static_cast<std::size_t>(d + kl) * n;
    const int lo = std::max(0, -d);
    const int hi = std::min(n, n - d);
    for (int i = lo; i < hi; ++i) y[i] += a[i] * x[i + d];
  }
}

void dense_matvec_scalar(int rows, int cols, const double* a, int lda, const double* x,
                         double* y) {
  for (int i = 0; i < rows; ++i) {
    const double* r = a + static_cast<std::size_t>(i) * lda;
    double s = 0.0;
    for (int j = 0; j < cols; ++j) s += r[j] * x[j];
    y[i] = s;
  }
}

double dot_scalar(std::size_t n, const double* x, const double* y) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_scalar(std::size_t n, double a, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

}  // namespace

const Table& scalar_table() {
  static const Table t{band_matvec_scalar, dense_matvec_scalar, dot_scalar, axpy_scalar};
  return t;
}

}  // namespace hlaser::kernels

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

#include "hlaser/kernels.hpp"

// aarch64 only. Not exercised on x86 hosts; the equivalence tests pick it up
// automatically when it is compiled in.
#if defined(__aarch64__) && defined(__ARM_NEON)

#include <arm_neon.h>

#include <algorithm>

namespace hlaser::kernels {

namespace {

void band_matvec_neon(int n, int kl, int ku, const double* diags, const double* x,
                      double* y) {
  std::fill(y, y + n, 0.0);
  for (int d = -kl; d <= ku; ++d) {
    const double* a = diags + static_cast<std::size_t>(d + kl) * n;
    const int lo = std::max(0, -d);
    const int hi = std::min(n, n - d);
    int i = lo;
    for (; i + 2 <= hi; i += 2) {
      float64x2_t acc = vld1q_f64(y + i);
      acc = vfmaq_f64(acc, vld1q_f64(a + i), vld1q_f64(x + i + d));
      vst1q_f64(y + i, acc);
    }
    for (; i < hi; ++i) y[i] += a[i] * x[i + d];
  }
}

double dot_neon(std::size_t n, const double* x, const double* y) {
  float64x2_t a0 = vdupq_n_f64(0.0);
  float64x2_t a1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    a0 = vfmaq_f64(a0, vld1q_f64(x + i), vld1q_f64(y + i));
    a1 = vfmaq_f64(a1, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(a0, a1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void dense_matvec_neon(int rows, int cols, const double* a, int lda, const double* x,
                       double* y) {
  for (int i = 0; i < rows; ++i)
    y[i] = dot_neon(static_cast<std::size_t>(cols), a + static_cast<std::size_t>(i) * lda, x);
}

void axpy_neon(std::size_t n, double alpha, const double* x, double* y) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(y + i, vfmaq_n_f64(vld1q_f64(y + i), vld1q_f64(x + i), alpha));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace

const Table* neon_table() {
  static const Table t{band_matvec_neon, dense_matvec_neon, dot_neon, axpy_neon};
  return &t;
}

}  // namespace hlaser::kernels

#else

namespace hlaser::kernels {
const Table* neon_table() { return nullptr; }
}  // namespace hlaser::kernels

#endif

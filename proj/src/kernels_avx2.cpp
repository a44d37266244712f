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

#if defined(HLASER_BUILD_AVX2) && defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

#include <algorithm>

namespace hlaser::kernels {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

void band_matvec_avx2(int n, int kl, int ku, const double* diags, const double* x,
                      double* y) {
  std::fill(y, y + n, 0.0);
  for (int d = -kl; d <= ku; ++d) {
    const double* a = diags + static_cast<std::size_t>(d + kl) * n;
    const int lo = std::max(0, -d);
    const int hi = std::min(n, n - d);
    int i = lo;
    for (; i + 4 <= hi; i += 4) {
      __m256d acc = _mm256_loadu_pd(y + i);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(x + i + d), acc);
      _mm256_storeu_pd(y + i, acc);
    }
    for (; i < hi; ++i) y[i] += a[i] * x[i + d];
  }
}

double dot_avx2(std::size_t n, const double* x, const double* y) {
  __m256d a0 = _mm256_setzero_pd();
  __m256d a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    a0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), a0);
    a1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), a1);
  }
  for (; i + 4 <= n; i += 4)
    a0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), a0);
  double s = hsum(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void dense_matvec_avx2(int rows, int cols, const double* a, int lda, const double* x,
                       double* y) {
  for (int i = 0; i < rows; ++i)
    y[i] = dot_avx2(static_cast<std::size_t>(cols), a + static_cast<std::size_t>(i) * lda, x);
}

void axpy_avx2(std::size_t n, double alpha, const double* x, double* y) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d r = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(y + i, r);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace

const Table* avx2_table() {
  static const Table t{band_matvec_avx2, dense_matvec_avx2, dot_avx2, axpy_avx2};
  return &t;
}

}  // namespace hlaser::kernels

#else

namespace hlaser::kernels {
const Table* avx2_table() { return nullptr; }
}  // namespace hlaser::kernels

#endif

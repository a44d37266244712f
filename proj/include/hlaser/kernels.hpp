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

#include <cstddef>

namespace hlaser::kernels {

enum class Isa { Scalar, Avx2, Neon };

const char* isa_name(Isa isa);
bool isa_available(Isa isa);
Isa detected_isa();
Isa active_isa();
// Tests use this to pin an implementation; throws if the ISA is unavailable.
void set_isa(Isa isa);

// Diagonal storage: row (d + kl) of `diags` holds A(i, i + d) for i = 0..n-1,
// offsets d = -kl..ku, row stride n. Out-of-range slots are ignored.
void band_matvec(int n, int kl, int ku, const double* diags, const double* x, double* y);
// y = A x with A row-major, leading dimension lda.
void dense_matvec(int rows, int cols, const double* a, int lda, const double* x, double* y);
double dot(std::size_t n, const double* x, const double* y);
void axpy(std::size_t n, double a, const double* x, double* y);

struct Table {
  void (*band_matvec)(int, int, int, const double*, const double*, double*);
  void (*dense_matvec)(int, int, const double*, int, const double*, double*);
  double (*dot)(std::size_t, const double*, const double*);
  void (*axpy)(std::size_t, double, const double*, double*);
};

// Individual implementations, exposed for equivalence tests.
const Table& scalar_table();
const Table* avx2_table();  // nullptr when not compiled in
const Table* neon_table();  // nullptr when not compiled in

}  // namespace hlaser::kernels

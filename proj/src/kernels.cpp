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

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "hlaser/error.hpp"

namespace hlaser::kernels {

namespace {

const Table* table_for(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return &scalar_table();
    case Isa::Avx2: return avx2_table();
    case Isa::Neon: return neon_table();
  }
  return nullptr;
}

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa initial_isa() {
  // HLASER_ISA=scalar forces the reference path, handy for bisecting.
  if (const char* env = std::getenv("HLASER_ISA"); env && std::strcmp(env, "scalar") == 0)
    return Isa::Scalar;
  return detected_isa();
}

std::atomic<const Table*>& current() {
  static std::atomic<const Table*> t{table_for(initial_isa())};
  return t;
}

std::atomic<Isa>& current_isa() {
  static std::atomic<Isa> i{initial_isa()};
  return i;
}

}  // namespace

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "?";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2: return avx2_table() != nullptr && cpu_has_avx2();
    case Isa::Neon: return neon_table() != nullptr;
  }
  return false;
}

Isa detected_isa() {
  if (isa_available(Isa::Avx2)) return Isa::Avx2;
  if (isa_available(Isa::Neon)) return Isa::Neon;
  return Isa::Scalar;
}

Isa active_isa() { return current_isa().load(); }

void set_isa(Isa isa) {
  if (!isa_available(isa))
    raise(ErrorKind::InvalidParams, std::string("ISA not available: ") + isa_name(isa));
  current().store(table_for(isa));
  current_isa().store(isa);
}

void band_matvec(int n, int kl, int ku, const double* diags, const double* x, double* y) {
  current().load(std::memory_order_relaxed)->band_matvec(n, kl, ku, diags, x, y);
}

void dense_matvec(int rows, int cols, const double* a, int lda, const double* x, double* y) {
  current().load(std::memory_order_relaxed)->dense_matvec(rows, cols, a, lda, x, y);
}

double dot(std::size_t n, const double* x, const double* y) {
  return current().load(std::memory_order_relaxed)->dot(n, x, y);
}

void axpy(std::size_t n, double a, const double* x, double* y) {
  current().load(std::memory_order_relaxed)->axpy(n, a, x, y);
}

}  // namespace hlaser::kernels

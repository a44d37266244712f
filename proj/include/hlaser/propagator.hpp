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
#include <array>
#include <atomic>
#include <memory>
#include <mutex>
#include <vector>

#include "hlaser/band_matrix.hpp"

namespace hlaser {

struct ExpmOptions {
  double tol = 1e-10;  // relative to ||v||_inf
  bool check = true;   // step-doubling error estimate against a half-step table
};

// Action of exp(t A) for a fixed band matrix A and many (t, v) pairs.
//
// exp(h A) for h = h0 * 2^j is tabulated by repeated squaring, h0 = 0.5/||A||_1.
// A time t = n h0 + r is applied as the product over the set bits of n, with a
// Taylor series for the remainder r < h0. The check path repeats the work
// with a table built from h0/2 and compares.
//
// Squaring carries an unavoidable relative error of about eps * t * ||A||_1;
// that floor is added to the requested tolerance.
class ExpAction {
 public:
  explicit ExpAction(BandMatrix a, ExpmOptions opts = {});

  std::vector<double> apply(double t, const std::vector<double>& v) const;
  // Same, reporting the step-doubling estimate (0 when check is off).
  std::vector<double> apply(double t, const std::vector<double>& v, double* err_est) const;

  const BandMatrix& matrix() const { return a_; }
  double base_step() const { return h0_; }
  const ExpmOptions& options() const { return opts_; }

 private:
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  static constexpr int kSlots = 64;

  struct Table {
    double h = 0.0;
    std::array<std::unique_ptr<RowMat>, kSlots> e;
    std::atomic<int> built{0};
    std::mutex grow;
  };

  void ensure(Table& tab, int levels) const;
  std::vector<double> run(Table& tab, double t, const std::vector<double>& v) const;
  std::vector<double> taylor(double r, const std::vector<double>& v) const;

  BandMatrix a_;
  ExpmOptions opts_;
  double norm_ = 0.0;
  double h0_ = 0.0;
  mutable Table coarse_;
  mutable Table fine_;
};

}  // namespace hlaser

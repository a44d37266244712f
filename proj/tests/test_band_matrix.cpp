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

#include <doctest.h>

#include <random>

#include "hlaser/band_matrix.hpp"
#include "hlaser/error.hpp"

using namespace hlaser;

namespace {

BandMatrix random_band(int n, int kl, int ku, std::uint64_t seed, double diag_shift = 0.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  BandMatrix a(n, kl, ku);
  for (int i = 0; i < n; ++i)
    for (int j = std::max(0, i - kl); j <= std::min(n - 1, i + ku); ++j)
      a.ref(i, j) = u(rng) + (i == j ? diag_shift : 0.0);
  return a;
}

Eigen::VectorXd as_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

TEST_CASE("products and transposes agree with dense algebra") {
  auto a = random_band(17, 2, 1, 1);
  auto b = random_band(17, 1, 2, 2);
  Eigen::MatrixXd A = a.to_dense(), B = b.to_dense();
  std::vector<double> x(17);
  for (int i = 0; i < 17; ++i) x[i] = std::sin(i + 1.0);
  CHECK((as_eigen(a.apply(x)) - A * as_eigen(x)).norm() < 1e-13);
  CHECK((as_eigen(a.apply_transpose(x)) - A.transpose() * as_eigen(x)).norm() < 1e-13);
  CHECK(((a * b).to_dense() - A * B).norm() < 1e-13);
  CHECK(((a + b).to_dense() - (A + B)).norm() < 1e-15);
  CHECK((a.scaled(-2.5).to_dense() + 2.5 * A).norm() < 1e-15);
  CHECK(a.norm1() == doctest::Approx(A.cwiseAbs().colwise().sum().maxCoeff()));
  CHECK(a.max_abs() == doctest::Approx(A.cwiseAbs().maxCoeff()));
}

TEST_CASE("dropping a row and column") {
  auto a = random_band(9, 2, 2, 5);
  auto r = a.without(4);
  Eigen::MatrixXd A = a.to_dense(), R(8, 8);
  for (int i = 0, ii = 0; i < 9; ++i) {
    if (i == 4) continue;
    for (int j = 0, jj = 0; j < 9; ++j) {
      if (j == 4) continue;
      R(ii, jj++) = A(i, j);
    }
    ++ii;
  }
  CHECK((r.to_dense() - R).norm() == 0.0);
}

TEST_CASE("out-of-band access is rejected") {
  BandMatrix a(5, 1, 1);
  CHECK(a(0, 3) == 0.0);
  CHECK_THROWS(a.ref(0, 3));
}

TEST_CASE("banded LU solves and estimates conditioning") {
  auto a = random_band(40, 2, 2, 9, 0.3);
  BandLU lu(a);
  REQUIRE_FALSE(lu.singular());
  std::vector<double> b(40);
  for (int i = 0; i < 40; ++i) b[i] = std::cos(0.3 * i);
  auto x = lu.solve(b);
  Eigen::MatrixXd A = a.to_dense();
  Eigen::VectorXd xr = A.partialPivLu().solve(as_eigen(b));
  CHECK((as_eigen(x) - xr).norm() / xr.norm() < 1e-12);
  CHECK(lu.residual_norm(x, b) < 1e-12);
  // dgbcon is an estimate: within a factor 10 of the exact 1-norm value.
  const double exact = 1.0 / (A.cwiseAbs().colwise().sum().maxCoeff() *
                              A.inverse().cwiseAbs().colwise().sum().maxCoeff());
  CHECK(lu.rcond() <= exact * 10.0);
  CHECK(lu.rcond() >= exact / 10.0);
}

TEST_CASE("singular band matrix is flagged") {
  BandMatrix a(4, 1, 1);
  a.ref(0, 0) = 1.0;
  a.ref(1, 1) = 1.0;
  a.ref(3, 3) = 1.0;
  BandLU lu(a);
  CHECK((lu.singular() || lu.pivot_ratio() < 1e-13));
}

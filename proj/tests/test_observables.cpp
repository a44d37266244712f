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

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <random>

#include "hlaser/error.hpp"
#include "hlaser/observables.hpp"

using namespace hlaser;

namespace {

Eigen::MatrixXd loss_dense(const CavityOperators& ops) {
  const int D = ops.dim();
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(D, D);
  for (int n = 1; n < D; ++n) L(n - 1, n) = ops.L(n);
  return L;
}

std::vector<double> band_of(const Eigen::MatrixXd& X, int k) {
  const int D = static_cast<int>(X.rows());
  std::vector<double> v;
  for (int m = 0; m + std::abs(k) < D; ++m) v.push_back(k >= 0 ? X(m, m + k) : X(m - k, m));
  return v;
}

}  // namespace

TEST_CASE("band jump maps agree with dense operator products") {
  auto ops = build_operators(ModelParams::plambda_family(3.5, 0.3, 9));
  Eigen::MatrixXd L = loss_dense(ops);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1, 1);
  Eigen::MatrixXd X(9, 9);
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j) X(i, j) = u(rng);
  for (int k = -4; k <= 4; ++k) {
    BandVector v{k, band_of(X, k)};
    auto a = apply_annihilation(ops, v);
    auto c = apply_creation(ops, v);
    CHECK(a.band == k + 1);
    CHECK(c.band == k - 1);
    auto ra = band_of(L * X, k + 1), rc = band_of(X * L.transpose(), k - 1);
    REQUIRE(a.x.size() == ra.size());
    REQUIRE(c.x.size() == rc.size());
    for (std::size_t i = 0; i < ra.size(); ++i) CHECK(a.x[i] == doctest::Approx(ra[i]).epsilon(1e-14));
    for (std::size_t i = 0; i < rc.size(); ++i) CHECK(c.x[i] == doctest::Approx(rc[i]).epsilon(1e-14));
  }
}

TEST_CASE("band observables equal the flattened-space evaluation") {
  for (auto m : {ModelParams::p_family(4.0, 10), ModelParams::plambda_family(4.1479, 0.5, 11),
                 ModelParams::pq_family(4.1479, -1.0, 12), ModelParams::pq_family(2.0, -0.3, 9)}) {
    auto liou = build_liouvillian(m, 2);
    DenseModel dense(liou.ops, m);
    CHECK(coherence(liou) == doctest::Approx(dense.coherence()).epsilon(1e-10));
    CHECK(mandel_q(liou) == doctest::Approx(dense.mandel_q()).epsilon(1e-10));
    BeamDynamics dyn(liou);
    for (double s : {0.0, 0.4, 5.0, 40.0}) CHECK(dyn.g1(s) == doctest::Approx(dense.g1(s)).epsilon(1e-10));
    CHECK(dyn.g2(0.0, 1.1, 0.3, 2.0) == doctest::Approx(dense.g2(0.0, 1.1, 0.3, 2.0)).epsilon(1e-10));
    CHECK(dyn.g2(2.0, -1.0, 0.5, 0.5) == doctest::Approx(dense.g2(2.0, -1.0, 0.5, 0.5)).epsilon(1e-10));
  }
}

TEST_CASE("normalisation, factorisation and the linewidth identity") {
  auto liou = build_liouvillian(ModelParams::plambda_family(4.1479, 0.5, 40), 2);
  BeamDynamics dyn(liou);
  CHECK(dyn.g1(0.0) == doctest::Approx(1.0).epsilon(1e-9));
  const double big = 1e6;
  CHECK(dyn.g2ps(big) == doctest::Approx(1.0).epsilon(1e-6));
  // Translation invariance.
  CHECK(dyn.g2(0.0, 3.0, 1.0, 2.0) == doctest::Approx(dyn.g2(10.0, 13.0, 11.0, 12.0)).epsilon(1e-11));
  auto o = observe(liou);
  CHECK(o.linewidth * o.coherence == doctest::Approx(4.0 * o.flux).epsilon(1e-12));
  CHECK(o.solver_residual < 1e-10);
  // g1 decreases on a sampled grid (band route only).
  double prev = 2.0;
  for (int i = 0; i <= 40; ++i) {
    const double g = dyn.g1(i * 0.25 / o.linewidth);
    CHECK(g < prev);
    prev = g;
  }
}

TEST_CASE("Poissonian p family and the sub-Poissonian optima") {
  for (double p : {2.0, 4.0, 6.0})
    CHECK(std::abs(mandel_q(build_liouvillian(ModelParams::p_family(p, 300), 0))) < 1e-2);
  CHECK(mandel_q(build_liouvillian(ModelParams::plambda_family(4.1479, 0.5, 300), 0)) ==
        doctest::Approx(-0.5).epsilon(0.02));
  CHECK(mandel_q(build_liouvillian(ModelParams::pq_family(4.1479, -1.0, 300), 0)) ==
        doctest::Approx(-1.0).epsilon(0.01));
}

TEST_CASE("reciprocal gain/loss split leaves the coherence unchanged") {
  const double a = coherence(build_liouvillian(ModelParams::plambda_family(4.1479, 0.3, 200), 1));
  const double b = coherence(build_liouvillian(ModelParams::plambda_family(4.1479, 0.7, 200), 1));
  CHECK(a == doctest::Approx(b).epsilon(5e-3));
}

TEST_CASE("coherence equals twice the integral of g1") {
  auto liou = build_liouvillian(ModelParams::plambda_family(4.1479, 0.5, 60), 1);
  BeamDynamics dyn(liou);
  // G1 = F g1; coherence = 2 int_0^inf G1 ds. The horizon 100/l leaves a tail below e^-50;
  // it only sets the range, the integral itself does not use the coherence.
  const double T = 25.0 * coherence(liou) / liou.flux;
  const double I = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      [&](double s) { return dyn.g1(s); }, 0.0, T, 20, 1e-11);
  CHECK(2.0 * liou.flux * I == doctest::Approx(coherence(liou)).epsilon(1e-3));
}

TEST_CASE("discrete transfer-matrix Q extrapolates to the continuous value") {
  for (auto m : {ModelParams::plambda_family(4.1479, 0.5, 60), ModelParams::p_family(3.0, 40)}) {
    auto liou = build_liouvillian(m, 0);
    const double q = mandel_q(liou);
    const double q1 = mandel_q_discrete(liou, 1e-3), q2 = mandel_q_discrete(liou, 5e-4);
    CHECK(std::abs(2.0 * q2 - q1 - q) < 1e-6);
  }
}

TEST_CASE("band discrete Q matches the literal Kraus construction") {
  auto m = ModelParams::plambda_family(4.0, 0.4, 8);
  auto liou = build_liouvillian(m, 0);
  DenseModel dense(liou.ops, m);
  CHECK(mandel_q_discrete(liou, 1e-2) == doctest::Approx(dense.mandel_q_discrete(1e-2)).epsilon(1e-10));
}

TEST_CASE("Q from the g2 integral") {
  auto liou = build_liouvillian(ModelParams::plambda_family(4.1479, 0.5, 60), 0);
  auto r = mandel_q_from_g2_auto(liou);
  CHECK(r.q == doctest::Approx(mandel_q(liou)).epsilon(1e-2));
  CHECK_THROWS_AS(mandel_q_from_g2(liou, 0.0), Error);
  CHECK_THROWS_AS(mandel_q_from_g2(liou, 1.0), Error);
}

TEST_CASE("negative trace times are rejected") {
  auto liou = build_liouvillian(ModelParams::p_family(4.0, 10), 1);
  CHECK_THROWS_AS(g1_trace(liou, {0.0, -1.0}), Error);
}

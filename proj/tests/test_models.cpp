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

#include <cmath>
#include <numbers>

#include "hlaser/error.hpp"
#include "hlaser/models.hpp"

using namespace hlaser;

namespace {

// Direct evaluation, independent of the library's normalisation path.
std::vector<double> sine_weights(double p, int D) {
  std::vector<double> w(D);
  double s = 0.0;
  for (int n = 0; n < D; ++n) {
    w[n] = std::pow(std::sin(std::numbers::pi * (n + 1) / (D + 1)), p);
    s += w[n];
  }
  for (double& x : w) x /= s;
  return w;
}

}  // namespace

TEST_CASE("steady-state weights follow the sine profile") {
  for (double p : {1.0, 2.5, 4.1479}) {
    auto m = ModelParams::p_family(p, 37);
    auto rho = analytic_steady_state(m);
    auto ref = sine_weights(p, 37);
    double sum = 0.0;
    for (int n = 0; n < 37; ++n) {
      CHECK(rho[n] == doctest::Approx(ref[n]).epsilon(1e-13));
      sum += rho[n];
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("normalisation constant approaches its large-D limit") {
  for (double p : {2.0, 4.0}) {
    const int D = 20000;
    const double a = normalization_alpha(ModelParams::p_family(p, D));
    CHECK(a * (D + 1) == doctest::Approx(alpha_limit(p)).epsilon(1e-6));
  }
  // p = 2: Gamma(2) / Gamma(3/2) = 2 / sqrt(pi)
  CHECK(alpha_limit(2.0) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("gain and loss satisfy detailed balance with the analytic weights") {
  for (auto m : {ModelParams::p_family(3.3, 25), ModelParams::plambda_family(4.0, 0.3, 25),
                 ModelParams::plambda_family(4.0, 1.0, 25)}) {
    auto ops = build_operators(m);
    for (int n = 1; n < m.dim; ++n)
      CHECK(ops.G(n) * ops.G(n) * ops.rho[n - 1] ==
            doctest::Approx(ops.L(n) * ops.L(n) * ops.rho[n]).epsilon(1e-12));
  }
}

TEST_CASE("flat gain for the p family") {
  auto ops = build_operators(ModelParams::p_family(4.0, 12));
  for (double g : ops.gain) CHECK(g == 1.0);
}

TEST_CASE("pq family at q = 0 is the p family") {
  auto a = build_operators(ModelParams::p_family(4.1479, 40));
  auto b = build_operators(ModelParams::pq_family(4.1479, 0.0, 40));
  CHECK(a.gain == b.gain);
  CHECK(a.loss == b.loss);
  CHECK(a.rho == b.rho);
}

TEST_CASE("pq loss exponent at q = -1 is the half-split value") {
  auto a = build_operators(ModelParams::pq_family(4.0, -1.0, 30));
  auto b = build_operators(ModelParams::plambda_family(4.0, 0.5, 30));
  for (int n = 1; n < 30; ++n) CHECK(a.L(n) == doctest::Approx(b.L(n)).epsilon(1e-14));
}

TEST_CASE("mean excitation of the symmetric profile is mu") {
  auto m = ModelParams::p_family(4.0, 51);
  CHECK(mean_excitation(m) == doctest::Approx(m.mu()).epsilon(1e-12));
}

TEST_CASE("parameter validation") {
  auto bad = [](ModelParams m) {
    try {
      m.validate();
    } catch (const Error& e) {
      return e.kind() == ErrorKind::InvalidParams;
    }
    return false;
  };
  CHECK(bad(ModelParams::p_family(0.0, 10)));
  CHECK(bad(ModelParams::p_family(4.0, 2)));
  CHECK(bad(ModelParams::pq_family(4.0, 0.1, 10)));
  CHECK(bad(ModelParams::pq_family(4.0, -1.1, 10)));
  CHECK_NOTHROW(ModelParams::pq_family(4.0, -1.0, 3).validate());
  CHECK(parse_family("plambda") == Family::PLambda);
  CHECK_THROWS_AS(parse_family("x"), Error);
}

TEST_CASE("heisenberg regime metadata") {
  CHECK(ModelParams::p_family(4.0, 10).heisenberg_regime());
  CHECK_FALSE(ModelParams::p_family(2.0, 10).heisenberg_regime());
  CHECK_FALSE(ModelParams::plambda_family(4.0, 1.5, 10).heisenberg_regime());
}

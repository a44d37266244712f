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

#include "hlaser/analytics.hpp"
#include "hlaser/error.hpp"
#include "hlaser/observables.hpp"

using namespace hlaser;

TEST_CASE("ideal-beam correlation functions") {
  IdealBeam b{1.0, 0.2};
  CHECK(ideal_g1(b, 0.0) == 1.0);
  CHECK(ideal_g1(b, -5.0) == doctest::Approx(std::exp(-0.5)));
  CHECK(ideal_g2(b, 0.0, 0.0, 0.0, 0.0) == 1.0);
  // (0, s, s, 0) pairs: intensity correlations are flat for phase diffusion.
  CHECK(ideal_g2(b, 0.0, 3.0, 3.0, 0.0) == doctest::Approx(1.0));
  // (s, s, t, t): phase factor exp(2i(phi(t) - phi(s))), variance 4 l |t - s|
  CHECK(ideal_g2(b, 0.0, 0.0, 2.0, 2.0) == doctest::Approx(std::exp(-0.8)));
  CHECK_THROWS_AS(IdealBeam({1.0, 0.0}).validate(), Error);
}

TEST_CASE("phase-diffusion Monte-Carlo reproduces the closed forms") {
  IdealBeam b{1.0, 0.3};
  auto g1 = mc_ideal_g1(b, 2.0, 100000, 17);
  CHECK(std::abs(g1.mean - ideal_g1(b, 2.0)) < 3.0 * g1.stderr_);
  auto g2 = mc_ideal_g2(b, 0.0, 1.5, -0.5, 2.5, 100000, 18);
  CHECK(std::abs(g2.mean - ideal_g2(b, 0.0, 1.5, -0.5, 2.5)) < 3.0 * g2.stderr_);
  auto again = mc_ideal_g2(b, 0.0, 1.5, -0.5, 2.5, 100000, 18);
  CHECK(again.mean == g2.mean);
}

TEST_CASE("p-family elements equal the band-1 resolvent integrand") {
  for (int D : {3, 4, 8, 50, 301}) {
    auto m = ModelParams::p_family(4.1479, D);
    auto ops = build_operators(m);
    auto b1 = liouvillian_block(ops, m, 1);
    std::vector<double> v(D - 1);
    for (int k = 0; k < D - 1; ++k) v[k] = ops.L(k + 1) * ops.rho[k + 1];
    auto lv = b1.apply(v);
    auto fs = fn_elements(m);
    double scale = 0.0;
    for (double f : fs.elements) scale = std::max(scale, std::abs(f));
    CHECK(fs.elements[0] == 0.0);
    // The band route cancels terms of size L_n^2 rho_n down to O(D^-5); that sets the floor.
    double tr = 0.0;
    for (int n = 1; n < D; ++n) {
      const double floor = 1e-12 * (ops.L(n) * ops.L(n) * ops.rho[n] + scale);
      CHECK(std::abs(fs.elements[n] - ops.L(n) * lv[n - 1]) < floor);
      tr += ops.L(n) * lv[n - 1];
    }
    CHECK(fs.total == doctest::Approx(tr).epsilon(1e-12));
  }
}

TEST_CASE("closed-form sub-Poissonian elements") {
  const int D = 200;
  for (double lam : {0.0, 0.3, 0.5}) {
    auto m = ModelParams::plambda_family(4.1479, lam, D);
    auto fs = fn_elements(m);
    auto rho = build_operators(m).rho;
    for (int n = 1; n < D - 2; n += 17)
      CHECK(fs.elements[n] == doctest::Approx(fn_closed_form_plambda(rho, lam, n)).epsilon(1e-10));
  }
  auto m = ModelParams::pq_family(4.1479, -0.5, D);
  auto fs = fn_elements(m);
  auto rho = build_operators(m).rho;
  // The pq closed form neglects the D[G]^2 cross terms; it holds to leading order.
  for (int n = 40; n < D - 40; n += 20)
    CHECK(fs.elements[n] == doctest::Approx(fn_closed_form_pq(rho, -0.5, n)).epsilon(0.05));
}

TEST_CASE("Taylor elements track the exact ones in the interior") {
  auto m = ModelParams::p_family(4.1479, 500);
  auto fs = fn_elements(m);
  for (int n = 100; n <= 400; n += 50)
    CHECK(fs.approx_elements[n] == doctest::Approx(fs.elements[n]).epsilon(0.02));
  CHECK(fs.regime == FnRegime::CenterDominated);
  auto edge = fn_elements(ModelParams::p_family(2.0, 10000));
  CHECK(edge.regime == FnRegime::EdgeDominated);
  std::size_t arg = 0;
  for (std::size_t i = 0; i < edge.elements.size(); ++i)
    if (std::abs(edge.elements[i]) > std::abs(edge.elements[arg])) arg = i;
  CHECK((arg == 1 || arg == edge.elements.size() - 1));
}

TEST_CASE("ansatz linewidth against the resolvent") {
  // The pq gap closes roughly like 1/D: 7.8% at D = 300, 4.5% at 500, 2.1% at 1000.
  for (auto m : {ModelParams::p_family(4.15, 500), ModelParams::plambda_family(4.15, 0.5, 500),
                 ModelParams::pq_family(4.15, -1.0, 500)}) {
    auto liou = build_liouvillian(m, 1);
    const double est = 4.0 * liou.flux / linewidth_ansatz(m);
    CHECK(est == doctest::Approx(coherence(liou)).epsilon(m.family == Family::P ? 0.03 : 0.05));
  }
  const double l0 = linewidth_ansatz(ModelParams::pq_family(4.15, 0.0, 300));
  const double l1 = linewidth_ansatz(ModelParams::pq_family(4.15, -1.0, 300));
  CHECK(l1 / l0 == doctest::Approx(0.25).epsilon(0.03));
}

TEST_CASE("coherence prefactor and optimal p") {
  // Direct gamma-function evaluation.
  const double p = 5.0;
  const double ref = 256.0 / (std::pow(std::numbers::pi, 4) * p * p) * std::tgamma(3.0) *
                     std::tgamma(1.5) / (std::tgamma(3.5) * std::tgamma(1.0));
  CHECK(coherence_prefactor(p) == doctest::Approx(ref).epsilon(1e-13));
  CHECK(coherence_prefactor(4.0) == doctest::Approx(0.0616).epsilon(1e-3));
  CHECK(optimal_p() == doctest::Approx(4.1479).epsilon(5e-4 / 4.1479));
  CHECK(coherence_prefactor(optimal_p()) > coherence_prefactor(4.0));
  CHECK(coherence_prefactor(optimal_p()) > coherence_prefactor(4.3));
  try {
    coherence_prefactor(3.0);
    FAIL("expected OutOfDomain");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::OutOfDomain);
  }
}

TEST_CASE("family divisors") {
  CHECK(family_divisor(ModelParams::plambda_family(4, 0.5, 10)) == 0.5);
  CHECK(family_divisor(ModelParams::plambda_family(4, 0.0, 10)) == 1.0);
  CHECK(family_divisor(ModelParams::pq_family(4, -1.0, 10)) == 0.25);
  auto m = ModelParams::p_family(4.1479, 301);
  CHECK(coherence_formula(m) == doctest::Approx(coherence_prefactor(4.1479) * std::pow(150.0, 4)));
}

TEST_CASE("Heisenberg bound") {
  const double z = 2.338107410459767;
  CHECK(heisenberg_bound(10.0) == doctest::Approx(4.0 * std::pow(z / 3.0, 3) / 100.0).epsilon(1e-15));
  CHECK_THROWS_AS(heisenberg_bound(0.0), Error);
}

TEST_CASE("reduced MSE quadrature equals the closed form") {
  for (double l : {1e-3, 0.05, 1.0})
    for (double tau : {0.5, 3.0, 40.0}) {
      IdealBeam b{1.0, l};
      const double a = retrofiltering_mse_ideal(b, tau).value;
      CHECK(a == doctest::Approx(retrofiltering_mse_closed_form(b, tau)).epsilon(1e-10));
    }
}

TEST_CASE("brute-force integrals converge to the reduced value") {
  IdealBeam b{1.0, 0.4};
  const double tau = 2.0;
  const double ref = retrofiltering_mse_closed_form(b, tau);
  const double e1 = std::abs(retrofiltering_mse_bruteforce(b, tau, 8) - ref);
  const double e2 = std::abs(retrofiltering_mse_bruteforce(b, tau, 16) - ref);
  CHECK(e2 < e1);
  CHECK(e2 / ref < 5e-3);
}

TEST_CASE("MSE asymptote at the optimal window") {
  IdealBeam b{1.0, 1e-6};
  const double tau = mse_optimal_window(b);
  auto r = retrofiltering_mse_ideal(b, tau);
  CHECK(r.in_window);
  CHECK(r.value == doctest::Approx(r.asymptote).epsilon(0.02));
  CHECK(mse_full_window(b) == doctest::Approx(2.0 * tau));
  CHECK(retrofiltering_mse_ideal(b, 2.0 * tau).value / r.asymptote == doctest::Approx(1.25).epsilon(0.02));
}

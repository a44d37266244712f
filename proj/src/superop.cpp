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

#include "hlaser/superop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hlaser/error.hpp"

namespace hlaser {

const BandMatrix& BandLiouvillian::block(int k) const {
  const int a = std::abs(k);
  if (a >= static_cast<int>(blocks.size()))
    raise(ErrorKind::InconsistentInputs, "band " + std::to_string(k) + " not built");
  return blocks[a];
}

BandMatrix dissipator_block(int dim, int offset, const std::function<double(int)>& amp, int k) {
  k = std::abs(k);
  const int n = dim - k;
  BandMatrix b(n, std::max(0, -offset), std::max(0, offset));
  auto cc = [&](int i) {  // (c^T c)_{ii} = c(i - offset, i)^2
    const int r = i - offset;
    if (r < 0 || r >= dim) return 0.0;
    const double a = amp(r);
    return a * a;
  };
  for (int m = 0; m < n; ++m) {
    const int src = m + offset;
    if (src >= 0 && src < n) {
      const double c = amp(m) * amp(m + k);
      if (c != 0.0) b.add(m, src, c);
    }
    b.add(m, m, -0.5 * (cc(m) + cc(m + k)));
  }
  return b;
}

namespace {

std::function<double(int)> gain_amp(const CavityOperators& ops) {
  const int D = ops.dim();
  return [&ops, D](int i) { return (i >= 1 && i <= D - 1) ? ops.G(i) : 0.0; };
}

std::function<double(int)> loss_amp(const CavityOperators& ops) {
  const int D = ops.dim();
  return [&ops, D](int i) { return (i >= 0 && i <= D - 2) ? ops.L(i + 1) : 0.0; };
}

}  // namespace

BandMatrix gain_block(const CavityOperators& ops, int k) {
  return dissipator_block(ops.dim(), -1, gain_amp(ops), k);
}

BandMatrix loss_block(const CavityOperators& ops, int k) {
  return dissipator_block(ops.dim(), +1, loss_amp(ops), k);
}

BandMatrix liouvillian_block(const CavityOperators& ops, const ModelParams& params, int k) {
  BandMatrix g = gain_block(ops, k);
  BandMatrix l = loss_block(ops, k);
  if (params.family == Family::PQ && params.q != 0.0)
    return g + l + (g * g).scaled(0.5 * params.q);
  return g + l;
}

double compute_flux(const CavityOperators& ops, const std::vector<double>& rho) {
  double f = 0.0;
  for (int n = 1; n < ops.dim(); ++n) f += ops.L(n) * ops.L(n) * rho[n];
  return f;
}

std::vector<double> kernel_vector(const BandMatrix& block0, bool allow_negative) {
  const int n = block0.size();
  const int r = n / 2;
  BandMatrix red = block0.without(r);
  BandLU lu(red);
  if (lu.singular() || lu.pivot_ratio() < 1e-13)
    raise(ErrorKind::DegenerateKernel, "band-0 kernel is not one-dimensional");
  std::vector<double> rhs(n - 1);
  for (int i = 0, ii = 0; i < n; ++i) {
    if (i == r) continue;
    rhs[ii++] = -block0(i, r);
  }
  std::vector<double> z = lu.solve(rhs);
  std::vector<double> x(n);
  for (int i = 0, ii = 0; i < n; ++i) x[i] = (i == r) ? 1.0 : z[ii++];
  double sum = 0.0;
  for (double v : x) sum += v;
  for (double& v : x) v /= sum;
  for (double& v : x) {
    if (v < -1e-12) {
      if (!allow_negative) raise(ErrorKind::DegenerateKernel, "steady state has negative weight");
      continue;
    }
    if (v < 0.0) v = 0.0;
  }
  return x;
}

BandLiouvillian build_liouvillian(const CavityOperators& ops, const ModelParams& params,
                                  int max_band) {
  params.validate();
  if (ops.dim() != params.dim || static_cast<int>(ops.gain.size()) != params.dim - 1 ||
      static_cast<int>(ops.loss.size()) != params.dim - 1)
    raise(ErrorKind::InconsistentInputs, "operator dimension does not match params.dim");
  if (max_band < 0) raise(ErrorKind::InvalidParams, "max_band must be >= 0");
  max_band = std::min(max_band, params.dim - 1);
  BandLiouvillian liou;
  liou.params = params;
  liou.ops = ops;
  for (int k = 0; k <= max_band; ++k) liou.blocks.push_back(liouvillian_block(ops, params, k));
  liou.rho_ss = kernel_vector(liou.blocks[0], !params.is_markovian());
  liou.flux = compute_flux(ops, liou.rho_ss);
  return liou;
}

BandLiouvillian build_liouvillian(const ModelParams& params, int max_band) {
  return build_liouvillian(build_operators(params), params, max_band);
}

TransferSet build_transfer(const CavityOperators& ops, double gamma) {
  if (!(gamma >= 0.0)) raise(ErrorKind::InvalidParams, "gamma must be >= 0");
  const int D = ops.dim();
  TransferSet t;
  t.gamma = gamma;
  const double sg = std::sqrt(gamma);
  t.a0.resize(D - 1);
  t.a3.resize(D - 1);
  t.a1.resize(D);
  t.a2.assign(D, 0.0);
  for (int n = 1; n < D; ++n) {
    t.a0[n - 1] = sg * ops.G(n);
    t.a3[n - 1] = sg * ops.L(n);
  }
  for (int n = 0; n < D; ++n) {
    double g2 = n <= D - 2 ? ops.G(n + 1) * ops.G(n + 1) : 0.0;
    double l2 = n >= 1 ? ops.L(n) * ops.L(n) : 0.0;
    const double rest = 1.0 - gamma * (g2 + l2);
    if (rest < 0.0)
      raise(ErrorKind::GammaTooLarge, "I - gamma (G^T G + L^T L) is not positive at n=" +
                                          std::to_string(n));
    t.a1[n] = std::sqrt(rest);
  }
  return t;
}

double TransferSet::isometry_error() const {
  const int D = dim();
  double err = 0.0;
  for (int n = 0; n < D; ++n) {
    double s = a1[n] * a1[n] + a2[n] * a2[n];
    if (n <= D - 2) s += a0[n] * a0[n];  // A0(n+1, n)
    if (n >= 1) s += a3[n - 1] * a3[n - 1];  // A3(n-1, n)
    err = std::max(err, std::abs(s - 1.0));
  }
  return err;
}

BandMatrix TransferSet::block(int k) const {
  k = std::abs(k);
  const int D = dim();
  const int n = D - k;
  BandMatrix b(n, 1, 1);
  for (int m = 0; m < n; ++m) {
    b.add(m, m, a1[m] * a1[m + k] + a2[m] * a2[m + k]);
    if (m >= 1) b.add(m, m - 1, a0[m - 1] * a0[m + k - 1]);
    if (m + 1 < n) b.add(m, m + 1, a3[m] * a3[m + k]);
  }
  return b;
}

std::vector<double> TransferSet::gain_recovered() const {
  std::vector<double> g(a0);
  for (double& v : g) v /= std::sqrt(gamma);
  return g;
}

std::vector<double> TransferSet::loss_recovered() const {
  std::vector<double> l(a3);
  for (double& v : l) v /= std::sqrt(gamma);
  return l;
}

std::vector<PqNormRow> pq_norm_diagnostics(const ModelParams& params,
                                           const std::vector<int>& dims) {
  if (params.family != Family::PQ)
    raise(ErrorKind::InvalidParams, "pq_norm_diagnostics needs the pq family");
  std::vector<PqNormRow> out;
  for (int D : dims) {
    ModelParams pd = params;
    pd.dim = D;
    CavityOperators ops = build_operators(pd);
    const auto& rho = ops.rho;
    auto top = [D](int i) { return i == D - 1 ? 1.0 : 0.0; };
    PqNormRow row;
    row.dim = D;
    double sl = 0.0, sg = 0.0, st = 0.0;
    for (int k = 0; k < D; ++k) {
      const int n = D - k;
      std::vector<double> x(n);
      for (int m = 0; m < n; ++m) x[m] = std::sqrt(rho[m] * rho[m + k]);
      const double w = k == 0 ? 1.0 : 2.0;  // bands k and -k
      auto acc = [&](const BandMatrix& b) {
        auto y = b.apply(x);
        double s = 0.0;
        for (double v : y) s += v * v;
        return w * s;
      };
      BandMatrix pi = dissipator_block(D, 0, top, k);
      sl += acc(loss_block(ops, k));
      sg += acc(gain_block(ops, k) + pi);
      st += acc(pi);
    }
    row.loss_on_pure = std::sqrt(sl);
    row.gain_map_on_pure = std::sqrt(sg);
    row.top_on_pure = std::sqrt(st);
    BandMatrix l0 = liouvillian_block(ops, pd, 0);
    auto y = l0.apply(rho);
    double s = 0.0, r2 = 0.0;
    for (double v : y) s += v * v;
    for (double v : rho) r2 += v * v;
    row.liouvillian_on_ss = std::sqrt(s);
    row.roundoff_floor = 32.0 * std::numeric_limits<double>::epsilon() * l0.norm1() * std::sqrt(r2);
    out.push_back(row);
  }
  return out;
}

}  // namespace hlaser

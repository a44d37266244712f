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

#include "hlaser/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hlaser {

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> x0, const std::vector<double>& lo,
                          const std::vector<double>& hi, const SimplexOptions& opts) {
  const std::size_t n = x0.size();
  auto clamp = [&](std::vector<double>& x) {
    for (std::size_t i = 0; i < n; ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
  };
  SimplexResult res;
  auto eval = [&](std::vector<double>& x) {
    clamp(x);
    ++res.evals;
    return f(x);
  };

  std::vector<std::vector<double>> pts(n + 1, x0);
  std::vector<double> fv(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double step = opts.initial_step * (hi[i] - lo[i]);
    // Step inward if the start sits on the upper face.
    pts[i + 1][i] += (x0[i] + step <= hi[i]) ? step : -step;
  }
  for (std::size_t i = 0; i <= n; ++i) fv[i] = eval(pts[i]);

  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, hi[i] - lo[i]);

  std::vector<std::size_t> idx(n + 1);
  std::vector<double> c(n), xr(n), xe(n), xc(n);
  while (res.evals < opts.max_evals) {
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return fv[a] < fv[b]; });
    const std::size_t best = idx[0], worst = idx[n], second = idx[n - 1];

    double diam = 0.0;
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        diam = std::max(diam, std::abs(pts[idx[i]][j] - pts[best][j]));
    if (diam <= opts.xtol * scale && std::abs(fv[worst] - fv[best]) <= opts.ftol) break;
    if (diam <= opts.xtol * scale * 1e-3) break;

    std::fill(c.begin(), c.end(), 0.0);
    for (std::size_t i = 0; i <= n; ++i)
      if (i != worst)
        for (std::size_t j = 0; j < n; ++j) c[j] += pts[i][j] / n;

    for (std::size_t j = 0; j < n; ++j) xr[j] = c[j] + (c[j] - pts[worst][j]);
    const double fr = eval(xr);
    if (fr < fv[best]) {
      for (std::size_t j = 0; j < n; ++j) xe[j] = c[j] + 2.0 * (c[j] - pts[worst][j]);
      const double fe = eval(xe);
      if (fe < fr) {
        pts[worst] = xe;
        fv[worst] = fe;
      } else {
        pts[worst] = xr;
        fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[second]) {
      pts[worst] = xr;
      fv[worst] = fr;
      continue;
    }
    const bool outside = fr < fv[worst];
    for (std::size_t j = 0; j < n; ++j)
      xc[j] = outside ? c[j] + 0.5 * (xr[j] - c[j]) : c[j] + 0.5 * (pts[worst][j] - c[j]);
    const double fc = eval(xc);
    if (fc < std::min(fr, fv[worst])) {
      pts[worst] = xc;
      fv[worst] = fc;
      continue;
    }
    // shrink toward the best vertex
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t j = 0; j < n; ++j) pts[i][j] = pts[best][j] + 0.5 * (pts[i][j] - pts[best][j]);
      fv[i] = eval(pts[i]);
    }
  }
  const auto b = std::min_element(fv.begin(), fv.end()) - fv.begin();
  res.x = pts[b];
  res.f = fv[b];
  return res;
}

}  // namespace hlaser

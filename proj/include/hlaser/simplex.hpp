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

#include <functional>
#include <vector>

namespace hlaser {

struct SimplexOptions {
  int max_evals = 400;
  double xtol = 1e-9;  // simplex diameter, relative to the box size
  double ftol = 1e-13;
  double initial_step = 0.1;  // fraction of each box side
};

struct SimplexResult {
  std::vector<double> x;
  double f = 0.0;
  int evals = 0;
};

// Nelder-Mead minimisation inside a box; trial points are clamped to [lo, hi].
SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> x0, const std::vector<double>& lo,
                          const std::vector<double>& hi, const SimplexOptions& opts = {});

}  // namespace hlaser

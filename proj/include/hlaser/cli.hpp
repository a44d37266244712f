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

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "hlaser/models.hpp"

namespace hlaser::cli {

constexpr int kSchemaVersion = 1;

enum ExitCode { kOk = 0, kVerifyFailed = 1, kUsage = 2, kSolver = 3 };

struct ResultRow {
  ModelParams params;
  double mu = 0.0;
  double flux = 0.0;
  double coherence = 0.0;
  double linewidth = 0.0;
  double mandel_q = 0.0;
  double wall_time_s = 0.0;
  double solver_residual = 0.0;
  std::string error;  // empty on success
};

// Solves one model; solver errors land in row.error.
ResultRow compute_row(const ModelParams& params, bool with_mandel_q = true, bool timing = true);

// 17 significant digits, '.' decimal.
std::string format_number(double v);
// RFC-4180 quoting when needed.
std::string csv_field(const std::string& s);
std::vector<std::string> split_csv_line(const std::string& line);
// Header-keyed records from CSV text.
std::vector<std::map<std::string, std::string>> parse_csv(const std::string& text);

// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hlaser::cli

// Copyright 2026 The lattail Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <exception>
#include <iosfwd>
#include <string>
#include <vector>

namespace lattail {

/// Process exit codes.
enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitUsage = 2, kExitNumeric = 3 };

/// Run parameters, read from an optional JSON config file and overridden by flags.
struct RunConfig {
  std::string model;
  /// Propagation-region momentum grid; 0 picks 1024 in one dimension and 64 otherwise.
  int region_grid = 0;
  int torus_grid = 64;
  std::int64_t torus_max_points = 64 * 64 * 32;
  double lambda_max = 12.0;
  int radii = 40;
  int directions = 64;
  int radial_directions = 12;
  double gap_tol = 1e-8;
  double regular_gap = 1e-4;
  double tie_tol = 1e-6;
  double hull_margin = 1e-9;
  double xtol = 1e-10;
  std::string out;
  int threads = 0;
  std::uint64_t seed = 20260214;
  int margin = 8;
  std::int64_t memory_budget_mb = 2048;

  /// Throws IoError when a value is outside its documented range.
  void validate() const;
};

/// Parses a JSON config; unknown keys and out-of-range values raise IoError.
RunConfig parse_run_config(const std::string& json_text);

/// "start:stop:count" or a single number.
std::vector<double> parse_axis_spec(const std::string& spec);
/// Comma-separated numbers.
std::vector<double> parse_vector(const std::string& text);

/// Exit code for an exception escaping a command.
int exit_code_for(const std::exception& e);

/// Command-line entry point; returns the process exit code.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace lattail

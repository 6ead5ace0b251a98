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

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lattail {

enum class SweepKind { DualRate, Rate, RadialRate, Region, Tail, Report };

std::string_view to_string(SweepKind kind);
/// Throws IoError for unknown names.
SweepKind sweep_kind_from(std::string_view name);

/// A table of equal-length numeric columns plus ordered key/value metadata.
struct SweepResult {
  SweepKind kind = SweepKind::Report;
  std::vector<std::string> column_names;
  std::vector<std::vector<double>> columns;
  std::vector<std::pair<std::string, std::string>> metadata;

  void add_column(std::string name, std::vector<double> values);
  bool has_column(std::string_view name) const;
  const std::vector<double>& column(std::string_view name) const;
  /// Replaces an existing key or appends a new one.
  void set_meta(const std::string& key, std::string value);
  std::optional<std::string> meta(std::string_view key) const;
  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
  /// Throws IoError on unequal column lengths or a column set that misses every required set.
  void validate() const;

  bool operator==(const SweepResult& other) const;
};

/// Alternative column sets; a table of the given kind must contain at least one of them.
std::vector<std::vector<std::string>> required_column_sets(SweepKind kind);

/// Locale-independent, 17 significant digits, "inf" / "-inf" / "nan" tokens.
std::string format_number(double v);
/// Inverse of format_number; throws IoError on garbage.
double parse_number(std::string_view text);

std::string to_csv(const SweepResult& sr);
SweepResult from_csv(const std::string& text);
void write_csv(const SweepResult& sr, const std::string& path);
SweepResult read_csv(const std::string& path);

/// Writes text to path (or stdout for "-"); throws IoError on failure.
void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

/// Outcome of one verification check.
struct CheckResult {
  std::string name;
  /// "pass", "fail" or "skip".
  std::string status;
  double measured = 0.0;
  double limit = 0.0;
  std::string detail;
  bool passed() const { return status != "fail"; }
};

/// JSON report with the given metadata; "all_passed" is true iff no check failed.
std::string report_to_json(const std::vector<CheckResult>& checks,
                           const std::vector<std::pair<std::string, std::string>>& metadata);
SweepResult report_to_sweep(const std::vector<CheckResult>& checks);

}  // namespace lattail

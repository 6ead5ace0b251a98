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

#include "lattail/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "lattail/error.hpp"

namespace lattail {
namespace {

constexpr std::pair<SweepKind, std::string_view> kKindNames[] = {
    {SweepKind::DualRate, "DualRate"}, {SweepKind::Rate, "Rate"},     {SweepKind::RadialRate, "RadialRate"},
    {SweepKind::Region, "Region"},     {SweepKind::Tail, "Tail"},     {SweepKind::Report, "Report"},
};

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  std::replace(s.begin(), s.end(), '\r', ' ');
  return s;
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::string_view to_string(SweepKind kind) {
  for (const auto& [k, n] : kKindNames)
    if (k == kind) return n;
  return "Report";
}

SweepKind sweep_kind_from(std::string_view name) {
  for (const auto& [k, n] : kKindNames)
    if (n == name) return k;
  throw IoError("unknown table kind '" + std::string(name) + "'");
}

void SweepResult::add_column(std::string name, std::vector<double> values) {
  if (has_column(name)) throw IoError("duplicate column '" + name + "'");
  column_names.push_back(std::move(name));
  columns.push_back(std::move(values));
}

bool SweepResult::has_column(std::string_view name) const {
  return std::find(column_names.begin(), column_names.end(), name) != column_names.end();
}

const std::vector<double>& SweepResult::column(std::string_view name) const {
  auto it = std::find(column_names.begin(), column_names.end(), name);
  if (it == column_names.end()) throw IoError("no column '" + std::string(name) + "'");
  return columns[it - column_names.begin()];
}

void SweepResult::set_meta(const std::string& key, std::string value) {
  for (auto& [k, v] : metadata)
    if (k == key) {
      v = std::move(value);
      return;
    }
  metadata.emplace_back(key, std::move(value));
}

std::optional<std::string> SweepResult::meta(std::string_view key) const {
  for (const auto& [k, v] : metadata)
    if (k == key) return v;
  return std::nullopt;
}

void SweepResult::validate() const {
  if (column_names.size() != columns.size()) throw IoError("column names and data disagree");
  for (const auto& c : columns)
    if (c.size() != rows()) throw IoError("columns have unequal lengths");
  for (const auto& set : required_column_sets(kind)) {
    if (std::all_of(set.begin(), set.end(), [&](const std::string& n) { return has_column(n); })) return;
  }
  std::string want;
  for (const auto& set : required_column_sets(kind)) {
    want += want.empty() ? "" : " or ";
    for (std::size_t i = 0; i < set.size(); ++i) want += (i ? "," : "") + set[i];
  }
  throw IoError("malformed header: " + std::string(to_string(kind)) + " table needs columns " + want);
}

bool SweepResult::operator==(const SweepResult& o) const {
  if (kind != o.kind || column_names != o.column_names || metadata != o.metadata) return false;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c].size() != o.columns[c].size()) return false;
    for (std::size_t r = 0; r < columns[c].size(); ++r) {
      double a = columns[c][r], b = o.columns[c][r];
      if (!(a == b) && !(std::isnan(a) && std::isnan(b))) return false;
    }
  }
  return true;
}

std::vector<std::vector<std::string>> required_column_sets(SweepKind kind) {
  switch (kind) {
    case SweepKind::DualRate: return {{"R"}};
    case SweepKind::Rate: return {{"I"}, {"I_boundary"}};
    case SweepKind::RadialRate: return {{"r", "I_radial"}, {"ell", "R_radial"}};
    case SweepKind::Region: return {{"branch", "weight"}};
    case SweepKind::Tail: return {{"t", "p_tail", "empirical_rate", "below_precision"}};
    case SweepKind::Report: return {{"check", "pass", "measured", "limit"}};
  }
  return {};
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_number(std::string_view text) {
  std::string t = trim(text);
  if (t == "inf" || t == "+inf") return std::numeric_limits<double>::infinity();
  if (t == "-inf") return -std::numeric_limits<double>::infinity();
  if (t == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const char* b = t.data();
  if (!t.empty() && *b == '+') ++b;
  auto res = std::from_chars(b, t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size() || t.empty())
    throw IoError("not a number: '" + t + "'");
  return v;
}

std::string to_csv(const SweepResult& sr) {
  sr.validate();
  std::string out = "# kind: " + std::string(to_string(sr.kind)) + "\n";
  for (const auto& [k, v] : sr.metadata) {
    if (k.find(':') != std::string::npos) throw IoError("metadata key may not contain ':'");
    out += "# " + one_line(k) + ": " + one_line(v) + "\n";
  }
  for (std::size_t c = 0; c < sr.column_names.size(); ++c) out += (c ? "," : "") + sr.column_names[c];
  out += '\n';
  for (std::size_t r = 0; r < sr.rows(); ++r) {
    for (std::size_t c = 0; c < sr.columns.size(); ++c) {
      if (c) out += ',';
      out += format_number(sr.columns[c][r]);
    }
    out += '\n';
  }
  return out;
}

SweepResult from_csv(const std::string& text) {
  SweepResult sr;
  std::istringstream is(text);
  std::string line;
  bool have_kind = false, have_header = false;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!have_header && !line.empty() && line[0] == '#') {
      auto colon = line.find(':');
      if (colon == std::string::npos) throw IoError("malformed metadata line " + std::to_string(lineno));
      std::string key = trim(std::string_view(line).substr(1, colon - 1));
      std::string value = colon + 1 < line.size() ? line.substr(colon + (line[colon + 1] == ' ' ? 2 : 1)) : "";
      if (key == "kind") {
        sr.kind = sweep_kind_from(trim(value));
        have_kind = true;
      } else {
        sr.metadata.emplace_back(key, value);
      }
      continue;
    }
    if (line.empty()) continue;
    if (!have_header) {
      if (!have_kind) throw IoError("malformed header: missing '# kind:' line");
      for (auto& n : split(line, ',')) {
        n = trim(n);
        if (n.empty()) throw IoError("malformed header: empty column name");
        sr.add_column(n, {});
      }
      have_header = true;
      continue;
    }
    auto cells = split(line, ',');
    if (cells.size() != sr.columns.size())
      throw IoError("row " + std::to_string(lineno) + " has " + std::to_string(cells.size()) + " fields, expected " +
                    std::to_string(sr.columns.size()));
    for (std::size_t c = 0; c < cells.size(); ++c) sr.columns[c].push_back(parse_number(cells[c]));
  }
  if (!have_header) throw IoError("malformed header: no header row");
  sr.validate();
  return sr;
}

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << text;
  f.close();
  if (!f) throw IoError("write to '" + path + "' failed");
}

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_csv(const SweepResult& sr, const std::string& path) { write_text(path, to_csv(sr)); }

SweepResult read_csv(const std::string& path) { return from_csv(read_text(path)); }

std::string report_to_json(const std::vector<CheckResult>& checks,
                           const std::vector<std::pair<std::string, std::string>>& metadata) {
  auto num = [](double v) -> nlohmann::json {
    if (std::isfinite(v)) return v;
    return format_number(v);
  };
  nlohmann::ordered_json doc;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [k, v] : metadata) meta[k] = v;
  doc["metadata"] = meta;
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  bool all = true;
  for (const auto& c : checks) {
    all = all && c.passed();
    nlohmann::ordered_json e;
    e["name"] = c.name;
    e["status"] = c.status;
    e["measured"] = num(c.measured);
    e["limit"] = num(c.limit);
    if (!c.detail.empty()) e["detail"] = c.detail;
    arr.push_back(e);
  }
  doc["checks"] = arr;
  doc["all_passed"] = all;
  return doc.dump(2) + "\n";
}

SweepResult report_to_sweep(const std::vector<CheckResult>& checks) {
  SweepResult sr;
  sr.kind = SweepKind::Report;
  std::vector<double> id, pass, measured, limit;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    id.push_back(static_cast<double>(i + 1));
    pass.push_back(checks[i].status == "pass" ? 1.0 : checks[i].status == "skip" ? -1.0 : 0.0);
    measured.push_back(checks[i].measured);
    limit.push_back(checks[i].limit);
    sr.set_meta("check " + std::to_string(i + 1), checks[i].name);
  }
  sr.add_column("check", id);
  sr.add_column("pass", pass);
  sr.add_column("measured", measured);
  sr.add_column("limit", limit);
  return sr;
}

}  // namespace lattail

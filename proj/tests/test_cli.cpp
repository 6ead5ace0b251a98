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

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "lattail/catalog.hpp"
#include "lattail/cli.hpp"
#include "lattail/error.hpp"
#include "lattail/io.hpp"
#include "oracles.hpp"

using namespace lattail;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "lattail");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "lattail_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(run({"bogus"}).code == kExitUsage);
  CHECK(run({"rate", "coin1d"}).code == kExitUsage);
  CHECK(run({"validate", "no_such_file.json"}).code == kExitUsage);
  fs::path cfg = scratch("bad.json");
  write_text(cfg.string(), R"({"torus_grid": 32, "colour": "red"})");
  CHECK(run({"--config", cfg.string(), "validate", "coin1d"}).code == kExitUsage);
  CHECK_THROWS_AS(parse_run_config(R"({"radii": -1})"), IoError);
  CHECK(parse_run_config(R"({"radii": 12})").radii == 12);
}

TEST_CASE("axis specs") {
  CHECK(parse_axis_spec("0:1:3") == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(parse_axis_spec("0.25") == std::vector<double>{0.25});
  CHECK(parse_vector("1,-2,3.5") == std::vector<double>{1.0, -2.0, 3.5});
  CHECK_THROWS_AS(parse_axis_spec("0:1"), IoError);
}

TEST_CASE("catalog subcommands") {
  Run r = run({"catalog", "list"});
  CHECK(r.code == kExitOk);
  for (const auto& n : catalog_names()) CHECK(r.out.find(n) != std::string::npos);
  fs::path f = scratch("weyl2d.json");
  CHECK(run({"catalog", "emit", "weyl2d", "--out", f.string()}).code == kExitOk);
  Run v = run({"validate", f.string()});
  CHECK(v.code == kExitOk);
  CHECK(nlohmann::json::parse(v.out)["dim_lattice"] == 2);
}

TEST_CASE("rate sweep outside the jump hull is infinite") {
  fs::path f = scratch("rate.csv");
  CHECK(run({"rate", "coin1d", "--x-spec=-1.2:1.2:7", "--out", f.string()}).code == kExitOk);
  SweepResult sr = read_csv(f.string());
  CHECK(sr.kind == SweepKind::Rate);
  const auto& x = sr.column("x_1");
  const auto& I = sr.column("I");
  const double a = 1.0 / std::sqrt(2.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::abs(x[i]) > 1.0)
      CHECK(std::isinf(I[i]));
    else
      CHECK(I[i] == doctest::Approx(oracle::coin_rate(a, x[i])).epsilon(1e-6));
  }
}

TEST_CASE("thread count does not change output") {
  fs::path a = scratch("t1.csv"), b = scratch("t3.csv");
  CHECK(run({"--threads", "1", "rate", "coin1d(0.4)", "--x-spec=-1:1:21", "--out", a.string()}).code == kExitOk);
  CHECK(run({"--threads", "3", "rate", "coin1d(0.4)", "--x-spec=-1:1:21", "--out", b.string()}).code == kExitOk);
  CHECK(read_text(a.string()) == read_text(b.string()));
  CHECK(run({"--threads", "1", "region", "weyl2d", "--grid", "32", "--out", a.string()}).code == kExitOk);
  CHECK(run({"--threads", "3", "region", "weyl2d", "--grid", "32", "--out", b.string()}).code == kExitOk);
  CHECK(read_text(a.string()) == read_text(b.string()));
}

TEST_CASE("boundary and bounds") {
  Run r = run({"boundary", "coin1d", "--n", "1"});
  CHECK(r.code == kExitOk);
  Run b = run({"bounds", "coin1d", "--x", "0.5", "--x", "1.5"});
  CHECK(b.code == kExitOk);
  auto j = nlohmann::json::parse(b.out);
  CHECK(j[0]["in_conv_F"] == true);
  CHECK(j[1]["rate_infinite"] == true);
  CHECK(j[1]["gauge"].get<double>() == doctest::Approx(1.5));
  CHECK(run({"boundary", "weyl2d", "--n", "1,1"}).code == kExitNumeric);
}

TEST_CASE("simulate writes a tail table") {
  Run r = run({"simulate", "coin1d", "--t-max", "200", "--region", "half 1 0.9", "--fit", "100:200"});
  REQUIRE(r.code == kExitOk);
  SweepResult sr = from_csv(r.out);
  CHECK(sr.kind == SweepKind::Tail);
  CHECK(sr.rows() == 201);
  CHECK(sr.meta("wraparound-safe").value() == "true");
  CHECK(parse_number(sr.meta("fit-rate").value()) >= oracle::coin_rate(1.0 / std::sqrt(2.0), 0.9) - 0.05);
  CHECK(run({"simulate", "coin1d", "--t-max", "10", "--region", "half 1,0 0.9"}).code == kExitUsage);
}

TEST_CASE("verify exits 0 on a good model") {
  Run r = run({"verify", "coin1d(0.70710678)", "--no-simulate"});
  CHECK(r.code == kExitOk);
  CHECK(nlohmann::json::parse(r.out)["all_passed"] == true);
}

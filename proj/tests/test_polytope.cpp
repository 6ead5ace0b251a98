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
#include <random>

#include "lattail/error.hpp"
#include "lattail/polytope.hpp"
#include "oracles.hpp"

using namespace lattail;

namespace {

RVector vec(std::initializer_list<double> v) {
  RVector r(v.size());
  int i = 0;
  for (double x : v) r[i++] = x;
  return r;
}

}  // namespace

TEST_CASE("interval gauge") {
  Polytope h = Polytope::hull({vec({-1}), vec({1})}, 1);
  CHECK(gauge(h, vec({2})) == doctest::Approx(2.0));
  CHECK(gauge(h, vec({0})) == 0.0);
  CHECK(h.contains(vec({0.5})));
  CHECK_FALSE(h.contains(vec({1.01})));
  CHECK(h.distance(vec({1.5})) == doctest::Approx(0.5));
}

TEST_CASE("gauge needs the origin inside") {
  Polytope h = Polytope::hull({vec({1}), vec({2})}, 1);
  CHECK_THROWS_WITH_AS(gauge(h, vec({1.5})), doctest::Contains("augment"), GeometryError);
}

TEST_CASE("planar hull agrees with brute force") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<RVector> pts;
    std::vector<std::array<double, 2>> raw;
    for (int i = 0; i < 12; ++i) {
      double a = U(rng), b = U(rng);
      pts.push_back(vec({a, b}));
      raw.push_back({a, b});
    }
    Polytope h = Polytope::hull(pts, 2);
    CHECK(h.affine_dim() == 2);
    for (int q = 0; q < 200; ++q) {
      std::array<double, 2> x{1.2 * U(rng), 1.2 * U(rng)};
      bool inside = oracle::planar_hull_contains(raw, x, 0.0);
      if (h.distance(vec({x[0], x[1]})) < 1e-7 && h.distance(vec({x[0], x[1]})) > 0) continue;
      CHECK(h.contains(vec({x[0], x[1]}), 1e-12) == inside);
    }
  }
}

TEST_CASE("cube hull facets and gauge") {
  std::vector<RVector> pts;
  for (int i = 0; i < 8; ++i) pts.push_back(vec({i & 1 ? 1.0 : -1.0, i & 2 ? 1.0 : -1.0, i & 4 ? 1.0 : -1.0}));
  pts.push_back(vec({0, 0, 0}));
  Polytope h = Polytope::hull(pts, 3);
  CHECK(h.vertices().size() == 8);
  CHECK(h.facets().size() >= 6);
  CHECK(gauge(h, vec({0.5, -2.0, 1.0})) == doctest::Approx(2.0));
  CHECK(h.support(vec({1, 1, 1})) == doctest::Approx(3.0));
  CHECK(h.distance(vec({2, 0, 0})) == doctest::Approx(1.0));
  CHECK(h.distance(vec({2, 2, 0})) == doctest::Approx(std::sqrt(2.0)));
  CHECK(h.max_norm() == doctest::Approx(std::sqrt(3.0)));
}

TEST_CASE("random 3D hull contains its points and excludes far points") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> N;
  std::vector<RVector> pts;
  for (int i = 0; i < 60; ++i) pts.push_back(vec({N(rng), N(rng), N(rng)}));
  Polytope h = Polytope::hull(pts, 3);
  for (const auto& p : pts) CHECK(h.contains(p, 1e-9));
  for (const auto& f : h.facets()) {
    double worst = -INFINITY;
    for (const auto& p : pts) worst = std::max(worst, f.normal.dot(p) - f.offset);
    CHECK(std::abs(worst) < 1e-9);  // every facet is supporting
  }
  CHECK_FALSE(h.contains(vec({10, 0, 0})));
}

TEST_CASE("lower-dimensional hulls") {
  Polytope seg = Polytope::hull({vec({0, 0}), vec({1, 1})}, 2);
  CHECK(seg.affine_dim() == 1);
  CHECK(seg.contains(vec({0.5, 0.5})));
  CHECK_FALSE(seg.contains(vec({0.5, 0.6})));
  CHECK(seg.distance(vec({1, 0})) == doctest::Approx(std::sqrt(0.5)));
  Polytope pt = Polytope::hull({vec({1})}, 1);
  CHECK(pt.affine_dim() == 0);
  CHECK(pt.contains(vec({1})));
}

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

#include "lattail/catalog.hpp"
#include "lattail/error.hpp"
#include "lattail/spectra.hpp"
#include "oracles.hpp"

using namespace lattail;

namespace {

RVector random_p(std::mt19937_64& rng, int s) {
  std::uniform_real_distribution<double> u(-M_PI, M_PI);
  RVector p(s);
  for (int k = 0; k < s; ++k) p[k] = u(rng);
  return p;
}

}  // namespace

TEST_CASE("catalog names resolve") {
  for (const auto& n : catalog_names()) {
    CHECK(is_catalog_name(n));
    CatalogEntry e = catalog_get(n);
    CHECK(e.name.rfind(n, 0) == 0);
    CHECK_FALSE(e.provenance.empty());
  }
  CHECK(is_catalog_name("coin1d(0.3)"));
  CHECK_FALSE(is_catalog_name("coin1d(1.5)"));
  CHECK_THROWS_AS(catalog_get("coin1d(0)"), ModelError);
  CHECK_THROWS_AS(catalog_get("coin1d(x)"), ModelError);
  CHECK_THROWS_AS(catalog_get("weyl4d"), ModelError);
}

TEST_CASE("closed-form dispersions match the numerical spectrum") {
  std::mt19937_64 rng(7);
  for (const auto& n : catalog_names()) {
    CatalogEntry e = catalog_get(n);
    if (!e.closed_forms.dispersion) continue;
    const int s = e.model.dim_lattice();
    for (int k = 0; k < 50; ++k) {
      RVector p = random_p(rng, s);
      std::vector<VelocitySample> bands;
      BandEvaluator be(e.model, 1e-6);
      if (!be.try_evaluate(p, bands)) continue;
      double w = e.closed_forms.dispersion(p), best = INFINITY;
      for (const auto& b : bands) best = std::min(best, std::abs(std::abs(b.omega) - std::abs(w)));
      INFO(n);
      CHECK(best < 1e-10);
    }
  }
}

TEST_CASE("closed-form group velocities match") {
  std::mt19937_64 rng(11);
  for (const auto& n : catalog_names()) {
    CatalogEntry e = catalog_get(n);
    if (!e.closed_forms.group_velocity) continue;
    const int s = e.model.dim_lattice();
    for (int k = 0; k < 50; ++k) {
      RVector p = random_p(rng, s);
      std::vector<VelocitySample> bands;
      BandEvaluator be(e.model, 1e-4);
      if (!be.try_evaluate(p, bands)) continue;
      auto ref = e.closed_forms.group_velocity(p);
      for (const auto& b : bands) {
        double best = INFINITY;
        for (const auto& v : ref) best = std::min(best, (b.velocity - v).norm());
        CHECK(best < 1e-9);
      }
    }
  }
}

TEST_CASE("coin closed forms agree with the oracle") {
  CatalogEntry e = catalog_get("coin1d(0.3)");
  for (double l : {-3.0, -0.2, 0.0, 1.0, 5.0})
    CHECK(e.closed_forms.dual_rate(RVector::Constant(1, l)) == doctest::Approx(oracle::coin_dual_rate(0.3, l)).epsilon(1e-14));
  for (double x : {0.0, 0.3, 0.5, 0.9, 1.0})
    CHECK(e.closed_forms.rate(RVector::Constant(1, x)) == doctest::Approx(oracle::coin_rate(0.3, x)).epsilon(1e-12));
  CHECK(std::isinf(e.closed_forms.rate(RVector::Constant(1, 1.2))));
  auto [a, b] = e.closed_forms.boundary_coeffs(RVector::Ones(1));
  CHECK(a == doctest::Approx(0.3));
  CHECK(b == doctest::Approx(0.3 - 0.027));
}

TEST_CASE("spherical radial dual rate") {
  CatalogEntry e = catalog_get("spherical3d");
  for (double l : {0.1, 1.0, 4.0})
    CHECK(e.closed_forms.radial_dual(l) == doctest::Approx(oracle::spherical_radial_dual(l)).epsilon(1e-14));
}

TEST_CASE("weyl3d region is the intersection of three cylinders") {
  auto region = catalog_get("weyl3d").closed_forms.region;
  RVector v(3);
  v << 0.7, 0.7, 0.7;
  CHECK(region(v, 0.0));
  v << 0.8, 0.8, 0.0;
  CHECK_FALSE(region(v, 0.0));
  v << 1.0, 0.0, 0.0;
  CHECK(region(v, 1e-12));
  v << 0.0, 0.9, 0.6;
  CHECK_FALSE(region(v, 0.0));
}

TEST_CASE("catalog models pass validation") {
  for (const auto& n : catalog_names()) {
    CatalogEntry e = catalog_get(n);
    CHECK(e.model.validation().unitarity_defect < 1e-12);
    CHECK(e.model.validation().hermiticity_defect < 1e-12);
  }
}

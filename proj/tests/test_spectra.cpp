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

#include <algorithm>
#include <cmath>
#include <random>

#include "lattail/catalog.hpp"
#include "lattail/error.hpp"
#include "lattail/spectra.hpp"
#include "oracles.hpp"

using namespace lattail;

namespace {

/// Phases sorted ascending: -arg u for walks, eigenvalues for Hamiltonians.
std::vector<double> sorted_phases(const LatticeModel& m, const RVector& p) {
  CMatrix w = evaluate_symbol(m, ComplexMomentum::real(p)).matrix;
  Eigen::ComplexEigenSolver<CMatrix> es(w);
  std::vector<double> ph;
  for (int i = 0; i < w.rows(); ++i) ph.push_back(m.is_walk() ? -std::arg(es.eigenvalues()[i]) : es.eigenvalues()[i].real());
  std::sort(ph.begin(), ph.end());
  return ph;
}

}  // namespace

TEST_CASE("eigenvalues of fixed matrices") {
  CMatrix had(2, 2);
  const double r = 1.0 / std::sqrt(2.0);
  had << r, r, -r, r;
  SpectrumAt sp = eigen(had, true);
  std::vector<double> args;
  for (auto u : sp.eigenvalues) args.push_back(std::arg(u));
  std::sort(args.begin(), args.end());
  CHECK(args[0] == doctest::Approx(-kPi / 4).epsilon(1e-14));
  CHECK(args[1] == doctest::Approx(kPi / 4).epsilon(1e-14));
  for (int j = 0; j < 2; ++j)
    CHECK((had * sp.eigenvectors->col(j) - sp.eigenvalues[j] * sp.eigenvectors->col(j)).norm() < 1e-12);
  SpectrumAt id = eigen(CMatrix::Identity(3, 3));
  for (auto u : id.eigenvalues) CHECK(std::abs(u - 1.0) < 1e-15);
  CMatrix nil = CMatrix::Zero(2, 2);
  nil(0, 1) = 1.0;
  for (auto u : eigen(nil).eigenvalues) CHECK(std::abs(u) < 1e-15);
}

TEST_CASE("dual rate at single momenta") {
  LatticeModel shift = catalog_get("shift1d").model;
  for (double l : {-2.0, 0.5, 3.0})
    CHECK(dual_rate_at(shift, ComplexMomentum(RVector::Constant(1, 0.7), RVector::Constant(1, l / 2))) ==
          doctest::Approx(l).epsilon(1e-14));
  LatticeModel coin = catalog_get("coin1d").model;
  const double a = 1.0 / std::sqrt(2.0);
  double v = dual_rate_at(coin, ComplexMomentum(RVector::Constant(1, kPi / 2), RVector::Constant(1, 0.5)));
  CHECK(v == doctest::Approx(oracle::coin_dual_rate(a, 1.0)).epsilon(1e-13));
  // Independent 2x2 spectral radius of the continued symbol.
  CMatrix w = evaluate_symbol(coin, ComplexMomentum(RVector::Constant(1, 0.9), RVector::Constant(1, 0.5))).matrix;
  double rho = oracle::spectral_radius2(w(0, 0), w(0, 1), w(1, 0), w(1, 1));
  CHECK(dual_rate_at(coin, ComplexMomentum(RVector::Constant(1, 0.9), RVector::Constant(1, 0.5))) ==
        doctest::Approx(2 * std::log(rho)).epsilon(1e-12));
  for (const auto& name : catalog_names()) {
    LatticeModel m = catalog_get(name).model;
    CHECK(std::abs(dual_rate_at(m, ComplexMomentum::real(RVector::Constant(m.dim_lattice(), 0.37)))) < 1e-12);
  }
}

TEST_CASE("group velocities at known momenta") {
  const double a = 1.0 / std::sqrt(2.0);
  auto v = group_velocity(catalog_get("coin1d").model, RVector::Constant(1, kPi / 2));
  REQUIRE(v.size() == 2);
  std::vector<double> vs = {v[0].velocity[0], v[1].velocity[0]};
  std::sort(vs.begin(), vs.end());
  CHECK(vs[0] == doctest::Approx(-a).epsilon(1e-12));
  CHECK(vs[1] == doctest::Approx(a).epsilon(1e-12));
  RVector p(2);
  p << kPi / 2, 0.0;
  for (const auto& s : group_velocity(catalog_get("weyl2d").model, p))
    CHECK(s.velocity.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("group velocities match differences of sorted phases") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-kPi, kPi);
  const double h = 1e-5;
  for (const auto& name : catalog_names()) {
    LatticeModel m = catalog_get(name).model;
    const int s = m.dim_lattice();
    BandEvaluator be(m, 1e-2);
    int done = 0;
    for (int attempt = 0; attempt < 2000 && done < 100; ++attempt) {
      RVector p(s);
      for (int k = 0; k < s; ++k) p[k] = U(rng);
      std::vector<VelocitySample> out;
      if (!be.try_evaluate(p, out)) continue;
      // Stay away from the branch cut of arg at +-pi.
      bool near_cut = false;
      for (const auto& b : out) near_cut = near_cut || std::abs(std::abs(b.omega) - kPi) < 1e-2;
      if (m.is_walk() && near_cut) continue;
      ++done;
      for (int k = 0; k < s; ++k) {
        RVector pp = p, pm = p;
        pp[k] += h;
        pm[k] -= h;
        auto fp = sorted_phases(m, pp), fm = sorted_phases(m, pm);
        for (std::size_t j = 0; j < out.size(); ++j)
          CHECK(std::abs((fp[j] - fm[j]) / (2 * h) - out[j].velocity[k]) < 1e-6);
      }
    }
    CHECK(done == 100);
  }
}

TEST_CASE("degenerate points raise") {
  // Both bands of exp(i p1 sigma1) exp(i p2 sigma3) touch at p = 0.
  CHECK_THROWS_AS(group_velocity(catalog_get("weyl2d").model, RVector::Zero(2)), DegeneratePoint);
}

TEST_CASE("propagation regions") {
  const double a = 1.0 / std::sqrt(2.0);
  PropagationRegion c = propagation_region(catalog_get("coin1d").model, 256);
  CHECK(c.hull.support(RVector::Ones(1)) == doctest::Approx(a).epsilon(1e-4));
  CHECK(-c.hull.support(-RVector::Ones(1)) == doctest::Approx(-a).epsilon(1e-4));
  CHECK(c.max_speed == doctest::Approx(a).epsilon(1e-6));
  // Velocities come in +- pairs.
  double sum = 0.0;
  for (const auto& s : c.samples) sum += s.velocity[0];
  CHECK(std::abs(sum) < 1e-9);
  for (const auto& s : c.samples) CHECK(c.hull.contains(s.velocity));

  PropagationRegion w = propagation_region(catalog_get("weyl2d").model, 64);
  CHECK(w.max_speed == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(w.max_speed <= 1.0 + 1e-12);
  double wsum = 0.0;
  for (const auto& s : w.samples) wsum += s.weight;
  CHECK(wsum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("spherical region has unit speed") {
  PropagationRegion r = propagation_region(catalog_get("spherical3d").model, 32);
  CHECK(r.max_speed == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(r.max_speed <= 1.0 + 1e-9);
}

TEST_CASE("grids that are mostly degenerate are rejected") {
  // A shift acting identically on two internal states is degenerate everywhere.
  std::vector<Jump> j = {{{1}, CMatrix::Identity(2, 2)}};
  LatticeModel m("double-shift", DynamicsKind::Walk, 1, 2, j);
  CHECK_THROWS_WITH_AS(propagation_region(m, 64), doctest::Contains("too singular"), NumericError);
}

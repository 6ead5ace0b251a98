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

#include "lattail/catalog.hpp"
#include "lattail/error.hpp"
#include "lattail/evolve.hpp"
#include "lattail/rates.hpp"
#include "oracles.hpp"

using namespace lattail;

namespace {

const double kA = 1.0 / std::sqrt(2.0);

CVector basis(int d, int k) {
  CVector v = CVector::Zero(d);
  v[k] = 1.0;
  return v;
}

double prob(const EvolutionRecord& rec, double t, const Site& x) {
  return rec.box.contains(x) ? rec.distributions[rec.time_index(t)][rec.box.index(x)] : 0.0;
}

LatticeModel cosine_chain() {
  CMatrix h = CMatrix::Constant(1, 1, 0.5);
  return LatticeModel("cos", DynamicsKind::Hamiltonian, 1, 1, {{{1}, h}, {{-1}, h}});
}

}  // namespace

TEST_CASE("shift moves all mass") {
  LatticeModel m = catalog_get("shift1d").model;
  EvolveOptions o;
  o.t_max = 5;
  EvolutionRecord rec = evolve(m, InitialState::localized({0}, basis(1, 0)), o);
  CHECK(prob(rec, 5, {5}) == 1.0);
  CHECK(prob(rec, 0, {0}) == 1.0);
  CHECK(rec.wraparound_safe);
  TailSeries hi = tail_probability(rec, TailRegion::half_space(RVector::Ones(1), 0.5));
  TailSeries lo = tail_probability(rec, TailRegion::half_space(RVector::Ones(1), 1.5));
  for (std::size_t i = 1; i < hi.times.size(); ++i) {
    CHECK(hi.probabilities[i] == 1.0);
    CHECK(lo.probabilities[i] == 0.0);
  }
}

TEST_CASE("one hadamard step splits the mass") {
  LatticeModel m = catalog_get("coin1d").model;
  EvolveOptions o;
  o.t_max = 1;
  EvolutionRecord rec = evolve(m, InitialState::localized({0}, basis(2, 0)), o);
  CHECK(prob(rec, 1, {1}) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(prob(rec, 1, {-1}) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("walk evolution matches the long double oracle") {
  for (const char* name : {"coin1d(0.3)", "weyl2d"}) {
    LatticeModel m = catalog_get(name).model;
    const int s = m.dim_lattice();
    CVector v(2);
    v << 0.6, std::complex<double>(0.0, 0.8);
    InitialState psi = InitialState::localized(Site(s, 0), v);
    EvolveOptions o;
    o.t_max = 30;
    EvolutionRecord rec = evolve(m, psi, o);
    oracle::NaiveWalk ref(m, Site(s, 0), {v[0], v[1]});
    for (int t = 1; t <= 30; ++t) {
      ref.step();
      double worst = 0.0;
      for (const auto& [x, amp] : ref.state())
        worst = std::max(worst, std::abs(prob(rec, t, x) - static_cast<double>(ref.probability(x))));
      CHECK(worst < 1e-13);
      CHECK(rec.total_probability(rec.time_index(t)) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("walks have zero mass outside the light cone") {
  LatticeModel m = catalog_get("coin1d").model;
  EvolveOptions o;
  o.t_max = 40;
  EvolutionRecord rec = evolve(m, InitialState::localized({0}, basis(2, 0)), o);
  for (std::size_t i = 0; i < rec.times.size(); ++i)
    for (std::int64_t k = 0; k < rec.box.size(); ++k)
      if (std::abs(rec.box.site(k)[0]) > rec.times[i]) CHECK(rec.distributions[i][k] == 0.0);
}

TEST_CASE("hamiltonian evolution matches bessel functions") {
  LatticeModel m = cosine_chain();
  EvolveOptions o;
  o.t_max = 10;
  o.times = {0, 2.5, 10};
  EvolutionRecord rec = evolve(m, InitialState::localized({0}, basis(1, 0)), o);
  CHECK(rec.wraparound_safe);
  for (double t : o.times) {
    double worst = 0.0;
    for (int x = -40; x <= 40; ++x) worst = std::max(worst, std::abs(prob(rec, t, {x}) - oracle::cosine_chain_probability(x, t)));
    CHECK(worst < 1e-13);
    CHECK(rec.total_probability(rec.time_index(t)) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("hamiltonian exponential moment by continuation") {
  LatticeModel m = cosine_chain();
  EvolveOptions o;
  o.t_max = 12;
  o.times = {6, 12};
  EvolutionRecord rec = evolve(m, InitialState::localized({0}, basis(1, 0)), o);
  for (double lam : {0.5, 2.0}) {
    MomentSeries ms = exp_moment(rec, RVector::Constant(1, lam));
    for (std::size_t i = 0; i < ms.times.size(); ++i) {
      long double sum = 0.0L;
      for (int x = -200; x <= 200; ++x) sum += std::exp(static_cast<long double>(lam * x)) * oracle::cosine_chain_probability(x, ms.times[i]);
      CHECK(ms.log_moment[i] == doctest::Approx(std::log(static_cast<double>(sum))).epsilon(1e-10));
    }
  }
}

TEST_CASE("two-band hamiltonian evolution conserves probability") {
  // H(p) = cos p sigma_z + sin p sigma_x written with hoppings.
  CMatrix hp(2, 2), hm(2, 2);
  hp << 0.5, std::complex<double>(0, 0.5), std::complex<double>(0, 0.5), -0.5;
  hm = hp.adjoint();
  LatticeModel m("dirac", DynamicsKind::Hamiltonian, 1, 2, {{{1}, hp}, {{-1}, hm}});
  EvolveOptions o;
  o.t_max = 20;
  o.dt = 5;
  EvolutionRecord rec = evolve(m, InitialState::localized({0}, basis(2, 0)), o);
  for (std::size_t i = 0; i < rec.times.size(); ++i) CHECK(rec.total_probability(i) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rec.wraparound_safe);
}

TEST_CASE("memory budget") {
  EvolveOptions o;
  o.t_max = 1000;
  o.memory_budget = 1 << 16;
  CHECK_THROWS_AS(evolve(catalog_get("weyl2d").model, InitialState::localized({0, 0}, basis(2, 0)), o), BoxTooLarge);
}

TEST_CASE("tail probability is below the large-deviation bound") {
  LatticeModel m = catalog_get("coin1d").model;
  EvolveOptions o;
  o.t_max = 100;
  EvolutionRecord rec = evolve(m, InitialState::localized({0}, basis(2, 0)), o);
  TailSeries ts = tail_probability(rec, TailRegion::half_space(RVector::Ones(1), 0.9));
  const double p = ts.probabilities.back();
  CHECK(p > 0.0);
  CHECK(-std::log(p) / 100 >= oracle::coin_rate(kA, 0.9) - 0.05);
  oracle::NaiveWalk ref(m, {0}, {1.0, 0.0});
  for (int t = 0; t < 100; ++t) ref.step();
  long double sum = 0.0L;
  for (const auto& [x, amp] : ref.state())
    if (x[0] >= 90) sum += ref.probability(x);
  CHECK(p == doctest::Approx(static_cast<double>(sum)).epsilon(1e-9));
}

TEST_CASE("exponential moments of walks") {
  EvolveOptions o;
  o.t_max = 100;
  o.times = {0, 50, 100};
  EvolutionRecord sh = evolve(catalog_get("shift1d").model, InitialState::localized({0}, basis(1, 0)), o);
  MomentSeries z = exp_moment(sh, RVector::Zero(1));
  MomentSeries one = exp_moment(sh, RVector::Ones(1));
  for (std::size_t i = 0; i < z.times.size(); ++i) {
    CHECK(std::abs(z.log_moment[i]) < 1e-15);
    CHECK(one.log_moment[i] == doctest::Approx(z.times[i]).epsilon(1e-15));
  }
  LatticeModel m = catalog_get("coin1d").model;
  EvolutionRecord rec = evolve(m, InitialState::localized({0}, basis(2, 0)), o);
  MomentSeries ms = exp_moment(rec, RVector::Ones(1));
  CHECK(ms.log_moment[2] / 100 <= oracle::coin_dual_rate(kA, 1.0) + 0.05);
}

TEST_CASE("empirical rate fits") {
  TailSeries ts;
  for (int t = 0; t <= 400; t += 10) {
    ts.times.push_back(t);
    ts.probabilities.push_back(std::exp(-0.3 * t));
    ts.below_precision.push_back(false);
  }
  CHECK(empirical_rate(ts, 10, 100).rate == doctest::Approx(0.3).epsilon(1e-12));
  for (std::size_t i = 0; i < ts.times.size(); ++i) ts.probabilities[i] *= std::max(ts.times[i], 1.0);
  CHECK(std::abs(empirical_rate(ts, 100, 400).rate - 0.3) < 0.01);
  for (std::size_t i = 0; i < ts.times.size(); ++i) ts.below_precision[i] = true;
  CHECK_THROWS_AS(empirical_rate(ts, 0, 400), InsufficientData);
}

TEST_CASE("tail regions") {
  TailRegion h = TailRegion::parse("half 1,0 0.5", 2);
  CHECK(h.kind == TailRegion::Kind::HalfSpace);
  CHECK(h.counts({5, -3}, 10));
  CHECK_FALSE(h.counts({4, 9}, 10));
  TailRegion b = TailRegion::parse("ball 0.5", 2);
  CHECK(b.counts({3, 4}, 10));
  CHECK_FALSE(b.counts({3, 3}, 10));
  CHECK(TailRegion::parse(h.describe(), 2).c == 0.5);
  CHECK_THROWS_AS(TailRegion::parse("half 1 0.5", 2), ModelError);
  CHECK_THROWS_AS(TailRegion::parse("disc 1", 2), ModelError);
}

TEST_CASE("velocity distributions") {
  LatticeModel sh = catalog_get("shift1d").model;
  InitialState p0 = InitialState::localized({0}, basis(1, 0));
  EvolveOptions o;
  o.t_max = 50;
  o.times = {50};
  EvolutionRecord rs = evolve(sh, p0, o);
  CHECK(kolmogorov_distance(velocity_histogram(rs, 50), theoretical_velocity_distribution(sh, p0, 64)).max() == 0.0);

  LatticeModel m = catalog_get("coin1d").model;
  InitialState psi = InitialState::localized({0}, basis(2, 0));
  VelocityDistribution th = theoretical_velocity_distribution(m, psi, 2048);
  for (const auto& v : th.points) CHECK(std::abs(v[0]) <= kA + 1e-12);
  o.t_max = 500;
  o.times = {100, 500};
  EvolutionRecord rec = evolve(m, psi, o);
  double d100 = kolmogorov_distance(velocity_histogram(rec, 100), th).max();
  double d500 = kolmogorov_distance(velocity_histogram(rec, 500), th).max();
  CHECK(d500 <= 0.05);
  CHECK(d500 < d100);
  CHECK_THROWS_AS(velocity_histogram(rec, 7), NumericError);
}

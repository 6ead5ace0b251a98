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

#include "lattail/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "lattail/error.hpp"
#include "lattail/evolve.hpp"
#include "lattail/parallel.hpp"
#include "lattail/polytope.hpp"

namespace lattail {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

CheckResult make(std::string name, bool ok, double measured, double limit, std::string detail = {}) {
  return {std::move(name), ok ? "pass" : "fail", measured, limit, std::move(detail)};
}

CheckResult skip(std::string name, std::string detail) { return {std::move(name), "skip", 0.0, 0.0, std::move(detail)}; }

RVector axis(int s, int k) {
  RVector e = RVector::Zero(s);
  e[k] = 1.0;
  return e;
}

/// Phase of eigenvalue u (walk) or the eigenvalue itself (Hamiltonian).
std::vector<Complex> spectrum(const LatticeModel& m, const RVector& p) {
  std::vector<Complex> ev;
  eigenvalues_into(evaluate_symbol(m, ComplexMomentum::real(p)).matrix, ev);
  return ev;
}

double branch_shift(const LatticeModel& m, Complex u0, const std::vector<Complex>& ev) {
  double best = kInf, val = 0.0;
  for (Complex u : ev) {
    double dist, w;
    if (m.is_walk()) {
      w = -std::arg(u / u0);
      dist = std::abs(w);
    } else {
      w = u.real() - u0.real();
      dist = std::abs(w);
    }
    if (dist < best) best = dist, val = w;
  }
  return val;
}

/// Sites of the simulation box with mass outside the |x| <= L t ball, for walks.
double mass_outside_cone(const EvolutionRecord& rec, double L) {
  double worst = 0.0;
  for (std::size_t i = 0; i < rec.times.size(); ++i) {
    const double t = rec.times[i];
    for (std::int64_t k = 0; k < static_cast<std::int64_t>(rec.distributions[i].size()); ++k) {
      if (rec.distributions[i][k] == 0.0) continue;
      Site x = rec.box.site(k);
      double r = 0.0;
      for (int xi : x) r += double(xi) * xi;
      if (std::sqrt(r) > L * t + 1e-9) worst = std::max(worst, rec.distributions[i][k]);
    }
  }
  return worst;
}

}  // namespace

TorusSearchOptions verification_torus(int s) {
  TorusSearchOptions t;
  if (s >= 2) {
    t.grid_n = 24;
    t.max_points = 24 * 24 * 24;
  }
  return t;
}

std::vector<RVector> regular_momenta(const LatticeModel& model, int count, std::uint64_t seed, double min_gap) {
  const int s = model.dim_lattice();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-kPi, kPi);
  BandEvaluator be(model, min_gap);
  std::vector<RVector> out;
  std::vector<VelocitySample> tmp;
  for (int attempt = 0; attempt < 100 * count && static_cast<int>(out.size()) < count; ++attempt) {
    RVector p(s);
    for (int k = 0; k < s; ++k) p[k] = U(rng);
    if (be.try_evaluate(p, tmp)) out.push_back(p);
  }
  return out;
}

double group_velocity_fd_error(const LatticeModel& model, const std::vector<RVector>& momenta, double h) {
  const int s = model.dim_lattice();
  double worst = 0.0;
  BandEvaluator be(model, 0.0);
  for (const RVector& p : momenta) {
    std::vector<VelocitySample> vs = be.evaluate(p);
    std::vector<Complex> ev0 = spectrum(model, p);
    for (const auto& v : vs) {
      Complex u0 = model.is_walk() ? std::exp(Complex(0.0, -v.omega)) : Complex(v.omega, 0.0);
      for (int k = 0; k < s; ++k) {
        RVector pp = p, pm = p;
        pp[k] += h;
        pm[k] -= h;
        double fd = (branch_shift(model, u0, spectrum(model, pp)) - branch_shift(model, u0, spectrum(model, pm))) / (2 * h);
        worst = std::max(worst, std::abs(fd - v.velocity[k]));
      }
    }
  }
  return worst;
}

double conjugation_residual(const LatticeModel& model, int count, std::uint64_t seed, double lambda_box) {
  const int s = model.dim_lattice(), d = model.dim_cell();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-kPi, kPi), L(-lambda_box, lambda_box);
  double worst = 0.0;
  for (int i = 0; i < count; ++i) {
    RVector p(s), l(s);
    for (int k = 0; k < s; ++k) p[k] = U(rng), l[k] = L(rng);
    CMatrix a = evaluate_symbol(model, ComplexMomentum(p, l)).matrix;
    CMatrix b = evaluate_symbol(model, ComplexMomentum(p, -l)).matrix;
    double r;
    if (model.is_walk())
      r = (a * b.adjoint() - CMatrix::Identity(d, d)).cwiseAbs().maxCoeff() / std::max(1.0, a.norm() * b.norm());
    else
      r = (a.adjoint() - b).cwiseAbs().maxCoeff() / std::max(1.0, a.norm());
    worst = std::max(worst, r);
  }
  return worst;
}

std::vector<CheckResult> run_verification(const LatticeModel& m, const CatalogEntry* entry, const VerifyOptions& opt) {
  std::vector<CheckResult> out;
  const int s = m.dim_lattice(), d = m.dim_cell();
  const bool walk = m.is_walk();
  const TorusSearchOptions torus = verification_torus(s);
  DualRateFn R = dual_rate_function(m, torus);
  LegendreOptions lopt = opt.legendre;
  if (s >= 2) lopt.directions = std::min(lopt.directions, 4), lopt.radii = std::min(lopt.radii, 16);
  auto guard = [&](const std::string& name, auto&& body) {
    try {
      body();
    } catch (const BoxTooLarge& e) {
      out.push_back(skip(name, e.what()));
    } catch (const Error& e) {
      out.push_back(make(name, false, kInf, 0.0, e.what()));
    }
  };

  const auto& vr = m.validation();
  if (walk)
    out.push_back(make("model.unitarity", vr.unitarity_defect <= 1e-10, vr.unitarity_defect, 1e-10));
  else
    out.push_back(make("model.hermiticity", vr.hermiticity_defect <= 1e-12, vr.hermiticity_defect, 1e-12));

  guard("dual_rate.zero", [&] {
    double r0 = std::abs(R(RVector::Zero(s)));
    out.push_back(make("dual_rate.zero", r0 <= 1e-12, r0, 1e-12));
  });

  guard("dual_rate.convexity", [&] {
    double worst = 0.0;
    for (int k = 0; k < s; ++k) {
      std::vector<double> v;
      for (int i = -10; i <= 10; ++i) v.push_back(R(axis(s, k) * (0.4 * i)));
      for (std::size_t i = 1; i + 1 < v.size(); ++i) worst = std::min(worst, v[i - 1] + v[i + 1] - 2 * v[i]);
    }
    out.push_back(make("dual_rate.convexity", worst >= -1e-8, worst, -1e-8));
  });

  guard("symbol.conjugation", [&] {
    double r = conjugation_residual(m, opt.random_points, opt.seed);
    out.push_back(make("symbol.conjugation", r <= 1e-10, r, 1e-10));
  });

  guard("group_velocity.finite_difference", [&] {
    auto ps = regular_momenta(m, opt.random_points, opt.seed + 1, opt.regular_gap);
    if (static_cast<int>(ps.size()) < opt.random_points) {
      out.push_back(skip("group_velocity.finite_difference", "too few regular momenta"));
      return;
    }
    double e = group_velocity_fd_error(m, ps);
    out.push_back(make("group_velocity.finite_difference", e <= 1e-6, e, 1e-6));
    if (entry && entry->closed_forms.group_velocity) {
      double worst = 0.0;
      for (const RVector& p : ps) {
        auto num = group_velocity(m, p, opt.gap_tol);
        auto ref = entry->closed_forms.group_velocity(p);
        for (const auto& v : num) {
          double best = kInf;
          for (const auto& r : ref) best = std::min(best, (v.velocity - r).norm());
          worst = std::max(worst, best);
        }
      }
      out.push_back(make("closed_form.group_velocity", worst <= 1e-8, worst, 1e-8));
    }
  });

  const int grid = opt.region_grid > 0 ? opt.region_grid : (s == 1 ? 1024 : 64);
  PropagationRegion region;
  bool have_region = false;
  guard("region.sampling", [&] {
    RegionOptions ro;
    ro.gap_tol = opt.gap_tol;
    region = propagation_region(m, grid, ro);
    have_region = true;
    double worst = 0.0;
    if (walk) {
      Polytope hull = jump_hull(m);
      for (const auto& v : region.samples) worst = std::max(worst, hull.distance(v.velocity));
      out.push_back(make("region.inside_jump_hull", worst <= 1e-9, worst, 1e-9));
    } else {
      int bad = 0;
      for (const auto& v : region.samples) bad += !within_lieb_robinson_region(m, v.velocity);
      out.push_back(make("region.inside_lieb_robinson", bad == 0, bad, 0));
    }
    if (entry && entry->closed_forms.region) {
      int bad = 0;
      for (const auto& v : region.samples) bad += !entry->closed_forms.region(v.velocity, 1e-6);
      out.push_back(make("closed_form.region", bad == 0, bad, 0));
    }
  });

  // Rate function properties along the first axis.
  guard("rate.line", [&] {
    const RVector n = axis(s, 0);
    double hi, lo;
    if (walk) {
      Polytope hull = jump_hull(m);
      hi = hull.support(n);
      lo = -hull.support(-n);
    } else {
      hi = 2 * std::max(region.max_speed, 0.5);
      lo = -hi;
    }
    const int pts = s == 1 ? 41 : s == 2 ? 13 : 7;
    std::vector<RVector> xs;
    for (int i = 0; i < pts; ++i) xs.push_back(n * (lo + (hi - lo) * (0.01 + 0.98 * i / (pts - 1.0))));
    RateFunction rf = legendre(R, xs, m, lopt);
    double neg = 0.0, conv = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) neg = std::min(neg, rf.values[i]);
    for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
      double a = rf.values[i - 1], b = rf.values[i], c = rf.values[i + 1];
      if (std::isfinite(a) && std::isfinite(c) && !rf.unbounded[i - 1] && !rf.unbounded[i + 1])
        conv = std::min(conv, a + c - 2 * b);
    }
    out.push_back(make("rate.nonnegative", neg >= 0.0, neg, 0.0));
    out.push_back(make("rate.convexity", conv >= -1e-6, conv, -1e-6));
  });

  guard("rate.zero_on_region", [&] {
    if (!have_region || region.samples.empty()) {
      out.push_back(skip("rate.zero_on_region", "no region samples"));
      return;
    }
    const int want = s == 1 ? 20 : s == 2 ? 8 : 4;
    std::vector<RVector> xs;
    const std::size_t stride = std::max<std::size_t>(1, region.samples.size() / want);
    RVector centroid = RVector::Zero(s);
    for (const auto& v : region.samples) centroid += v.velocity;
    centroid /= static_cast<double>(region.samples.size());
    for (std::size_t i = 0; i < region.samples.size() && static_cast<int>(xs.size()) < want; i += stride)
      xs.push_back(0.9 * region.samples[i].velocity + 0.1 * centroid);
    RateFunction rf = legendre(R, xs, m, lopt);
    double worst = *std::max_element(rf.values.begin(), rf.values.end());
    out.push_back(make("rate.zero_on_region", worst <= 1e-6, worst, 1e-6));
  });

  if (walk) {
    guard("rate.infinite_outside_hull", [&] {
      Polytope hull = jump_hull(m);
      std::vector<RVector> xs;
      for (const RVector& dir : sphere_directions(s, s == 1 ? 2 : 10)) xs.push_back(dir * (hull.support(dir) + 0.05));
      RateFunction rf = legendre(R, xs, m, lopt);
      int finite = 0;
      for (double v : rf.values) finite += std::isfinite(v);
      out.push_back(make("rate.infinite_outside_hull", finite == 0, finite, 0));
    });
  } else {
    out.push_back(skip("rate.infinite_outside_hull", "Hamiltonian rates are finite everywhere"));
  }

  guard("determinism.threads", [&] {
    std::vector<RVector> ls;
    for (int i = 0; i < 8; ++i) ls.push_back(RVector::Constant(s, 0.3 * (i - 4) + 0.1));
    const int saved = thread_count();
    set_thread_count(1);
    DualRate a = dual_rate(m, ls, torus.grid_n, torus);
    PropagationRegion ra = propagation_region(m, s == 1 ? 256 : 16);
    set_thread_count(std::max(2, saved));
    DualRate b = dual_rate(m, ls, torus.grid_n, torus);
    PropagationRegion rb = propagation_region(m, s == 1 ? 256 : 16);
    set_thread_count(saved);
    bool same = a.values == b.values && ra.samples.size() == rb.samples.size();
    for (std::size_t i = 0; same && i < ra.samples.size(); ++i)
      same = ra.samples[i].velocity == rb.samples[i].velocity;
    out.push_back(make("determinism.threads", same, same ? 0.0 : 1.0, 0.0));
  });

  if (entry) {
    const auto& cf = entry->closed_forms;
    if (cf.dual_rate)
      guard("closed_form.dual_rate", [&] {
        std::vector<RVector> ls;
        for (int k = 0; k < s; ++k)
          for (int i = -10; i <= 10; ++i) ls.push_back(axis(s, k) * (0.4 * i));
        DualRate dr = dual_rate(m, ls, torus.grid_n, torus);
        double worst = 0.0;
        for (std::size_t i = 0; i < ls.size(); ++i) worst = std::max(worst, std::abs(dr.values[i] - cf.dual_rate(ls[i])));
        out.push_back(make("closed_form.dual_rate", worst <= 1e-8, worst, 1e-8));
      });
    if (cf.rate && s == 1)
      guard("closed_form.rate", [&] {
        std::vector<RVector> xs;
        for (int i = 0; i <= 40; ++i) xs.push_back(RVector::Constant(1, -0.98 + 1.96 * i / 40.0));
        RateFunction rf = legendre(R, xs, m, lopt);
        double worst = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
          double ref = cf.rate(xs[i]);
          if (std::isinf(ref) || std::isinf(rf.values[i]))
            worst = std::max(worst, std::isinf(ref) == std::isinf(rf.values[i]) ? 0.0 : kInf);
          else
            worst = std::max(worst, std::abs(ref - rf.values[i]));
        }
        out.push_back(make("closed_form.rate", worst <= 1e-5, worst, 1e-5));
      });
    if (cf.radial_dual)
      guard("closed_form.radial_dual", [&] {
        std::vector<double> ells = {0.5, 1.0, 2.0, 3.0};
        RadialRate rd = radial_dual(m, ells, 12);
        double worst = 0.0;
        for (std::size_t i = 0; i < ells.size(); ++i)
          worst = std::max(worst, std::abs(rd.dual_values[i] - cf.radial_dual(ells[i])));
        out.push_back(make("closed_form.radial_dual", worst <= 1e-5, worst, 1e-5));
      });
    if (cf.boundary_coeffs)
      guard("closed_form.boundary", [&] {
        const RVector n = axis(s, 0);
        BoundaryExpansion be = boundary_expansion(m, n);
        auto [a, b] = cf.boundary_coeffs(n);
        double e = std::max(std::abs(be.a - a), std::abs(be.b - b));
        out.push_back(make("closed_form.boundary", e <= 1e-4, e, 1e-4));
      });
  }

  if (!opt.simulate) return out;
  const bool can_sim = walk ? s <= 2 : s <= 2;
  if (!can_sim) {
    out.push_back(skip("simulate", "simulation checks run for lattice dimension <= 2"));
    return out;
  }
  CVector e1 = CVector::Zero(d);
  e1[0] = 1.0;
  const InitialState psi0 = InitialState::localized(Site(s, 0), e1);
  const RVector n = axis(s, 0);

  guard("simulate.upper_bound", [&] {
    EvolveOptions eo;
    eo.memory_budget = opt.memory_budget;
    const double t_lo = walk ? 80 : 20, t_hi = walk ? 160 : 40;
    eo.t_max = t_hi;
    if (!walk)
      for (double t = 0; t <= t_hi + 1e-9; t += 1) eo.times.push_back(t);
    EvolutionRecord rec = evolve(m, psi0, eo);
    double udef = 0.0;
    for (std::size_t i = 0; i < rec.times.size(); ++i) udef = std::max(udef, std::abs(rec.total_probability(i) - 1.0));
    out.push_back(make("simulate.unitarity", udef <= 1e-10, udef, 1e-10));
    if (walk) {
      double outside = mass_outside_cone(rec, jump_hull(m).max_norm());
      out.push_back(make("simulate.finite_speed", outside == 0.0, outside, 0.0));
    }
    out.push_back(make("simulate.wraparound", rec.wraparound_safe, rec.boundary_mass, 1e-14));
    // Probe the direction where the region stays furthest from its outer limit.
    RVector n = axis(s, 0);
    double vplus = -kInf, top = -kInf, best_gap = -kInf;
    std::vector<RVector> probes;
    for (int k = 0; k < s; ++k) probes.push_back(axis(s, k));
    if (s == 2) probes.push_back(RVector::Constant(2, 1.0 / std::sqrt(2.0)));
    for (const RVector& dir : probes) {
      double vp = -kInf;
      for (const auto& v : region.samples) vp = std::max(vp, v.velocity.dot(dir));
      const double tp = walk ? jump_hull(m).support(dir) : 2 * vp;
      if (tp - vp > best_gap + 1e-9) best_gap = tp - vp, n = dir, vplus = vp, top = tp;
    }
    for (double f : walk ? std::vector<double>{0.25, 0.5} : std::vector<double>{0.05, 0.125}) {
      const double c = vplus + f * (top - vplus);
      std::ostringstream name;
      name << "simulate.upper_bound[n=" << n.transpose() << ", c=" << c << "]";
      if (!(top - vplus > 1e-6)) {
        out.push_back(skip(name.str(), "propagation region touches the hull along the probe direction"));
        continue;
      }
      const double IM = half_space_rate(R, n, c, lopt);
      TailSeries ts = tail_probability(rec, TailRegion::half_space(n, c));
      try {
        RateFit fit = empirical_rate(ts, t_lo, t_hi);
        out.push_back(make(name.str(), fit.rate >= IM - 0.05, fit.rate - IM, -0.05));
      } catch (const InsufficientData& e) {
        out.push_back(skip(name.str(), e.what()));
      }
    }
  });

  guard("simulate.moment", [&] {
    EvolveOptions eo;
    eo.memory_budget = opt.memory_budget;
    eo.t_max = 150;
    eo.times = {50, 100, 150};
    EvolutionRecord rec = evolve(m, psi0, eo);
    double worst = -kInf;
    std::vector<RVector> dirs = {n};
    if (s == 2) dirs.push_back(RVector::Constant(2, 1.0 / std::sqrt(2.0)));
    for (const RVector& dir : dirs)
      for (double lam : {0.5, 1.0, 2.0}) {
        MomentSeries ms = exp_moment(rec, lam * dir);
        const double r = R(lam * dir);
        for (std::size_t i = 0; i < ms.times.size(); ++i) worst = std::max(worst, ms.log_moment[i] / ms.times[i] - r);
      }
    out.push_back(make("simulate.moment", worst <= 0.05, worst, 0.05));
  });

  if (walk || s == 1)
    guard("simulate.kolmogorov", [&] {
      EvolveOptions eo;
      eo.memory_budget = opt.memory_budget;
      eo.t_max = 500;
      eo.times = {100, 200, 500};
      EvolutionRecord rec = evolve(m, psi0, eo);
      VelocityDistribution th = theoretical_velocity_distribution(m, psi0, s == 1 ? 4096 : 256, opt.gap_tol, 0.2);
      std::vector<double> dist;
      for (double t : eo.times) dist.push_back(kolmogorov_distance(velocity_histogram(rec, t), th).max());
      bool dec = (dist[0] > dist[1] && dist[1] > dist[2]) || dist[0] <= 1e-12;
      std::ostringstream det;
      det << "distances " << dist[0] << ", " << dist[1] << ", " << dist[2];
      out.push_back(make("simulate.kolmogorov_decreasing", dec, dist[2], dist[1], det.str()));
    });
  else
    out.push_back(skip("simulate.kolmogorov_decreasing", "Hamiltonian box at t=500 exceeds the simulation scope"));
  return out;
}

}  // namespace lattail

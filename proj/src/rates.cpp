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

#include "lattail/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <random>

#include "lattail/error.hpp"
#include "lattail/optimize.hpp"
#include "lattail/parallel.hpp"
#include "lattail/spectra.hpp"

namespace lattail {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double rate_from_matrix(const CMatrix& m, bool walk, std::vector<Complex>& eig) {
  eigenvalues_into(m, eig);
  double best = -kInf;
  if (walk) {
    for (const Complex& u : eig) best = std::max(best, std::norm(u));
    return std::log(best);
  }
  for (const Complex& w : eig) best = std::max(best, 2.0 * w.imag());
  return best;
}

void unflatten(std::int64_t idx, const std::vector<int>& dims, std::vector<int>& out) {
  for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
    out[k] = static_cast<int>(idx % dims[k]);
    idx /= dims[k];
  }
}

/// Indices of discrete local maxima (axis neighbours, periodic), best first.
std::vector<std::int64_t> local_maxima(const std::vector<double>& vals, const std::vector<char>* ok,
                                       const std::vector<int>& dims) {
  const int s = static_cast<int>(dims.size());
  std::vector<std::int64_t> stride(s, 1);
  for (int k = s - 2; k >= 0; --k) stride[k] = stride[k + 1] * dims[k + 1];
  std::vector<std::int64_t> out;
  std::vector<int> c(s);
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(vals.size()); ++i) {
    if (ok && !(*ok)[i]) continue;
    unflatten(i, dims, c);
    bool is_max = true;
    for (int k = 0; k < s && is_max; ++k) {
      if (dims[k] == 1) continue;
      for (int step : {-1, 1}) {
        int ck = (c[k] + step + dims[k]) % dims[k];
        std::int64_t j = i + (ck - c[k]) * stride[k];
        if (ok && !(*ok)[j]) continue;
        if (vals[j] > vals[i]) {
          is_max = false;
          break;
        }
      }
    }
    if (is_max) out.push_back(i);
  }
  std::stable_sort(out.begin(), out.end(),
                   [&](std::int64_t a, std::int64_t b) { return vals[a] > vals[b]; });
  return out;
}

RVector grid_point(std::int64_t idx, const std::vector<int>& dims) {
  std::vector<int> c(dims.size());
  unflatten(idx, dims, c);
  RVector p(dims.size());
  for (std::size_t k = 0; k < dims.size(); ++k) p[k] = -kPi + kTwoPi * c[k] / dims[k];
  return p;
}

RVector wrapped(RVector p) {
  for (Eigen::Index k = 0; k < p.size(); ++k) p[k] = wrap_angle(p[k]);
  return p;
}

double torus_distance(const RVector& a, const RVector& b) {
  double d = 0.0;
  for (Eigen::Index k = 0; k < a.size(); ++k) d = std::max(d, std::abs(wrap_angle(a[k] - b[k])));
  return d;
}

/// Orthonormal basis of the complement of a unit vector.
Eigen::MatrixXd complement_basis(const RVector& d) {
  const int s = static_cast<int>(d.size());
  Eigen::MatrixXd full = Eigen::MatrixXd::Identity(s, s);
  full.col(0) = d;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(full);
  Eigen::MatrixXd q = qr.householderQ();
  return q.rightCols(s - 1);
}

std::vector<double> exponential_radii(double lambda_max, int count) {
  std::vector<double> r(count);
  const double alpha = 4.0;
  for (int i = 1; i <= count; ++i)
    r[i - 1] = lambda_max * std::expm1(alpha * i / count) / std::expm1(alpha);
  return r;
}

/// Peak of the parabola through three points with x0 < x1 < x2 and y1 the largest.
double parabola_peak(double x0, double y0, double x1, double y1, double x2, double y2) {
  const double num = (x1 - x0) * (x1 - x0) * (y1 - y2) - (x1 - x2) * (x1 - x2) * (y1 - y0);
  const double den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
  if (!(std::abs(den) > 0)) return y1;
  const double xv = x1 - 0.5 * num / den;
  if (!(xv > x0 && xv < x2)) return y1;
  auto L = [&](double x) {
    return y0 * (x - x1) * (x - x2) / ((x0 - x1) * (x0 - x2)) +
           y1 * (x - x0) * (x - x2) / ((x1 - x0) * (x1 - x2)) +
           y2 * (x - x0) * (x - x1) / ((x2 - x0) * (x2 - x1));
  };
  return std::max(y1, L(xv));
}

}  // namespace

std::vector<int> torus_grid_dims(int s, int grid_n, std::int64_t max_points) {
  std::vector<int> dims(s, grid_n);
  auto total = [&] {
    std::int64_t t = 1;
    for (int v : dims) t *= v;
    return t;
  };
  int k = s - 1;
  for (int guard = 0; total() > max_points && guard < 64 * s; ++guard) {
    if (dims[k] > 1) dims[k] /= 2;
    k = (k + s - 1) % s;
  }
  return dims;
}

TorusMax torus_max(const LatticeModel& model, const RVector& lambda, const TorusSearchOptions& opt) {
  const int s = model.dim_lattice();
  if (lambda.size() != s) throw ModelError("lambda dimension mismatch");
  const std::vector<int> dims = torus_grid_dims(s, opt.grid_n, opt.max_points);
  std::int64_t total = 1;
  for (int v : dims) total *= v;

  SymbolEvaluator ev(model);
  std::vector<std::vector<Complex>> rows(s);
  for (int k = 0; k < s; ++k) {
    const int len = ev.row_length(k);
    rows[k].resize(static_cast<std::size_t>(dims[k]) * len);
    for (int i = 0; i < dims[k]; ++i)
      ev.phase_row(k, Complex(-kPi + kTwoPi * i / dims[k], 0.5 * lambda[k]), &rows[k][i * len]);
  }
  std::vector<double> vals(total);
  std::vector<const Complex*> rp(s);
  std::vector<int> c(s);
  CMatrix buf;
  std::vector<Complex> eig;
  for (std::int64_t t = 0; t < total; ++t) {
    unflatten(t, dims, c);
    for (int k = 0; k < s; ++k) rp[k] = &rows[k][static_cast<std::size_t>(c[k]) * ev.row_length(k)];
    ev.combine(rp.data(), buf);
    vals[t] = rate_from_matrix(buf, model.is_walk(), eig);
    if (std::isnan(vals[t])) throw NumericError("non-finite dual rate on the torus grid");
  }

  std::vector<std::int64_t> starts = local_maxima(vals, nullptr, dims);
  if (starts.empty()) starts.push_back(std::max_element(vals.begin(), vals.end()) - vals.begin());
  if (static_cast<int>(starts.size()) > opt.restarts) starts.resize(opt.restarts);

  TorusMax best;
  best.value = vals[starts.front()];
  best.p = grid_point(starts.front(), dims);
  double cell = kInf;
  for (int v : dims) cell = std::min(cell, kTwoPi / v);

  DualRateSampler sampler(model, lambda);
  auto f = [&](const RVector& p) { return sampler(p); };
  NelderMeadOptions nm;
  nm.initial_step = 0.5 * cell;
  nm.xtol = opt.xtol;
  nm.max_iter = opt.max_iter;
  for (std::int64_t st : starts) {
    RVector p0 = grid_point(st, dims);
    NelderMeadResult r = nelder_mead_max(f, p0, nm);
    if (r.value > best.value) {
      best.value = r.value;
      best.p = wrapped(r.x);
      bool moved = false;
      for (int k = 0; k < s; ++k)
        moved = moved || std::abs(wrap_angle(r.x[k] - p0[k])) > kTwoPi / dims[k] * (1 + 1e-12);
      best.refined = moved;
    }
  }
  return best;
}

DualRate dual_rate(const LatticeModel& model, const std::vector<RVector>& lambdas, int grid_n,
                   TorusSearchOptions opt) {
  if (grid_n < 16) throw NumericError("dual_rate: grid_n must be at least 16");
  opt.grid_n = grid_n;
  const std::size_t n = lambdas.size();
  DualRate out;
  out.lambda_points = lambdas;
  out.values.assign(n, kNaN);
  out.maximizer_p.assign(n, RVector::Constant(model.dim_lattice(), kNaN));
  out.refined.assign(n, false);
  out.errors.assign(n, std::string());
  std::vector<char> refined(n, 0);
  parallel_for(static_cast<std::int64_t>(n), [&](std::int64_t i) {
    try {
      TorusMax t = torus_max(model, lambdas[i], opt);
      out.values[i] = t.value;
      out.maximizer_p[i] = t.p;
      refined[i] = t.refined;
    } catch (const Error& e) {
      out.errors[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < n; ++i) out.refined[i] = refined[i] != 0;
  return out;
}

DualRateFn dual_rate_function(const LatticeModel& model, const TorusSearchOptions& opt) {
  auto m = std::make_shared<const LatticeModel>(model);
  return [m, opt](const RVector& lambda) { return torus_max(*m, lambda, opt).value; };
}

std::vector<RVector> sphere_directions(int s, int count) {
  std::vector<RVector> out;
  if (s == 1) {
    out.push_back(RVector::Constant(1, 1.0));
    out.push_back(RVector::Constant(1, -1.0));
    return out;
  }
  count = std::max(count, 2);
  if (s == 2) {
    for (int k = 0; k < count; ++k) {
      RVector v(2);
      v << std::cos(kTwoPi * k / count), std::sin(kTwoPi * k / count);
      out.push_back(v);
    }
    return out;
  }
  if (s == 3) {
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
      double z = 1.0 - 2.0 * (k + 0.5) / count;
      double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      RVector v(3);
      v << r * std::cos(golden * k), r * std::sin(golden * k), z;
      out.push_back(v);
    }
    return out;
  }
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> g;
  for (int k = 0; k < count; ++k) {
    RVector v(s);
    for (int i = 0; i < s; ++i) v[i] = g(rng);
    out.push_back(v.normalized());
  }
  return out;
}

// ---------------------------------------------------------------------------------------------

namespace {

struct LegendrePoint {
  double value;
  RVector lambda;
  bool unbounded;
};

LegendrePoint legendre_1d(const DualRateFn& R, double x, const LegendreOptions& opt) {
  std::vector<double> radii = exponential_radii(opt.lambda_max, opt.radii);
  std::vector<double> lam;
  for (auto it = radii.rbegin(); it != radii.rend(); ++it) lam.push_back(-*it);
  lam.push_back(0.0);
  for (double r : radii) lam.push_back(r);
  auto f = [&](double l) { return l * x - R(RVector::Constant(1, l)); };
  std::vector<double> vals(lam.size());
  for (std::size_t i = 0; i < lam.size(); ++i) vals[i] = f(lam[i]);
  std::size_t b = std::max_element(vals.begin(), vals.end()) - vals.begin();
  LegendrePoint out{vals[b], RVector::Constant(1, lam[b]), false};
  if (b == 0 || b + 1 == lam.size()) {
    out.unbounded = true;
    return out;
  }
  ScalarMax m = brent_max(f, lam[b - 1], lam[b + 1]);
  if (m.value > out.value) out.value = m.value, out.lambda[0] = m.x;
  return out;
}

LegendrePoint legendre_nd(const DualRateFn& R, const RVector& x, const LegendreOptions& opt) {
  const int s = static_cast<int>(x.size());
  std::vector<RVector> dirs = sphere_directions(s, opt.directions);
  for (int k = 0; k < s; ++k)
    for (double sg : {1.0, -1.0}) {
      RVector e = RVector::Zero(s);
      e[k] = sg;
      dirs.push_back(e);
    }
  if (x.norm() > 0) dirs.push_back(x.normalized());
  std::vector<double> radii = exponential_radii(opt.lambda_max, opt.radii);
  auto f = [&](const RVector& l) {
    double n = l.norm();
    if (n > opt.lambda_max * (1 + 1e-12)) return -kInf;
    return l.dot(x) - R(l);
  };
  LegendrePoint best{-R(RVector::Zero(s)), RVector::Zero(s), false};
  std::size_t best_r = 0;
  for (const auto& d : dirs)
    for (std::size_t i = 0; i < radii.size(); ++i) {
      RVector l = radii[i] * d;
      double v = f(l);
      if (v > best.value) best.value = v, best.lambda = l, best_r = i;
    }
  NelderMeadOptions nm;
  double r0 = best.lambda.norm();
  nm.initial_step = r0 > 0 ? std::max(0.25 * r0, 0.5 * (radii[std::min(best_r + 1, radii.size() - 1)] - radii[best_r]))
                           : radii.front();
  nm.xtol = opt.xtol;
  nm.max_iter = opt.max_iter;
  NelderMeadResult r = nelder_mead_max(f, best.lambda, nm);
  if (r.value > best.value) best.value = r.value, best.lambda = r.x;
  best.unbounded = best.lambda.norm() >= opt.lambda_max * (1 - 1e-6);
  return best;
}

}  // namespace

double half_space_rate(const DualRateFn& R, const RVector& n, double c, const LegendreOptions& opt) {
  DualRateFn line = [&](const RVector& mu) { return mu[0] < 0 ? kInf : R(mu[0] * n); };
  LegendrePoint lp = legendre_1d(line, c, opt);
  if (lp.unbounded && lp.lambda[0] > 0) return kInf;
  return std::max(0.0, lp.value);
}

RateFunction legendre(const DualRateFn& R, const std::vector<RVector>& xs, const LatticeModel& model,
                      const LegendreOptions& opt) {
  const int s = model.dim_lattice();
  const Polytope hull = jump_hull(model);
  RateFunction out;
  out.x_points = xs;
  out.values.assign(xs.size(), kNaN);
  out.maximizer_lambda.assign(xs.size(), RVector::Constant(s, kNaN));
  std::vector<char> unb(xs.size(), 0);
  parallel_for(static_cast<std::int64_t>(xs.size()), [&](std::int64_t i) {
    const RVector& x = xs[i];
    if (x.size() != s) throw ModelError("x dimension mismatch");
    if (model.is_walk() && hull.distance(x) > opt.hull_margin) {
      out.values[i] = kInf;
      return;
    }
    LegendrePoint lp = s == 1 ? legendre_1d(R, x[0], opt) : legendre_nd(R, x, opt);
    out.values[i] = std::max(lp.value, 0.0);
    out.maximizer_lambda[i] = lp.value > 0.0 ? lp.lambda : RVector::Zero(s);
    unb[i] = lp.unbounded;
  });
  out.unbounded.assign(unb.begin(), unb.end());
  return out;
}

RateFunction legendre(const DualRate& dual, const std::vector<RVector>& xs, const LatticeModel& model,
                      const LegendreOptions& opt) {
  const int s = model.dim_lattice();
  const Polytope hull = jump_hull(model);
  double max_norm = 0.0;
  for (const auto& l : dual.lambda_points) max_norm = std::max(max_norm, l.norm());
  RateFunction out;
  out.x_points = xs;
  for (const RVector& x : xs) {
    if (model.is_walk() && hull.distance(x) > opt.hull_margin) {
      out.values.push_back(kInf);
      out.maximizer_lambda.push_back(RVector::Constant(s, kNaN));
      out.unbounded.push_back(false);
      continue;
    }
    double best = 0.0;
    RVector arg = RVector::Zero(s);
    for (std::size_t i = 0; i < dual.values.size(); ++i) {
      if (!std::isfinite(dual.values[i])) continue;
      double v = dual.lambda_points[i].dot(x) - dual.values[i];
      if (v > best) best = v, arg = dual.lambda_points[i];
    }
    out.values.push_back(best);
    out.maximizer_lambda.push_back(arg);
    out.unbounded.push_back(best > 0 && arg.norm() >= max_norm * (1 - 1e-12));
  }
  return out;
}

// ---------------------------------------------------------------------------------------------

namespace {

struct RadialSearch {
  std::shared_ptr<const LatticeModel> model;
  RadialOptions opt;
  std::vector<RVector> dirs;

  std::pair<double, RVector> operator()(double ell) const {
    const int s = model->dim_lattice();
    if (!(ell > 0)) return {0.0, RVector::Zero(s)};
    auto R = [&](const RVector& l) { return torus_max(*model, l, opt.inner).value; };
    if (s == 1) {
      RVector lp = RVector::Constant(1, ell), lm = RVector::Constant(1, -ell);
      double a = R(lp), b = R(lm);
      return a >= b ? std::make_pair(a, lp) : std::make_pair(b, lm);
    }
    double best = -kInf;
    RVector bd;
    for (const auto& d : dirs) {
      double v = R(ell * d);
      if (v > best) best = v, bd = d;
    }
    return polish(ell, bd, best);
  }

  /// Direction search started at d only.
  std::pair<double, RVector> local(double ell, const RVector& d) const {
    if (!(ell > 0) || model->dim_lattice() == 1 || !(d.norm() > 0)) return (*this)(ell);
    const RVector u = d.normalized();
    return polish(ell, u, torus_max(*model, ell * u, opt.inner).value);
  }

  std::pair<double, RVector> polish(double ell, const RVector& bd, double best) const {
    const int s = model->dim_lattice();
    auto R = [&](const RVector& l) { return torus_max(*model, l, opt.inner).value; };
    const Eigen::MatrixXd B = complement_basis(bd);
    auto dir_of = [&](const RVector& u) -> RVector { return (bd + B * u).normalized(); };
    NelderMeadOptions nm;
    nm.initial_step = 0.05;
    nm.xtol = opt.xtol;
    nm.max_iter = opt.max_iter;
    NelderMeadResult r = nelder_mead_max([&](const RVector& u) { return R(ell * dir_of(u)); },
                                         RVector::Zero(s - 1), nm);
    if (r.value > best) return {r.value, ell * dir_of(r.x)};
    return {best, ell * bd};
  }
};

}  // namespace

RadialRate radial_dual(const LatticeModel& model, const std::vector<double>& ells, int dir_samples,
                       const RadialOptions& opt) {
  if (dir_samples < 1) throw NumericError("radial_dual: need at least one direction per orthant");
  const int s = model.dim_lattice();
  auto search = std::make_shared<RadialSearch>();
  search->model = std::make_shared<const LatticeModel>(model);
  search->opt = opt;
  if (s >= 2) {
    const int orthants = 1 << std::min(s, 10);
    std::vector<RVector> spread = sphere_directions(s, std::max(1, dir_samples - 1) * orthants);
    for (int mask = 0; mask < orthants; ++mask) {
      RVector c(s);
      for (int k = 0; k < s; ++k) c[k] = (mask >> k & 1) ? -1.0 : 1.0;
      search->dirs.push_back(c / std::sqrt(double(s)));
    }
    if (dir_samples > 1) search->dirs.insert(search->dirs.end(), spread.begin(), spread.end());
    for (int k = 0; k < s; ++k)
      for (double sg : {1.0, -1.0}) {
        RVector e = RVector::Zero(s);
        e[k] = sg;
        search->dirs.push_back(e);
      }
  }

  RadialRate out;
  out.walk = model.is_walk();
  out.hull_radius = jump_hull(model).max_norm();
  out.ell_points = ells;
  out.dual_values.assign(ells.size(), kNaN);
  out.maximizer_lambda.assign(ells.size(), RVector::Zero(s));
  parallel_for(static_cast<std::int64_t>(ells.size()), [&](std::int64_t i) {
    if (ells[i] < 0) throw NumericError("radial_dual: ell must be nonnegative");
    auto [v, l] = (*search)(ells[i]);
    out.dual_values[i] = v;
    out.maximizer_lambda[i] = l;
  });
  std::vector<std::size_t> order(ells.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ells[a] < ells[b]; });
  double run = 0.0;
  RVector run_l = RVector::Zero(s);
  for (std::size_t i : order) {
    if (out.dual_values[i] >= run) {
      run = out.dual_values[i];
      run_l = out.maximizer_lambda[i];
    } else {
      out.dual_values[i] = run;
      out.maximizer_lambda[i] = run_l;
    }
  }
  std::vector<std::pair<double, RVector>> warm;
  for (std::size_t i = 0; i < ells.size(); ++i) warm.emplace_back(ells[i], out.maximizer_lambda[i]);
  out.dual_eval = [search, warm](double ell) {
    const RVector* start = nullptr;
    double gap = kInf;
    for (const auto& [e, l] : warm)
      if (std::abs(e - ell) < gap && l.norm() > 0) gap = std::abs(e - ell), start = &l;
    return start ? search->local(ell, *start).first : (*search)(ell).first;
  };
  return out;
}

RadialRate radial_rate(const RadialRate& rd, const std::vector<double>& rs) {
  RadialRate out = rd;
  out.r_points = rs;
  out.rate_values.assign(rs.size(), kNaN);
  std::vector<std::size_t> order(rd.ell_points.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rd.ell_points[a] < rd.ell_points[b]; });
  std::vector<double> ell = {0.0}, val = {0.0};
  for (std::size_t i : order) {
    if (rd.ell_points[i] <= 0.0) continue;
    ell.push_back(rd.ell_points[i]);
    val.push_back(rd.dual_values[i]);
  }
  parallel_for(static_cast<std::int64_t>(rs.size()), [&](std::int64_t k) {
    const double r = rs[k];
    if (rd.walk && r > rd.hull_radius + 1e-9) {
      out.rate_values[k] = kInf;
      return;
    }
    std::size_t b = 0;
    double best = 0.0;
    for (std::size_t i = 0; i < ell.size(); ++i) {
      double v = r * ell[i] - val[i];
      if (v > best) best = v, b = i;
    }
    if (ell.size() >= 2) {
      const double lo = b == 0 ? 0.0 : ell[b - 1];
      const double hi = b + 1 < ell.size() ? ell[b + 1] : ell[b];
      if (rd.dual_eval && hi > lo) {
        ScalarMax m = brent_max([&](double l) { return r * l - rd.dual_eval(l); }, lo, hi);
        best = std::max(best, m.value);
      } else if (b > 0 && b + 1 < ell.size()) {
        best = std::max(best, parabola_peak(ell[b - 1], r * ell[b - 1] - val[b - 1], ell[b], best,
                                            ell[b + 1], r * ell[b + 1] - val[b + 1]));
      }
    }
    out.rate_values[k] = std::max(best, 0.0);
  });
  // Monotone in r by definition.
  std::vector<std::size_t> ro(rs.size());
  std::iota(ro.begin(), ro.end(), 0);
  std::stable_sort(ro.begin(), ro.end(), [&](std::size_t a, std::size_t b) { return rs[a] < rs[b]; });
  double run = 0.0;
  for (std::size_t i : ro) {
    run = std::max(run, out.rate_values[i]);
    out.rate_values[i] = run;
  }
  return out;
}

// ---------------------------------------------------------------------------------------------

double BoundaryExpansion::constant() const {
  if (flat()) return 0.0;
  return 2.0 / std::sqrt(27.0 * cubic());
}

namespace {

struct Expansion {
  int branch;
  RVector x_star;
  double a;
  double b;
};

Expansion expand_at(const LatticeModel& model, const RVector& n, const RVector& p,
                    const BoundaryOptions& opt) {
  BandEvaluator be(model, opt.gap_tol);
  std::vector<VelocitySample> bands;
  if (!be.try_evaluate(p, bands) || be.last_gap() < opt.regular_gap)
    throw BoundaryError(BoundaryError::Reason::DegenerateMaximizer,
                        "maximizer sits at a degenerate point of the spectrum");
  int j = 0;
  for (int i = 1; i < static_cast<int>(bands.size()); ++i)
    if (n.dot(bands[i].velocity) > n.dot(bands[j].velocity)) j = i;
  const double omega0 = bands[j].omega;
  const double a = n.dot(bands[j].velocity);
  const bool walk = model.is_walk();

  SymbolEvaluator ev(model);
  CMatrix buf;
  std::vector<Complex> eig;
  auto phase = [&](double t) {
    RVector q = p + t * n;
    ev.evaluate(q.data(), nullptr, buf);
    eigenvalues_into(buf, eig);
    const double pred = omega0 + a * t;
    double best = kInf, pick = pred;
    std::vector<double> ph;
    for (const Complex& u : eig) ph.push_back(walk ? -std::arg(u) : u.real());
    for (double w : ph) {
      double dlt = walk ? wrap_angle(w - pred) : w - pred;
      if (std::abs(dlt) < best) best = std::abs(dlt), pick = pred + dlt;
    }
    double gap = kInf;
    for (std::size_t i = 0; i < eig.size(); ++i)
      for (std::size_t k = i + 1; k < eig.size(); ++k) gap = std::min(gap, std::abs(eig[i] - eig[k]));
    if (gap < opt.regular_gap)
      throw BoundaryError(BoundaryError::Reason::DegenerateMaximizer,
                          "spectrum degenerates along the expansion line");
    return pick;
  };
  auto third = [&](double h) {
    return (phase(-3 * h) - 8 * phase(-2 * h) + 13 * phase(-h) - 13 * phase(h) + 8 * phase(2 * h) -
            phase(3 * h)) /
           (8 * h * h * h);
  };
  const double b1 = -third(opt.h);
  const double b2 = -third(0.5 * opt.h);
  const double scale = std::max(std::abs(b1), std::abs(b2));
  if (scale > 1e-7 && std::abs(b1 - b2) > opt.richardson_tol * scale)
    throw BoundaryError(BoundaryError::Reason::ThirdDerivativeUnstable,
                        "third derivative changes by " + std::to_string(std::abs(b1 - b2)) +
                            " between h and h/2");
  double b = (16.0 * b2 - b1) / 15.0;
  if (scale <= 1e-7) b = 0.0;
  return {j, bands[j].velocity, a, std::max(b, 0.0)};
}

}  // namespace

BoundaryExpansion boundary_expansion(const LatticeModel& model, const RVector& n_in,
                                     const BoundaryOptions& opt) {
  const int s = model.dim_lattice();
  if (n_in.size() != s || !(n_in.norm() > 0)) throw GeometryError("boundary direction must be a nonzero vector of length s");
  const RVector n = n_in.normalized();
  const std::vector<int> dims = torus_grid_dims(s, opt.grid_n, opt.max_points);
  std::int64_t total = 1;
  for (int v : dims) total *= v;
  std::vector<double> vals(total, -kInf);
  std::vector<char> ok(total, 0);
  parallel_blocks(total, [&](std::int64_t lo, std::int64_t hi) {
    BandEvaluator be(model, opt.gap_tol);
    std::vector<VelocitySample> bands;
    for (std::int64_t i = lo; i < hi; ++i) {
      if (!be.try_evaluate(grid_point(i, dims), bands)) continue;
      ok[i] = 1;
      for (const auto& v : bands) vals[i] = std::max(vals[i], n.dot(v.velocity));
    }
  });
  std::vector<std::int64_t> starts = local_maxima(vals, &ok, dims);
  if (starts.empty()) throw BoundaryError(BoundaryError::Reason::DegenerateMaximizer, "no regular grid point");
  if (starts.size() > 6) starts.resize(6);

  double cell = kInf;
  for (int v : dims) cell = std::min(cell, kTwoPi / v);
  struct Cand {
    double value;
    RVector p;
  };
  std::vector<Cand> cands(starts.size());
  parallel_for(static_cast<std::int64_t>(starts.size()), [&](std::int64_t c) {
    BandEvaluator be(model, opt.gap_tol);
    std::vector<VelocitySample> bands;
    auto g = [&](const RVector& p) {
      if (!be.try_evaluate(p, bands)) return -1e300;
      double m = -kInf;
      for (const auto& v : bands) m = std::max(m, n.dot(v.velocity));
      return m;
    };
    NelderMeadOptions nm;
    nm.initial_step = 0.5 * cell;
    nm.xtol = 1e-12;
    nm.max_iter = opt.max_iter;
    RVector p0 = grid_point(starts[c], dims);
    NelderMeadResult r = nelder_mead_max(g, p0, nm);
    cands[c] = r.value >= vals[starts[c]] ? Cand{r.value, wrapped(r.x)} : Cand{vals[starts[c]], p0};
  });
  std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.value > b.value; });

  const Cand& top = cands.front();
  Expansion e = expand_at(model, n, top.p, opt);
  BoundaryExpansion out;
  out.n = n;
  out.x_star = e.x_star;
  out.a = e.a;
  out.b = e.b;
  out.branch = e.branch;
  out.p = top.p;
  std::vector<RVector> distinct = {top.p};
  for (std::size_t c = 1; c < cands.size(); ++c) {
    if (cands[c].value < top.value - opt.tie_tol) break;
    bool fresh = true;
    for (const auto& q : distinct) fresh = fresh && torus_distance(q, cands[c].p) > 1e-3;
    if (!fresh) continue;
    distinct.push_back(cands[c].p);
    Expansion other = expand_at(model, n, cands[c].p, opt);
    if (std::abs(other.b - e.b) > 1e-3 * std::max(e.b, other.b) + 1e-9 ||
        (other.x_star - e.x_star).norm() > 1e-6)
      throw BoundaryError(BoundaryError::Reason::NonUniqueMaximizer,
                          "distinct maximizers with different boundary data");
    ++out.ties;
  }
  return out;
}

double boundary_rate_bound(const BoundaryExpansion& be, const RVector& x) {
  const double delta = be.n.dot(x - be.x_star);
  if (!(delta > 0.0) || be.flat()) return 0.0;
  return be.constant() * std::pow(delta, 1.5);
}

double lieb_robinson_bound(const LatticeModel& model, const RVector& x) {
  if (model.is_walk()) throw ModelError("lieb_robinson_bound applies to Hamiltonians");
  const double g = gauge(augmented_jump_hull(model), x);
  const double eC = std::exp(1.0) * model.coefficient_norm_sum();
  if (g <= eC) return 0.0;
  return 2.0 * g * std::log(g / eC);
}

bool within_lieb_robinson_region(const LatticeModel& model, const RVector& v, double tol) {
  const double eC = std::exp(1.0) * model.coefficient_norm_sum();
  return augmented_jump_hull(model).scaled(eC).contains(v, tol);
}

}  // namespace lattail

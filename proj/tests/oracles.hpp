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

// Reference computations that do not go through the library's numerics.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <vector>

#include "lattail/model.hpp"

namespace oracle {

inline double coin_dual_rate(double a, double lambda) {
  return 2.0 * std::asinh(a * std::sinh(std::abs(lambda) / 2.0));
}

/// Maximizing lambda of x lambda - R(lambda) for a < |x| < 1, from R'(lambda) = x.
inline double coin_lambda(double a, double x) {
  const double s2 = (x * x - a * a) / (a * a * (1.0 - x * x));
  return std::copysign(2.0 * std::asinh(std::sqrt(s2)), x);
}

inline double coin_rate(double a, double x) {
  const double ax = std::abs(x);
  if (ax <= a) return 0.0;
  if (ax > 1.0) return INFINITY;
  if (ax == 1.0) return -2.0 * std::log(a);
  const double l = coin_lambda(a, x);
  return l * x - coin_dual_rate(a, l);
}

inline double spherical_radial_dual(double ell) {
  return 2.0 * std::acosh(std::pow(std::cosh(ell / (2.0 * std::sqrt(3.0))), 3));
}

/// sup of f on [lo, hi] by a dense scan followed by golden-section search.
inline double dense_max(const std::function<double(double)>& f, double lo, double hi, int n = 20000) {
  double best = -INFINITY, arg = lo;
  for (int i = 0; i <= n; ++i) {
    double x = lo + (hi - lo) * i / n, v = f(x);
    if (v > best) best = v, arg = x;
  }
  double a = std::max(lo, arg - (hi - lo) / n), b = std::min(hi, arg + (hi - lo) / n);
  const double g = (std::sqrt(5.0) - 1) / 2;
  for (int it = 0; it < 200; ++it) {
    double c = b - g * (b - a), d = a + g * (b - a);
    if (f(c) > f(d)) b = d; else a = c;
  }
  return std::max(best, f(0.5 * (a + b)));
}

/// Spectral radius of a 2x2 complex matrix from its characteristic polynomial.
inline double spectral_radius2(std::complex<double> m00, std::complex<double> m01, std::complex<double> m10,
                               std::complex<double> m11) {
  auto tr = m00 + m11, det = m00 * m11 - m01 * m10;
  auto disc = std::sqrt(tr * tr - 4.0 * det);
  return std::max(std::abs((tr + disc) / 2.0), std::abs((tr - disc) / 2.0));
}

using LComplex = std::complex<long double>;
using Site = std::vector<int>;

/// Position-space walk evolution in long double on a sparse map.
class NaiveWalk {
 public:
  NaiveWalk(const lattail::LatticeModel& m, const Site& x0, const std::vector<std::complex<double>>& v)
      : model_(m), d_(m.dim_cell()) {
    std::vector<LComplex> a(v.begin(), v.end());
    state_[x0] = a;
  }

  void step() {
    std::map<Site, std::vector<LComplex>> next;
    for (const auto& [x, amp] : state_)
      for (const auto& j : model_.jumps()) {
        Site y = x;
        for (std::size_t k = 0; k < y.size(); ++k) y[k] += j.offset[k];
        auto& out = next[y];
        if (out.empty()) out.assign(d_, 0.0L);
        for (int r = 0; r < d_; ++r)
          for (int c = 0; c < d_; ++c) {
            std::complex<double> cf = j.coeff(r, c);
            out[r] += LComplex(cf.real(), cf.imag()) * amp[c];
          }
      }
    state_.swap(next);
  }

  long double probability(const Site& x) const {
    auto it = state_.find(x);
    if (it == state_.end()) return 0.0L;
    long double p = 0.0L;
    for (const auto& a : it->second) p += std::norm(a);
    return p;
  }

  const std::map<Site, std::vector<LComplex>>& state() const { return state_; }

 private:
  const lattail::LatticeModel& model_;
  int d_;
  std::map<Site, std::vector<LComplex>> state_;
};

/// |J_x(t)|^2, the site distribution of the chain with H(p) = cos p started at the origin.
inline double cosine_chain_probability(int x, double t) {
  double j = std::cyl_bessel_j(static_cast<double>(std::abs(x)), t);
  return j * j;
}

/// Membership of q in the convex hull of planar points, checked over all triangles and segments.
inline bool planar_hull_contains(const std::vector<std::array<double, 2>>& pts, std::array<double, 2> q,
                                 double tol = 1e-9) {
  auto cross = [](std::array<double, 2> o, std::array<double, 2> a, std::array<double, 2> b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
  };
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      for (std::size_t k = j; k < n; ++k) {
        double d1 = cross(pts[i], pts[j], q), d2 = cross(pts[j], pts[k], q), d3 = cross(pts[k], pts[i], q);
        bool neg = d1 < -tol || d2 < -tol || d3 < -tol, pos = d1 > tol || d2 > tol || d3 > tol;
        if (neg && pos) continue;
        // Degenerate triangles: require q within the bounding box of the three points.
        double lo0 = std::min({pts[i][0], pts[j][0], pts[k][0]}), hi0 = std::max({pts[i][0], pts[j][0], pts[k][0]});
        double lo1 = std::min({pts[i][1], pts[j][1], pts[k][1]}), hi1 = std::max({pts[i][1], pts[j][1], pts[k][1]});
        if (q[0] >= lo0 - tol && q[0] <= hi0 + tol && q[1] >= lo1 - tol && q[1] <= hi1 + tol) return true;
      }
  return false;
}

}  // namespace oracle

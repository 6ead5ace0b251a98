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

#include "lattail/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <boost/math/tools/minima.hpp>

namespace lattail {

NelderMeadResult nelder_mead_max(const std::function<double(const RVector&)>& f, const RVector& x0,
                                 const NelderMeadOptions& opt) {
  const int n = static_cast<int>(x0.size());
  std::vector<RVector> pts(n + 1, x0);
  std::vector<double> val(n + 1);
  for (int i = 0; i < n; ++i) pts[i + 1][i] += opt.initial_step;
  for (int i = 0; i <= n; ++i) val[i] = f(pts[i]);

  std::vector<int> order(n + 1);
  NelderMeadResult res;
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return val[a] > val[b]; });
  };
  auto diameter = [&] {
    double d = 0.0;
    for (int i = 1; i <= n; ++i) d = std::max(d, (pts[i] - pts[0]).lpNorm<Eigen::Infinity>());
    return d;
  };
  int it = 0;
  for (; it < opt.max_iter; ++it) {
    sort_simplex();
    {
      std::vector<RVector> p2(n + 1);
      std::vector<double> v2(n + 1);
      for (int i = 0; i <= n; ++i) p2[i] = pts[order[i]], v2[i] = val[order[i]];
      pts.swap(p2);
      val.swap(v2);
    }
    if (diameter() < opt.xtol) {
      res.converged = true;
      break;
    }
    RVector centroid = RVector::Zero(n);
    for (int i = 0; i < n; ++i) centroid += pts[i];
    centroid /= n;
    const RVector& worst = pts[n];
    RVector xr = centroid + (centroid - worst);
    double fr = f(xr);
    if (fr > val[0]) {
      RVector xe = centroid + 2.0 * (centroid - worst);
      double fe = f(xe);
      if (fe > fr)
        pts[n] = xe, val[n] = fe;
      else
        pts[n] = xr, val[n] = fr;
      continue;
    }
    if (fr > val[n - 1]) {
      pts[n] = xr, val[n] = fr;
      continue;
    }
    bool outside = fr > val[n];
    RVector xc = outside ? RVector(centroid + 0.5 * (xr - centroid))
                         : RVector(centroid + 0.5 * (worst - centroid));
    double fc = f(xc);
    if (fc > (outside ? fr : val[n])) {
      pts[n] = xc, val[n] = fc;
      continue;
    }
    for (int i = 1; i <= n; ++i) {
      pts[i] = pts[0] + 0.5 * (pts[i] - pts[0]);
      val[i] = f(pts[i]);
    }
  }
  sort_simplex();
  res.x = pts[order[0]];
  res.value = val[order[0]];
  res.iterations = it;
  return res;
}

ScalarMax brent_max(const std::function<double(double)>& f, double lo, double hi, int bits) {
  auto r = boost::math::tools::brent_find_minima([&](double x) { return -f(x); }, lo, hi, bits);
  return {r.first, -r.second};
}

}  // namespace lattail

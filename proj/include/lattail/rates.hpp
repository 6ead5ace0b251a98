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

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "lattail/linalg.hpp"
#include "lattail/model.hpp"
#include "lattail/polytope.hpp"

namespace lattail {

/// Global maximization of the dual rate over the Brillouin torus.
struct TorusSearchOptions {
  int grid_n = 64;
  /// Cap on grid points; the last axes are halved until the grid fits (64*64*32 for s=3).
  std::int64_t max_points = 64 * 64 * 32;
  int restarts = 3;
  double xtol = 1e-10;
  int max_iter = 200;
};

struct TorusMax {
  double value = 0.0;
  RVector p;
  /// Refinement moved the maximizer by more than one grid cell.
  bool refined = false;
};

/// sup_p of dual_rate_at(p + i lambda/2).
TorusMax torus_max(const LatticeModel& model, const RVector& lambda,
                   const TorusSearchOptions& opt = {});

/// Grid extent per axis under the point cap.
std::vector<int> torus_grid_dims(int s, int grid_n, std::int64_t max_points);

/// R(lambda) sampled at a list of points.
struct DualRate {
  std::vector<RVector> lambda_points;
  std::vector<double> values;
  std::vector<RVector> maximizer_p;
  std::vector<bool> refined;
  /// Empty on success, otherwise the failure message for that point (value is NaN).
  std::vector<std::string> errors;
};

DualRate dual_rate(const LatticeModel& model, const std::vector<RVector>& lambdas, int grid_n,
                   TorusSearchOptions opt = {});

using DualRateFn = std::function<double(const RVector&)>;

/// Thread-safe callable lambda -> R(lambda) backed by torus_max.
DualRateFn dual_rate_function(const LatticeModel& model, const TorusSearchOptions& opt = {});

struct LegendreOptions {
  double lambda_max = 12.0;
  /// Radii per direction, spaced exponentially in (0, lambda_max].
  int radii = 40;
  /// Direction samples for s >= 2 (spread over the unit sphere).
  int directions = 64;
  double hull_margin = 1e-9;
  double xtol = 1e-10;
  int max_iter = 400;
};

struct RateFunction {
  std::vector<RVector> x_points;
  /// I(x) in [0, inf].
  std::vector<double> values;
  std::vector<RVector> maximizer_lambda;
  /// Supremum still increasing at |lambda| = lambda_max; value is the restricted sup.
  std::vector<bool> unbounded;
};

/// I(x) = sup_lambda (lambda.x - R(lambda)). For walks, points outside conv F get inf exactly.
RateFunction legendre(const DualRateFn& R, const std::vector<RVector>& xs,
                      const LatticeModel& model, const LegendreOptions& opt = {});

/// Sup over the sampled points of a DualRate only (no refinement).
RateFunction legendre(const DualRate& dual, const std::vector<RVector>& xs,
                      const LatticeModel& model, const LegendreOptions& opt = {});

/// inf of I over the half-space {n.x >= c}, as sup over mu >= 0 of mu c - R(mu n).
/// Infinite when the supremum is still growing at lambda_max.
double half_space_rate(const DualRateFn& R, const RVector& n, double c, const LegendreOptions& opt = {});

struct RadialOptions {
  TorusSearchOptions inner = {24, 24 * 24 * 24, 3, 1e-10, 200};
  double xtol = 1e-10;
  int max_iter = 300;
};

struct RadialRate {
  std::vector<double> ell_points;
  /// R~(ell), running maximum over ell.
  std::vector<double> dual_values;
  std::vector<RVector> maximizer_lambda;
  std::vector<double> r_points;
  std::vector<double> rate_values;
  /// Largest |y| over the jump set; rates beyond it are infinite (walks).
  double hull_radius = 0.0;
  bool walk = true;
  /// R~ evaluated at a fresh ell (without running maximum); used to refine the transform.
  std::function<double(double)> dual_eval;
};

/// R~(ell) = max_{|lambda| <= ell} R(lambda) over dir_samples directions per orthant plus the axes,
/// refined by a simplex search over directions.
RadialRate radial_dual(const LatticeModel& model, const std::vector<double>& ells, int dir_samples,
                       const RadialOptions& opt = {});

/// I~(r) = sup_ell (r ell - R~(ell)); fills r_points and rate_values of a copy of rd.
RadialRate radial_rate(const RadialRate& rd, const std::vector<double>& rs);

struct BoundaryOptions {
  int grid_n = 64;
  std::int64_t max_points = 64 * 64 * 32;
  double gap_tol = 1e-8;
  /// Minimal gap at the maximizer and along the finite-difference stencil.
  double regular_gap = 1e-4;
  /// Distinct maxima within this value must agree in b, otherwise NonUniqueMaximizer.
  double tie_tol = 1e-6;
  double h = 1e-2;
  double richardson_tol = 1e-3;
  int max_iter = 400;
};

/// Near the boundary point x_* in direction n: R(tn) = a t + (b/24) t^3 + O(t^4).
struct BoundaryExpansion {
  RVector n;
  RVector x_star;
  double a = 0.0;
  /// -d^3/dt^3 omega_j(p + t n) at t = 0.
  double b = 0.0;
  int branch = 0;
  RVector p;
  /// Number of distinct maximizers that agreed within tie_tol.
  int ties = 1;

  /// Cubic coefficient of R along the ray.
  double cubic() const { return b / 24.0; }
  /// Prefactor c of I(x) >= c (n.(x - x_*))_+^{3/2}; 0 for a flat boundary.
  double constant() const;
  bool flat() const { return !(b > 0.0); }
};

BoundaryExpansion boundary_expansion(const LatticeModel& model, const RVector& n,
                                     const BoundaryOptions& opt = {});

/// c (n.(x - x_*))_+^{3/2}; 0 inside or for flat boundaries.
double boundary_rate_bound(const BoundaryExpansion& be, const RVector& x);

/// max(0, 2 g(x) log(g(x) / (e C))) with g the gauge of conv(F u {0}), C = sum ||H_y||.
double lieb_robinson_bound(const LatticeModel& model, const RVector& x);

/// v in e C conv(F u {0}).
bool within_lieb_robinson_region(const LatticeModel& model, const RVector& v, double tol = 1e-9);

/// Unit vectors spread over S^{s-1} (deterministic).
std::vector<RVector> sphere_directions(int s, int count);

}  // namespace lattail

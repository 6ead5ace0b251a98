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

#include <vector>

#include "lattail/linalg.hpp"

namespace lattail {

/// normal . x <= offset (inequality) or normal . x == offset (equality); normal has unit length.
struct Halfspace {
  RVector normal;
  double offset = 0.0;
};

/// Convex hull of a finite point set.
///
/// For ambient dimension <= 3 the hull is exact: vertices plus facet inequalities inside the
/// affine hull, and equalities describing the affine hull itself. Above 3 dimensions only the
/// point set is kept; membership is decided by a minimum-norm-point computation and the
/// support function is evaluated on demand.
class Polytope {
 public:
  Polytope() = default;

  static Polytope hull(const std::vector<RVector>& points, int ambient_dim, double tol = 1e-10);

  int ambient_dim() const { return ambient_dim_; }
  int affine_dim() const { return affine_dim_; }
  bool empty() const { return vertices_.empty(); }
  bool has_facets() const { return exact_; }

  const std::vector<RVector>& vertices() const { return vertices_; }
  const std::vector<Halfspace>& facets() const { return facets_; }
  const std::vector<Halfspace>& equalities() const { return equalities_; }

  bool contains(const RVector& x, double tol = 1e-9) const;
  /// Euclidean distance from x to the hull (0 inside).
  double distance(const RVector& x) const;
  /// max over the hull of dir . v.
  double support(const RVector& dir) const;
  /// max over the hull of |v|.
  double max_norm() const;

  /// Polytope scaled about the origin.
  Polytope scaled(double factor) const;

 private:
  int ambient_dim_ = 0;
  int affine_dim_ = -1;
  bool exact_ = false;
  std::vector<RVector> vertices_;
  std::vector<Halfspace> facets_;
  std::vector<Halfspace> equalities_;
};

/// Minkowski gauge g(x) = inf{a > 0 : x in a*hull}. The origin must lie in the interior of the
/// hull; otherwise GeometryError is thrown (augment the point set with the origin first).
double gauge(const Polytope& hull, const RVector& x);

}  // namespace lattail

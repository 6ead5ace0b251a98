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

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "lattail/linalg.hpp"
#include "lattail/model.hpp"

namespace lattail {

/// Closed-form reference functions of a catalog model. Unset members are unavailable.
struct ClosedForms {
  /// Walks: nonnegative band phase omega(p), the bands are +-omega (one band for d = 1).
  /// Scalar Hamiltonians: the energy.
  std::function<double(const RVector&)> dispersion;
  /// Group velocities of all bands at a regular p (unordered).
  std::function<std::vector<RVector>(const RVector&)> group_velocity;
  std::function<double(const RVector&)> dual_rate;
  std::function<double(const RVector&)> rate;
  std::function<double(double)> radial_dual;
  /// (a, b) of the boundary expansion in direction n.
  std::function<std::pair<double, double>(const RVector&)> boundary_coeffs;
  /// Membership in the closed propagation region, with tolerance.
  std::function<bool(const RVector&, double)> region;
};

struct CatalogEntry {
  std::string name;
  LatticeModel model;
  ClosedForms closed_forms;
  std::string provenance;
};

/// Names: "coin1d", "coin1d(a)" with 0 < a < 1, "weyl2d", "nonconvex2d", "weyl3d",
/// "spherical3d", "shift1d". Throws ModelError for unknown names.
CatalogEntry catalog_get(const std::string& name);

bool is_catalog_name(const std::string& name);

std::vector<std::string> catalog_names();

}  // namespace lattail

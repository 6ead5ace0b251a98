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

#include "lattail/linalg.hpp"

namespace lattail {

struct NelderMeadOptions {
  double initial_step = 0.1;
  /// Stop once the simplex diameter falls below this.
  double xtol = 1e-10;
  int max_iter = 200;
};

struct NelderMeadResult {
  RVector x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Derivative-free maximization of f starting from x0 (axis-aligned initial simplex).
NelderMeadResult nelder_mead_max(const std::function<double(const RVector&)>& f, const RVector& x0,
                                 const NelderMeadOptions& opt = {});

/// Golden-section/Brent maximization of a scalar function on [lo, hi].
struct ScalarMax {
  double x = 0.0;
  double value = 0.0;
};
ScalarMax brent_max(const std::function<double(double)>& f, double lo, double hi, int bits = 52);

}  // namespace lattail

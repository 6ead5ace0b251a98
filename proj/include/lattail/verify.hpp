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
#include <vector>

#include "lattail/catalog.hpp"
#include "lattail/io.hpp"
#include "lattail/model.hpp"
#include "lattail/rates.hpp"
#include "lattail/spectra.hpp"

namespace lattail {

struct VerifyOptions {
  std::uint64_t seed = 20260214;
  int random_points = 100;
  /// 0 selects 1024 in one dimension and 64 otherwise.
  int region_grid = 0;
  double gap_tol = kDefaultGapTol;
  /// Gap below which a random momentum is not used for finite-difference checks.
  double regular_gap = 1e-3;
  LegendreOptions legendre;
  bool simulate = true;
  std::size_t memory_budget = std::size_t{2} << 30;
};

/// Invariant battery on a model; closed forms are compared when a catalog entry is given.
std::vector<CheckResult> run_verification(const LatticeModel& model, const CatalogEntry* entry,
                                          const VerifyOptions& opt = {});

/// Torus settings used for rate checks: full default grid in one dimension, coarser above.
TorusSearchOptions verification_torus(int s);

/// Random momenta in [-pi, pi)^s where the band gap exceeds min_gap.
std::vector<RVector> regular_momenta(const LatticeModel& model, int count, std::uint64_t seed, double min_gap);

/// Largest deviation between group velocities and central differences of the band phases.
double group_velocity_fd_error(const LatticeModel& model, const std::vector<RVector>& momenta, double h = 1e-5);

/// Largest relative residual of W(p + i l) W(p - i l)^* = 1 (walks) or H(p + i l)^* = H(p - i l).
double conjugation_residual(const LatticeModel& model, int count, std::uint64_t seed, double lambda_box = 2.0);

}  // namespace lattail

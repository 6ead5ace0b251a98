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
#include <optional>
#include <vector>

#include "lattail/linalg.hpp"
#include "lattail/model.hpp"
#include "lattail/polytope.hpp"

namespace lattail {

struct SpectrumAt {
  ComplexMomentum at;
  std::vector<Complex> eigenvalues;
  /// Columns normalized; present only when requested.
  std::optional<CMatrix> eigenvectors;
};

/// Dense eigen-decomposition of a general complex matrix (d <= 16).
/// Throws NumericError when the iteration does not converge.
SpectrumAt eigen(const CMatrix& mat, bool want_vectors = false);

/// Eigenvalues only, with a closed-form path for d <= 2.
void eigenvalues_into(const CMatrix& mat, std::vector<Complex>& out);

/// log|u|^2 maximized over spec W(z) (walks) or 2 Im(omega) over spec H(z) (Hamiltonians).
/// z carries the imaginary part lambda/2.
double dual_rate_at(const LatticeModel& model, const ComplexMomentum& z);

/// Repeated dual_rate_at evaluations at a fixed imaginary part. Not thread-safe.
class DualRateSampler {
 public:
  /// lambda is the full exponent; the symbol is evaluated at p + i lambda/2.
  DualRateSampler(const LatticeModel& model, const RVector& lambda);
  double operator()(const double* p);
  double operator()(const RVector& p) { return (*this)(p.data()); }

 private:
  SymbolEvaluator ev_;
  bool walk_;
  std::vector<double> half_;
  CMatrix buf_;
  std::vector<Complex> eig_;
};

struct VelocitySample {
  RVector p;
  int branch = 0;
  /// Band phase: u = exp(-i omega) for walks, the eigenvalue for Hamiltonians.
  double omega = 0.0;
  RVector velocity;
  double weight = 0.0;
  /// |Im| of the quotient whose real part is the velocity (diagnostic).
  double imag_residue = 0.0;
};

inline constexpr double kDefaultGapTol = 1e-8;

/// Band phases, eigenvectors and group velocities at real momenta. Not thread-safe.
class BandEvaluator {
 public:
  explicit BandEvaluator(const LatticeModel& model, double gap_tol = kDefaultGapTol);

  /// Branches sorted by omega. Throws DegeneratePoint when two eigenvalues are closer than
  /// gap_tol.
  std::vector<VelocitySample> evaluate(const RVector& p);
  /// Same as evaluate but returns false (and leaves out untouched) at degenerate points.
  bool try_evaluate(const RVector& p, std::vector<VelocitySample>& out);

  /// Eigenvectors of the last successful evaluation, columns in branch order.
  const CMatrix& eigenvectors() const { return vectors_; }
  double last_gap() const { return gap_; }

 private:
  bool compute(const RVector& p, std::vector<VelocitySample>& out);

  const LatticeModel* model_;
  SymbolEvaluator ev_;
  double gap_tol_;
  double gap_ = 0.0;
  CMatrix sym_, vectors_;
  std::vector<CMatrix> deriv_;
};

std::vector<VelocitySample> group_velocity(const LatticeModel& model, const RVector& p,
                                           double gap_tol = kDefaultGapTol);

struct RegionOptions {
  double gap_tol = kDefaultGapTol;
  double max_degenerate_fraction = 0.2;
  /// Polish the extreme velocities along the coordinate and diagonal directions.
  bool refine_extremes = true;
};

struct PropagationRegion {
  std::vector<VelocitySample> samples;
  Polytope hull;
  double max_speed = 0.0;
  std::int64_t grid_points = 0;
  std::int64_t degenerate_points = 0;
  /// Samples appended by extreme refinement (weight 0), at the end of samples.
  std::int64_t refined_samples = 0;
};

/// Group velocities on the regular grid p_k = -pi + 2 pi k / grid_n. Each regular sample
/// carries weight 1/(regular points * d), the velocity density for an origin-localized state
/// with flat momentum distribution.
PropagationRegion propagation_region(const LatticeModel& model, int grid_n,
                                     const RegionOptions& opt = {});

/// Momentum of flat grid index idx on an n^s grid: p_k = -pi + 2 pi (i_k + shift) / n.
void grid_momentum(std::int64_t idx, int n, int s, double shift, double* p);

}  // namespace lattail

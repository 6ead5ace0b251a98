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

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "lattail/linalg.hpp"
#include "lattail/model.hpp"

namespace lattail {

/// Pure state with finite support.
struct InitialState {
  int dim_lattice = 1;
  int dim_cell = 1;
  std::vector<std::pair<Site, CVector>> amplitudes;
  bool normalized = false;

  /// delta_x (x) v, normalized.
  static InitialState localized(const Site& x, const CVector& v);

  double norm2() const;
  /// Scales to unit norm; throws ModelError for the zero state.
  void normalize();
};

/// Rectangular lattice box [lo_k, hi_k] (inclusive), last axis fastest in linear indices.
struct LatticeBox {
  std::vector<int> lo, hi;

  int dim() const { return static_cast<int>(lo.size()); }
  int extent(int k) const { return hi[k] - lo[k] + 1; }
  std::int64_t size() const;
  std::int64_t index(const Site& x) const;
  Site site(std::int64_t idx) const;
  bool contains(const Site& x) const;
};

struct EvolveOptions {
  double t_max = 0.0;
  /// Hamiltonian output spacing, used when times is empty.
  double dt = 1.0;
  /// Output times; for walks they are rounded to integers. Empty: every step (walk) or every dt.
  std::vector<double> times;
  int margin = 8;
  std::size_t memory_budget = std::size_t{2} << 30;
};

struct EvolutionRecord {
  DynamicsKind kind = DynamicsKind::Walk;
  std::vector<double> times;
  /// Per time, probabilities over the box (linear index order).
  std::vector<std::vector<double>> distributions;
  LatticeBox box;
  bool wraparound_safe = true;
  /// Largest mass found on the outermost box layer.
  double boundary_mass = 0.0;
  /// Probabilities below this are not trusted (round-off level of the method).
  double precision_floor = 1e-12;
  std::shared_ptr<const LatticeModel> model;
  InitialState initial;

  double total_probability(std::size_t i) const;
  /// Index of the stored time equal to t (within 1e-9); throws if absent.
  std::size_t time_index(double t) const;
};

/// Exact evolution: position-space convolution for walks, momentum-grid diagonalization of
/// H(p) for Hamiltonians in a box covering the Lieb-Robinson cone.
EvolutionRecord evolve(const LatticeModel& model, const InitialState& psi0, const EvolveOptions& opt);

/// Region in velocity units: {v : n.v >= c} or {v : |v| >= r}.
struct TailRegion {
  enum class Kind { HalfSpace, BallComplement };
  Kind kind = Kind::HalfSpace;
  RVector n;
  double c = 0.0;
  double r = 0.0;

  static TailRegion half_space(RVector n, double c);
  static TailRegion ball_complement(double r);
  /// "half n1,...,ns c" or "ball r".
  static TailRegion parse(const std::string& text, int s);
  std::string describe() const;
  /// Whether site x counts at time t > 0 (x/t in the region).
  bool counts(const Site& x, double t) const;
};

struct TailSeries {
  TailRegion region;
  std::vector<double> times;
  std::vector<double> probabilities;
  /// -(1/t) log p_t.
  std::vector<double> empirical_rates;
  std::vector<bool> below_precision;
  double precision_floor = 1e-12;
};

TailSeries tail_probability(const EvolutionRecord& rec, const TailRegion& region);

struct MomentSeries {
  std::vector<double> times;
  /// log tr(rho exp(lambda.Q(t))).
  std::vector<double> log_moment;
};

/// Walks: log-sum-exp over the stored distributions. Hamiltonians: norm of the state
/// continued to p + i lambda/2 on the box momentum grid, which avoids FFT round-off in the tails.
MomentSeries exp_moment(const EvolutionRecord& rec, const RVector& lambda);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rate = 0.0;
  int points = 0;
};

/// Least-squares fit of log p_t against t over [t_lo, t_hi], skipping entries below precision.
/// Throws InsufficientData with fewer than 5 usable points.
RateFit empirical_rate(const TailSeries& ts, double t_lo, double t_hi);

/// Weighted point cloud in velocity space.
struct VelocityDistribution {
  int dim = 1;
  std::vector<RVector> points;
  std::vector<double> weights;
};

/// Distribution of Q(t)/t at a stored time.
VelocityDistribution velocity_histogram(const EvolutionRecord& rec, double t);

/// Distribution of the asymptotic velocity V in state psi0 on a midpoint momentum grid, with
/// weights |<psi_j(p)|psi0^(p)>|^2 / N.
VelocityDistribution theoretical_velocity_distribution(const LatticeModel& model,
                                                       const InitialState& psi0, int grid_n,
                                                       double gap_tol = 1e-8,
                                                       double max_degenerate_fraction = 0.2);

struct KolmogorovDistance {
  std::vector<double> per_axis;
  double radial = 0.0;
  /// Largest per-axis distance; in two or more dimensions the radial one is included too.
  double max() const;
};

/// Sup distance of the CDFs of each coordinate and of |v|.
KolmogorovDistance kolmogorov_distance(const VelocityDistribution& a, const VelocityDistribution& b);

}  // namespace lattail

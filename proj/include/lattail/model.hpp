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

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "lattail/linalg.hpp"

namespace lattail {

class Polytope;

enum class DynamicsKind { Walk, Hamiltonian };

std::string to_string(DynamicsKind kind);

/// One term C_y of the symbol; `offset` is the physical displacement y.
struct Jump {
  Site offset;
  CMatrix coeff;
};

/// A point p + i*lambda of the complexified Brillouin zone. The real part is reduced into
/// [-pi, pi)^s on construction.
struct ComplexMomentum {
  RVector p;
  RVector lambda;

  ComplexMomentum() = default;
  ComplexMomentum(RVector real_part, RVector imag_part);
  static ComplexMomentum real(RVector real_part);

  int dim() const { return static_cast<int>(p.size()); }
};

struct SymbolValue {
  CMatrix matrix;
  ComplexMomentum at;
};

/// Result of the grid check run when a model is constructed.
struct ValidationReport {
  double unitarity_defect = 0.0;    // max_p |W W^* - 1|, walks only
  double hermiticity_defect = 0.0;  // max_y |H_{-y} - H_y^*|, Hamiltonians only
  long grid_points = 0;
};

struct ModelTolerances {
  double unitarity = 1e-10;
  double hermiticity = 1e-12;
};

/// Translation-invariant lattice dynamics with finitely many jumps.
///
/// The symbol is W(z) = sum_y C_y exp(-i z.y) (respectively H(z) for Hamiltonians), so a
/// coefficient stored at offset y moves amplitude by +y per step. Instances are immutable and
/// validated on construction; a model that is not unitary (walk) or not Hermitian
/// (Hamiltonian) on the validation grid is rejected with ModelError.
class LatticeModel {
 public:
  LatticeModel(std::string label, DynamicsKind kind, int dim_lattice, int dim_cell,
               std::vector<Jump> jumps, const ModelTolerances& tol = {});

  const std::string& label() const { return label_; }
  DynamicsKind kind() const { return kind_; }
  bool is_walk() const { return kind_ == DynamicsKind::Walk; }
  int dim_lattice() const { return dim_lattice_; }
  int dim_cell() const { return dim_cell_; }
  const std::vector<Jump>& jumps() const { return jumps_; }
  const ValidationReport& validation() const { return report_; }

  /// Largest |y_k| over all jumps and axes.
  int max_jump_length() const { return max_jump_; }
  int min_offset(int axis) const { return min_offset_[axis]; }
  int max_offset(int axis) const { return max_offset_[axis]; }

  /// sum_y ||C_y|| in operator norm.
  double coefficient_norm_sum() const;

  /// Same model with every coefficient multiplied by `factor` (Hamiltonians only).
  LatticeModel scaled(double factor, std::string label = {}) const;

 private:
  std::string label_;
  DynamicsKind kind_;
  int dim_lattice_;
  int dim_cell_;
  std::vector<Jump> jumps_;
  std::vector<int> min_offset_;
  std::vector<int> max_offset_;
  int max_jump_ = 0;
  ValidationReport report_;
};

/// Fast repeated symbol evaluation with reusable buffers. Not thread-safe; use one per thread.
///
/// exp(-i z.y) factorizes over axes, so callers sweeping a grid can precompute one phase row
/// per axis value and hand the rows to combine().
class SymbolEvaluator {
 public:
  explicit SymbolEvaluator(const LatticeModel& model);

  int row_length(int axis) const { return row_len_[axis]; }
  /// out[y - min_offset(axis)] = exp(-i z y) for y in [min_offset, max_offset].
  void phase_row(int axis, Complex z, Complex* out) const;
  /// out = sum_y C_y prod_k rows[k][y_k - min_offset(k)].
  void combine(const Complex* const* rows, CMatrix& out) const;

  /// out = symbol at p + i*q.
  void evaluate(const double* p, const double* q, CMatrix& out);
  /// out = d/dp_axis of the symbol at real p.
  void derivative(const double* p, int axis, CMatrix& out);

  const LatticeModel& model() const { return *model_; }

 private:
  const LatticeModel* model_;
  int s_;
  int d_;
  std::vector<int> row_len_;
  std::vector<int> flat_index_;  // per jump, per axis: index into its row
  std::vector<Complex> coeffs_;  // per jump, d*d column-major
  std::vector<std::vector<Complex>> rows_;
  std::vector<const Complex*> row_ptr_;
};

SymbolValue evaluate_symbol(const LatticeModel& model, const ComplexMomentum& z);

/// d/dp_axis of the symbol at real momentum p: sum_y (-i y_axis) C_y exp(-i p.y).
CMatrix symbol_derivative(const LatticeModel& model, const RVector& p, int axis);

/// Parses a model document (JSON text). Throws ModelError on schema or invariant violations.
LatticeModel load_model(std::string_view document, const ModelTolerances& tol = {});
LatticeModel load_model_file(const std::filesystem::path& path, const ModelTolerances& tol = {});

/// Serializes to the model-file schema; load_model(model_to_document(m)) reproduces m.
std::string model_to_document(const LatticeModel& model);
void save_model_file(const LatticeModel& model, const std::filesystem::path& path);

/// Convex hull of the jump set F = {y : C_y != 0}.
Polytope jump_hull(const LatticeModel& model);

/// conv(F u {0}), the set whose gauge enters the Hamiltonian propagation bound.
Polytope augmented_jump_hull(const LatticeModel& model);

}  // namespace lattail

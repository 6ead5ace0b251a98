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

#include "lattail/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "lattail/error.hpp"
#include "lattail/polytope.hpp"

namespace lattail {
namespace {

constexpr int kMaxCellDim = 16;
constexpr long kValidationCap = 17L * 17L * 17L;

std::string site_string(const Site& y) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < y.size(); ++i) os << (i ? "," : "") << y[i];
  os << ']';
  return os.str();
}

Site negate(const Site& y) {
  Site r(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) r[i] = -y[i];
  return r;
}

double operator_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

}  // namespace

std::string to_string(DynamicsKind kind) {
  return kind == DynamicsKind::Walk ? "walk" : "hamiltonian";
}

ComplexMomentum::ComplexMomentum(RVector real_part, RVector imag_part)
    : p(std::move(real_part)), lambda(std::move(imag_part)) {
  if (p.size() != lambda.size()) throw ModelError("complex momentum: real/imag size mismatch");
  for (Eigen::Index k = 0; k < p.size(); ++k) p[k] = wrap_angle(p[k]);
}

ComplexMomentum ComplexMomentum::real(RVector real_part) {
  RVector zero = RVector::Zero(real_part.size());
  return ComplexMomentum(std::move(real_part), std::move(zero));
}

LatticeModel::LatticeModel(std::string label, DynamicsKind kind, int dim_lattice, int dim_cell,
                           std::vector<Jump> jumps, const ModelTolerances& tol)
    : label_(std::move(label)), kind_(kind), dim_lattice_(dim_lattice), dim_cell_(dim_cell) {
  if (dim_lattice_ < 1) throw ModelError("dim_lattice must be positive");
  if (dim_cell_ < 1) throw ModelError("dim_cell must be positive");
  if (dim_cell_ > kMaxCellDim) throw ModelError("dim_cell exceeds 16");
  if (jumps.empty()) throw ModelError("model has no jumps");

  std::set<Site> seen;
  for (auto& j : jumps) {
    if (static_cast<int>(j.offset.size()) != dim_lattice_)
      throw ModelError("dimension mismatch: offset " + site_string(j.offset) + " has length " +
                       std::to_string(j.offset.size()) + ", expected " +
                       std::to_string(dim_lattice_));
    if (j.coeff.rows() != dim_cell_ || j.coeff.cols() != dim_cell_)
      throw ModelError("dimension mismatch: matrix at offset " + site_string(j.offset) +
                       " is not " + std::to_string(dim_cell_) + "x" + std::to_string(dim_cell_));
    if (!j.coeff.allFinite()) throw ModelError("non-finite coefficient at " + site_string(j.offset));
    if (!seen.insert(j.offset).second) throw ModelError("duplicate offset " + site_string(j.offset));
    if (!j.coeff.isZero(0.0)) jumps_.push_back(std::move(j));
  }
  if (jumps_.empty()) throw ModelError("model has only zero coefficients");
  std::sort(jumps_.begin(), jumps_.end(),
            [](const Jump& a, const Jump& b) { return a.offset < b.offset; });

  min_offset_.assign(dim_lattice_, 0);
  max_offset_.assign(dim_lattice_, 0);
  for (int k = 0; k < dim_lattice_; ++k) {
    min_offset_[k] = max_offset_[k] = jumps_.front().offset[k];
    for (const auto& j : jumps_) {
      min_offset_[k] = std::min(min_offset_[k], j.offset[k]);
      max_offset_[k] = std::max(max_offset_[k], j.offset[k]);
      max_jump_ = std::max(max_jump_, std::abs(j.offset[k]));
    }
  }

  if (kind_ == DynamicsKind::Hamiltonian) {
    double defect = 0.0;
    for (const auto& j : jumps_) {
      Site partner = negate(j.offset);
      auto it = std::find_if(jumps_.begin(), jumps_.end(),
                             [&](const Jump& o) { return o.offset == partner; });
      CMatrix other = it == jumps_.end() ? CMatrix::Zero(dim_cell_, dim_cell_) : it->coeff;
      defect = std::max(defect, (other - j.coeff.adjoint()).cwiseAbs().maxCoeff());
    }
    report_.hermiticity_defect = defect;
    if (defect > tol.hermiticity)
      throw ModelError("hermiticity defect " + std::to_string(defect) + " exceeds tolerance");
    return;
  }

  // Walk: unitarity on a shifted regular grid, at most 17^3 points.
  int n = 17;
  if (dim_lattice_ > 3)
    n = std::max(2, static_cast<int>(std::floor(std::pow(double(kValidationCap), 1.0 / dim_lattice_))));
  long total = 1;
  for (int k = 0; k < dim_lattice_; ++k) total *= n;
  SymbolEvaluator ev(*this);
  CMatrix w(dim_cell_, dim_cell_);
  std::vector<double> p(dim_lattice_), q(dim_lattice_, 0.0);
  const CMatrix id = CMatrix::Identity(dim_cell_, dim_cell_);
  double defect = 0.0;
  for (long idx = 0; idx < total; ++idx) {
    long r = idx;
    for (int k = 0; k < dim_lattice_; ++k) {
      p[k] = -kPi + kTwoPi * (static_cast<double>(r % n) + 0.3819660112501051) / n;
      r /= n;
    }
    ev.evaluate(p.data(), q.data(), w);
    defect = std::max(defect, (w * w.adjoint() - id).cwiseAbs().maxCoeff());
  }
  report_.unitarity_defect = defect;
  report_.grid_points = total;
  if (!(defect <= tol.unitarity))
    throw ModelError("unitarity defect " + std::to_string(defect) + " exceeds tolerance");
}

double LatticeModel::coefficient_norm_sum() const {
  double c = 0.0;
  for (const auto& j : jumps_) c += operator_norm(j.coeff);
  return c;
}

LatticeModel LatticeModel::scaled(double factor, std::string label) const {
  if (kind_ != DynamicsKind::Hamiltonian) throw ModelError("only Hamiltonians can be scaled");
  std::vector<Jump> js = jumps_;
  for (auto& j : js) j.coeff *= factor;
  return LatticeModel(label.empty() ? label_ : std::move(label), kind_, dim_lattice_, dim_cell_,
                      std::move(js));
}

Polytope jump_hull(const LatticeModel& model) {
  std::vector<RVector> pts;
  for (const auto& j : model.jumps()) {
    RVector y(model.dim_lattice());
    for (int k = 0; k < model.dim_lattice(); ++k) y[k] = j.offset[k];
    pts.push_back(y);
  }
  return Polytope::hull(pts, model.dim_lattice());
}

Polytope augmented_jump_hull(const LatticeModel& model) {
  std::vector<RVector> pts = {RVector::Zero(model.dim_lattice())};
  for (const auto& j : model.jumps()) {
    RVector y(model.dim_lattice());
    for (int k = 0; k < model.dim_lattice(); ++k) y[k] = j.offset[k];
    pts.push_back(y);
  }
  return Polytope::hull(pts, model.dim_lattice());
}

// ---------------------------------------------------------------------------------------------

SymbolEvaluator::SymbolEvaluator(const LatticeModel& model)
    : model_(&model), s_(model.dim_lattice()), d_(model.dim_cell()) {
  row_len_.resize(s_);
  rows_.resize(s_);
  row_ptr_.resize(s_);
  for (int k = 0; k < s_; ++k) {
    row_len_[k] = model.max_offset(k) - model.min_offset(k) + 1;
    rows_[k].resize(row_len_[k]);
    row_ptr_[k] = rows_[k].data();
  }
  const auto& js = model.jumps();
  flat_index_.resize(js.size() * s_);
  coeffs_.resize(js.size() * d_ * d_);
  for (std::size_t j = 0; j < js.size(); ++j) {
    for (int k = 0; k < s_; ++k) flat_index_[j * s_ + k] = js[j].offset[k] - model.min_offset(k);
    std::copy(js[j].coeff.data(), js[j].coeff.data() + d_ * d_, coeffs_.begin() + j * d_ * d_);
  }
}

void SymbolEvaluator::phase_row(int axis, Complex z, Complex* out) const {
  const int lo = model_->min_offset(axis);
  const Complex mi(0.0, -1.0);
  for (int i = 0; i < row_len_[axis]; ++i) out[i] = std::exp(mi * z * static_cast<double>(lo + i));
}

void SymbolEvaluator::combine(const Complex* const* rows, CMatrix& out) const {
  out.setZero(d_, d_);
  Complex* o = out.data();
  const std::size_t nj = flat_index_.size() / s_;
  const int dd = d_ * d_;
  for (std::size_t j = 0; j < nj; ++j) {
    Complex f = rows[0][flat_index_[j * s_]];
    for (int k = 1; k < s_; ++k) f *= rows[k][flat_index_[j * s_ + k]];
    const Complex* c = coeffs_.data() + j * dd;
    for (int e = 0; e < dd; ++e) o[e] += f * c[e];
  }
}

void SymbolEvaluator::evaluate(const double* p, const double* q, CMatrix& out) {
  for (int k = 0; k < s_; ++k) phase_row(k, Complex(p[k], q ? q[k] : 0.0), rows_[k].data());
  combine(row_ptr_.data(), out);
}

void SymbolEvaluator::derivative(const double* p, int axis, CMatrix& out) {
  for (int k = 0; k < s_; ++k) phase_row(k, Complex(p[k], 0.0), rows_[k].data());
  out.setZero(d_, d_);
  Complex* o = out.data();
  const std::size_t nj = flat_index_.size() / s_;
  const int dd = d_ * d_;
  const int lo = model_->min_offset(axis);
  for (std::size_t j = 0; j < nj; ++j) {
    Complex f = rows_[0][flat_index_[j * s_]];
    for (int k = 1; k < s_; ++k) f *= rows_[k][flat_index_[j * s_ + k]];
    f *= Complex(0.0, -static_cast<double>(lo + flat_index_[j * s_ + axis]));
    const Complex* c = coeffs_.data() + j * dd;
    for (int e = 0; e < dd; ++e) o[e] += f * c[e];
  }
}

SymbolValue evaluate_symbol(const LatticeModel& model, const ComplexMomentum& z) {
  if (z.dim() != model.dim_lattice()) throw ModelError("momentum dimension mismatch");
  SymbolEvaluator ev(model);
  SymbolValue v;
  v.at = z;
  ev.evaluate(z.p.data(), z.lambda.data(), v.matrix);
  return v;
}

CMatrix symbol_derivative(const LatticeModel& model, const RVector& p, int axis) {
  if (p.size() != model.dim_lattice()) throw ModelError("momentum dimension mismatch");
  SymbolEvaluator ev(model);
  CMatrix out;
  ev.derivative(p.data(), axis, out);
  return out;
}

// ---------------------------------------------------------------------------------------------

namespace {

using nlohmann::json;

const json& require(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ModelError(std::string("schema violation: missing field '") + key + "'");
  return *it;
}

int require_int(const json& obj, const char* key) {
  const json& v = require(obj, key);
  if (!v.is_number_integer()) throw ModelError(std::string("schema violation: '") + key + "' must be an integer");
  return v.get<int>();
}

Complex parse_entry(const json& e) {
  if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
    throw ModelError("schema violation: matrix entries must be [re, im] pairs");
  return {e[0].get<double>(), e[1].get<double>()};
}

}  // namespace

LatticeModel load_model(std::string_view document, const ModelTolerances& tol) {
  json doc;
  try {
    doc = json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    throw ModelError(std::string("schema violation: ") + e.what());
  }
  if (!doc.is_object()) throw ModelError("schema violation: model document must be an object");
  static const std::set<std::string> known = {"label", "kind", "dim_lattice", "dim_cell", "jumps"};
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (!known.count(it.key())) throw ModelError("schema violation: unknown field '" + it.key() + "'");

  std::string label;
  if (auto it = doc.find("label"); it != doc.end()) {
    if (!it->is_string()) throw ModelError("schema violation: 'label' must be a string");
    label = it->get<std::string>();
  }
  const json& kind_v = require(doc, "kind");
  if (!kind_v.is_string()) throw ModelError("schema violation: 'kind' must be a string");
  DynamicsKind kind;
  if (kind_v == "walk")
    kind = DynamicsKind::Walk;
  else if (kind_v == "hamiltonian")
    kind = DynamicsKind::Hamiltonian;
  else
    throw ModelError("schema violation: 'kind' must be \"walk\" or \"hamiltonian\"");
  const int s = require_int(doc, "dim_lattice");
  const int d = require_int(doc, "dim_cell");
  if (s < 1 || d < 1) throw ModelError("schema violation: dimensions must be positive");
  if (d > kMaxCellDim) throw ModelError("dim_cell exceeds 16");

  const json& js = require(doc, "jumps");
  if (!js.is_array()) throw ModelError("schema violation: 'jumps' must be a list");
  std::vector<Jump> jumps;
  for (const auto& j : js) {
    if (!j.is_object()) throw ModelError("schema violation: jump must be an object");
    for (auto it = j.begin(); it != j.end(); ++it)
      if (it.key() != "offset" && it.key() != "matrix")
        throw ModelError("schema violation: unknown jump field '" + it.key() + "'");
    const json& off = require(j, "offset");
    const json& mat = require(j, "matrix");
    if (!off.is_array()) throw ModelError("schema violation: 'offset' must be a list");
    Jump jump;
    for (const auto& o : off) {
      if (!o.is_number_integer()) throw ModelError("schema violation: offsets must be integers");
      jump.offset.push_back(o.get<int>());
    }
    if (static_cast<int>(jump.offset.size()) != s)
      throw ModelError("dimension mismatch: offset " + site_string(jump.offset) + " has length " +
                       std::to_string(jump.offset.size()) + ", expected " + std::to_string(s));
    if (!mat.is_array() || static_cast<int>(mat.size()) != d)
      throw ModelError("dimension mismatch: matrix at " + site_string(jump.offset) + " must have " +
                       std::to_string(d) + " rows");
    jump.coeff.resize(d, d);
    for (int r = 0; r < d; ++r) {
      if (!mat[r].is_array() || static_cast<int>(mat[r].size()) != d)
        throw ModelError("dimension mismatch: matrix row at " + site_string(jump.offset) +
                         " must have " + std::to_string(d) + " entries");
      for (int c = 0; c < d; ++c) jump.coeff(r, c) = parse_entry(mat[r][c]);
    }
    jumps.push_back(std::move(jump));
  }
  return LatticeModel(std::move(label), kind, s, d, std::move(jumps), tol);
}

LatticeModel load_model_file(const std::filesystem::path& path, const ModelTolerances& tol) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return load_model(ss.str(), tol);
}

std::string model_to_document(const LatticeModel& model) {
  json doc;
  doc["label"] = model.label();
  doc["kind"] = to_string(model.kind());
  doc["dim_lattice"] = model.dim_lattice();
  doc["dim_cell"] = model.dim_cell();
  json js = json::array();
  for (const auto& j : model.jumps()) {
    json mat = json::array();
    for (int r = 0; r < model.dim_cell(); ++r) {
      json row = json::array();
      for (int c = 0; c < model.dim_cell(); ++c)
        row.push_back(json::array({j.coeff(r, c).real(), j.coeff(r, c).imag()}));
      mat.push_back(row);
    }
    js.push_back({{"offset", j.offset}, {"matrix", mat}});
  }
  doc["jumps"] = js;
  return doc.dump(2) + "\n";
}

void save_model_file(const LatticeModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write model file " + path.string());
  out << model_to_document(model);
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace lattail

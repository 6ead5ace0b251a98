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

#include "lattail/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "lattail/error.hpp"
#include "lattail/optimize.hpp"
#include "lattail/parallel.hpp"

namespace lattail {
namespace {

std::string momentum_string(const RVector& p) {
  std::ostringstream os;
  os.precision(17);
  os << "p=(";
  for (Eigen::Index k = 0; k < p.size(); ++k) os << (k ? "," : "") << p[k];
  os << ')';
  return os.str();
}

void quadratic_roots(const CMatrix& m, Complex& u0, Complex& u1) {
  const Complex a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
  const Complex half_tr = 0.5 * (a + d);
  const Complex root = std::sqrt(0.25 * (a - d) * (a - d) + b * c);
  u0 = half_tr + root;
  u1 = half_tr - root;
  // Recover the smaller root from the determinant when cancellation bites.
  const Complex det = a * d - b * c;
  if (std::abs(u0) < std::abs(u1)) std::swap(u0, u1);
  if (std::abs(u0) > 0) u1 = det / u0;
}

}  // namespace

void eigenvalues_into(const CMatrix& mat, std::vector<Complex>& out) {
  const Eigen::Index d = mat.rows();
  out.resize(d);
  if (d == 1) {
    out[0] = mat(0, 0);
    return;
  }
  if (d == 2) {
    quadratic_roots(mat, out[0], out[1]);
    return;
  }
  Eigen::ComplexEigenSolver<CMatrix> es(mat, false);
  if (es.info() != Eigen::Success) throw NumericError("eigensolver did not converge");
  for (Eigen::Index i = 0; i < d; ++i) out[i] = es.eigenvalues()[i];
}

SpectrumAt eigen(const CMatrix& mat, bool want_vectors) {
  if (mat.rows() != mat.cols()) throw NumericError("eigen: matrix is not square");
  if (mat.rows() > 16) throw NumericError("eigen: dimension exceeds 16");
  SpectrumAt out;
  if (!want_vectors) {
    eigenvalues_into(mat, out.eigenvalues);
    return out;
  }
  Eigen::ComplexEigenSolver<CMatrix> es(mat, true);
  if (es.info() != Eigen::Success) throw NumericError("eigensolver did not converge");
  out.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + mat.rows());
  CMatrix v = es.eigenvectors();
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    double n = v.col(j).norm();
    if (n > 0) v.col(j) /= n;
  }
  out.eigenvectors = std::move(v);
  return out;
}

double dual_rate_at(const LatticeModel& model, const ComplexMomentum& z) {
  SymbolValue w = evaluate_symbol(model, z);
  std::vector<Complex> eig;
  eigenvalues_into(w.matrix, eig);
  double best = -std::numeric_limits<double>::infinity();
  for (const Complex& u : eig)
    best = std::max(best, model.is_walk() ? 2.0 * std::log(std::abs(u)) : 2.0 * u.imag());
  return best;
}

DualRateSampler::DualRateSampler(const LatticeModel& model, const RVector& lambda)
    : ev_(model), walk_(model.is_walk()), half_(lambda.size()) {
  if (lambda.size() != model.dim_lattice()) throw ModelError("lambda dimension mismatch");
  for (Eigen::Index k = 0; k < lambda.size(); ++k) half_[k] = 0.5 * lambda[k];
}

double DualRateSampler::operator()(const double* p) {
  ev_.evaluate(p, half_.data(), buf_);
  eigenvalues_into(buf_, eig_);
  double best = -std::numeric_limits<double>::infinity();
  if (walk_) {
    for (const Complex& u : eig_) best = std::max(best, std::norm(u));
    return std::log(best);
  }
  for (const Complex& w : eig_) best = std::max(best, 2.0 * w.imag());
  return best;
}

// ---------------------------------------------------------------------------------------------

BandEvaluator::BandEvaluator(const LatticeModel& model, double gap_tol)
    : model_(&model), ev_(model), gap_tol_(gap_tol), deriv_(model.dim_lattice()) {}

bool BandEvaluator::compute(const RVector& p, std::vector<VelocitySample>& out) {
  const int d = model_->dim_cell(), s = model_->dim_lattice();
  ev_.evaluate(p.data(), nullptr, sym_);
  std::vector<Complex> vals(d);
  CMatrix vecs;
  std::vector<double> omega(d);
  if (model_->is_walk()) {
    Eigen::ComplexEigenSolver<CMatrix> es(sym_, true);
    if (es.info() != Eigen::Success) throw NumericError("eigensolver did not converge");
    vecs = es.eigenvectors();
    for (int j = 0; j < d; ++j) {
      vals[j] = es.eigenvalues()[j];
      omega[j] = -std::arg(vals[j]);
    }
  } else {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (sym_ + sym_.adjoint()));
    if (es.info() != Eigen::Success) throw NumericError("eigensolver did not converge");
    vecs = es.eigenvectors();
    for (int j = 0; j < d; ++j) omega[j] = es.eigenvalues()[j], vals[j] = omega[j];
  }
  gap_ = std::numeric_limits<double>::infinity();
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) gap_ = std::min(gap_, std::abs(vals[i] - vals[j]));
  if (gap_ < gap_tol_) return false;

  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return omega[a] < omega[b]; });
  for (int a = 0; a < s; ++a) ev_.derivative(p.data(), a, deriv_[a]);

  out.resize(d);
  vectors_.resize(d, d);
  for (int j = 0; j < d; ++j) {
    const int c = order[j];
    CVector psi = vecs.col(c);
    psi /= psi.norm();
    vectors_.col(j) = psi;
    VelocitySample& v = out[j];
    v.p = p;
    v.branch = j;
    v.omega = omega[c];
    v.velocity.resize(s);
    v.weight = 0.0;
    v.imag_residue = 0.0;
    for (int a = 0; a < s; ++a) {
      Complex q = psi.dot(deriv_[a] * psi);
      if (model_->is_walk()) q = Complex(0.0, 1.0) * q / vals[c];
      v.velocity[a] = q.real();
      v.imag_residue = std::max(v.imag_residue, std::abs(q.imag()));
    }
  }
  return true;
}

std::vector<VelocitySample> BandEvaluator::evaluate(const RVector& p) {
  std::vector<VelocitySample> out;
  if (!compute(p, out)) throw DegeneratePoint(momentum_string(p), gap_);
  return out;
}

bool BandEvaluator::try_evaluate(const RVector& p, std::vector<VelocitySample>& out) {
  return compute(p, out);
}

std::vector<VelocitySample> group_velocity(const LatticeModel& model, const RVector& p,
                                           double gap_tol) {
  if (p.size() != model.dim_lattice()) throw ModelError("momentum dimension mismatch");
  BandEvaluator be(model, gap_tol);
  return be.evaluate(p);
}

void grid_momentum(std::int64_t idx, int n, int s, double shift, double* p) {
  for (int k = s - 1; k >= 0; --k) {
    p[k] = -kPi + kTwoPi * (static_cast<double>(idx % n) + shift) / n;
    idx /= n;
  }
}

PropagationRegion propagation_region(const LatticeModel& model, int grid_n,
                                     const RegionOptions& opt) {
  if (grid_n < 8) throw NumericError("propagation_region: grid_n must be at least 8");
  const int s = model.dim_lattice(), d = model.dim_cell();
  std::int64_t total = 1;
  for (int k = 0; k < s; ++k) {
    total *= grid_n;
    if (total > (std::int64_t{1} << 26)) throw NumericError("propagation_region: grid too large");
  }
  std::vector<std::vector<VelocitySample>> per(total);
  std::vector<char> ok(total, 0);
  parallel_blocks(total, [&](std::int64_t lo, std::int64_t hi) {
    BandEvaluator be(model, opt.gap_tol);
    RVector p(s);
    for (std::int64_t i = lo; i < hi; ++i) {
      grid_momentum(i, grid_n, s, 0.0, p.data());
      ok[i] = be.try_evaluate(p, per[i]) ? 1 : 0;
    }
  });

  PropagationRegion region;
  region.grid_points = total;
  std::int64_t regular = 0;
  for (char c : ok) regular += c;
  region.degenerate_points = total - regular;
  if (static_cast<double>(region.degenerate_points) > opt.max_degenerate_fraction * total)
    throw NumericError("model too singular for grid sampling");
  region.samples.reserve(regular * d);
  const double w = 1.0 / (static_cast<double>(regular) * d);
  for (std::int64_t i = 0; i < total; ++i) {
    if (!ok[i]) continue;
    for (auto& v : per[i]) {
      v.weight = w;
      region.samples.push_back(std::move(v));
    }
  }
  per.clear();

  if (opt.refine_extremes && !region.samples.empty()) {
    std::vector<RVector> dirs;
    for (int k = 0; k < s; ++k)
      for (double sg : {1.0, -1.0}) {
        RVector e = RVector::Zero(s);
        e[k] = sg;
        dirs.push_back(e);
      }
    if (s >= 2 && s <= 4) {
      for (int mask = 0; mask < (1 << s); ++mask) {
        RVector e(s);
        for (int k = 0; k < s; ++k) e[k] = (mask >> k & 1) ? -1.0 : 1.0;
        dirs.push_back(e / std::sqrt(double(s)));
      }
    }
    std::vector<std::vector<VelocitySample>> found(dirs.size());
    parallel_for(static_cast<std::int64_t>(dirs.size()), [&](std::int64_t di) {
      const RVector& n = dirs[di];
      std::size_t best = 0;
      double bv = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < region.samples.size(); ++i) {
        double v = n.dot(region.samples[i].velocity);
        if (v > bv) bv = v, best = i;
      }
      BandEvaluator be(model, opt.gap_tol);
      std::vector<VelocitySample> tmp;
      auto f = [&](const RVector& p) {
        if (!be.try_evaluate(p, tmp)) return -1e300;
        double m = -std::numeric_limits<double>::infinity();
        for (const auto& v : tmp) m = std::max(m, n.dot(v.velocity));
        return m;
      };
      NelderMeadOptions nm;
      nm.initial_step = 0.5 * kTwoPi / grid_n;
      nm.max_iter = 400;
      NelderMeadResult r = nelder_mead_max(f, region.samples[best].p, nm);
      if (r.value > bv + 1e-15) {
        RVector p = r.x;
        for (Eigen::Index k = 0; k < p.size(); ++k) p[k] = wrap_angle(p[k]);
        if (be.try_evaluate(p, tmp)) {
          int bj = 0;
          for (int j = 1; j < d; ++j)
            if (n.dot(tmp[j].velocity) > n.dot(tmp[bj].velocity)) bj = j;
          tmp[bj].weight = 0.0;
          found[di].push_back(tmp[bj]);
        }
      }
    });
    for (auto& f : found)
      for (auto& v : f) {
        region.samples.push_back(std::move(v));
        ++region.refined_samples;
      }
  }

  std::vector<RVector> pts;
  pts.reserve(region.samples.size());
  for (const auto& v : region.samples) {
    pts.push_back(v.velocity);
    region.max_speed = std::max(region.max_speed, v.velocity.norm());
  }
  region.hull = Polytope::hull(pts, s);
  return region;
}

}  // namespace lattail

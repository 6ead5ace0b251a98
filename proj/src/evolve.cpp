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

#include "lattail/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include <fftw3.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "lattail/error.hpp"
#include "lattail/parallel.hpp"
#include "lattail/spectra.hpp"

namespace lattail {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Smallest 2^a 3^b 5^c 7^d >= n.
int fft_friendly(int n) {
  for (int m = std::max(n, 1);; ++m) {
    int r = m;
    for (int f : {2, 3, 5, 7})
      while (r % f == 0) r /= f;
    if (r == 1) return m;
  }
}

void support_bounds(const InitialState& psi, std::vector<int>& lo, std::vector<int>& hi) {
  const int s = psi.dim_lattice;
  lo.assign(s, std::numeric_limits<int>::max());
  hi.assign(s, std::numeric_limits<int>::min());
  for (const auto& [x, v] : psi.amplitudes)
    for (int k = 0; k < s; ++k) lo[k] = std::min(lo[k], x[k]), hi[k] = std::max(hi[k], x[k]);
}

void check_state(const LatticeModel& model, const InitialState& psi) {
  if (psi.amplitudes.empty()) throw ModelError("initial state has empty support");
  if (psi.dim_lattice != model.dim_lattice() || psi.dim_cell != model.dim_cell())
    throw ModelError("initial state dimensions do not match the model");
  for (const auto& [x, v] : psi.amplitudes)
    if (static_cast<int>(x.size()) != psi.dim_lattice || v.size() != psi.dim_cell)
      throw ModelError("initial state entry has wrong dimension");
}

double boundary_layer_mass(const LatticeBox& box, const std::vector<double>& dist) {
  double m = 0.0;
  const int s = box.dim();
  std::vector<int> c(s);
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(dist.size()); ++i) {
    if (dist[i] == 0.0) continue;
    std::int64_t r = i;
    bool edge = false;
    for (int k = s - 1; k >= 0; --k) {
      int ck = static_cast<int>(r % box.extent(k));
      r /= box.extent(k);
      edge = edge || ck == 0 || ck == box.extent(k) - 1;
    }
    if (edge) m += dist[i];
  }
  return m;
}

std::vector<double> output_times(const EvolveOptions& opt, bool walk) {
  std::vector<double> ts;
  if (!opt.times.empty()) {
    for (double t : opt.times) {
      if (t < 0 || t > opt.t_max + 1e-9) throw NumericError("output time outside [0, t_max]");
      ts.push_back(walk ? std::round(t) : t);
    }
  } else if (walk) {
    for (int t = 0; t <= static_cast<int>(std::floor(opt.t_max + 1e-9)); ++t) ts.push_back(t);
  } else {
    if (!(opt.dt > 0)) throw NumericError("dt must be positive");
    const int n = static_cast<int>(std::floor(opt.t_max / opt.dt + 1e-9));
    for (int k = 0; k <= n; ++k) ts.push_back(k * opt.dt);
  }
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  return ts;
}

EvolutionRecord evolve_walk(const LatticeModel& model, const InitialState& psi0, const EvolveOptions& opt) {
  const int s = model.dim_lattice(), d = model.dim_cell();
  const std::vector<double> out_times = output_times(opt, true);
  const int T = static_cast<int>(out_times.back());
  const int margin = std::max(opt.margin, model.max_jump_length());
  std::vector<int> slo, shi;
  support_bounds(psi0, slo, shi);

  EvolutionRecord rec;
  rec.kind = DynamicsKind::Walk;
  rec.precision_floor = 1e-280;
  rec.box.lo.resize(s);
  rec.box.hi.resize(s);
  std::vector<int> grow_lo(s), grow_hi(s);
  for (int k = 0; k < s; ++k) {
    grow_lo[k] = std::min(0, model.min_offset(k));
    grow_hi[k] = std::max(0, model.max_offset(k));
    rec.box.lo[k] = slo[k] + T * grow_lo[k] - margin;
    rec.box.hi[k] = shi[k] + T * grow_hi[k] + margin;
  }
  const std::int64_t N = rec.box.size();
  const std::size_t bytes = static_cast<std::size_t>(N) * (2 * d * sizeof(Complex) + out_times.size() * sizeof(double));
  if (bytes > opt.memory_budget) throw BoxTooLarge(bytes, opt.memory_budget);

  std::vector<std::int64_t> stride(s, 1);
  for (int k = s - 2; k >= 0; --k) stride[k] = stride[k + 1] * rec.box.extent(k + 1);
  const auto& jumps = model.jumps();
  std::vector<std::int64_t> shift(jumps.size(), 0);
  for (std::size_t j = 0; j < jumps.size(); ++j)
    for (int k = 0; k < s; ++k) shift[j] += jumps[j].offset[k] * stride[k];

  std::vector<Complex> cur(static_cast<std::size_t>(N) * d), next(static_cast<std::size_t>(N) * d);
  for (const auto& [x, v] : psi0.amplitudes) {
    std::int64_t i = rec.box.index(x);
    for (int c = 0; c < d; ++c) cur[i * d + c] += v[c];
  }
  auto store = [&](double t) {
    std::vector<double> dist(N);
    for (std::int64_t i = 0; i < N; ++i) {
      double m = 0.0;
      for (int c = 0; c < d; ++c) m += std::norm(cur[i * d + c]);
      dist[i] = m;
    }
    rec.boundary_mass = std::max(rec.boundary_mass, boundary_layer_mass(rec.box, dist));
    rec.times.push_back(t);
    rec.distributions.push_back(std::move(dist));
  };

  std::size_t next_out = 0;
  if (out_times[0] == 0) store(0), ++next_out;
  std::vector<int> alo(s), ext(s);
  for (int t = 0; t < T; ++t) {
    std::int64_t count = 1;
    for (int k = 0; k < s; ++k) {
      alo[k] = slo[k] + (t + 1) * grow_lo[k];
      ext[k] = shi[k] + (t + 1) * grow_hi[k] - alo[k] + 1;
      count *= ext[k];
    }
    parallel_blocks(count, [&](std::int64_t lo, std::int64_t hi) {
      std::vector<Complex> acc(d);
      for (std::int64_t a = lo; a < hi; ++a) {
        std::int64_t r = a, idx = 0;
        for (int k = s - 1; k >= 0; --k) {
          idx += (alo[k] + r % ext[k] - rec.box.lo[k]) * stride[k];
          r /= ext[k];
        }
        std::fill(acc.begin(), acc.end(), Complex(0.0));
        for (std::size_t j = 0; j < jumps.size(); ++j) {
          const Complex* src = &cur[(idx - shift[j]) * d];
          const CMatrix& C = jumps[j].coeff;
          for (int c = 0; c < d; ++c)
            for (int e = 0; e < d; ++e) acc[c] += C(c, e) * src[e];
        }
        std::copy(acc.begin(), acc.end(), &next[idx * d]);
      }
    });
    cur.swap(next);
    if (next_out < out_times.size() && out_times[next_out] == t + 1) store(t + 1), ++next_out;
  }
  rec.wraparound_safe = rec.boundary_mass < 1e-14;
  return rec;
}

struct FftwBuffer {
  fftw_complex* data = nullptr;
  explicit FftwBuffer(std::size_t n) : data(fftw_alloc_complex(n)) {
    if (!data) throw BoxTooLarge(n * sizeof(fftw_complex), 0);
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  Complex* c() { return reinterpret_cast<Complex*>(data); }
};

std::vector<std::vector<Complex>> phase_rows(const SymbolEvaluator& ev, const LatticeBox& box, double lambda_half_k,
                                             const RVector* lambda) {
  (void)lambda_half_k;
  const int s = box.dim();
  std::vector<std::vector<Complex>> rows(s);
  for (int k = 0; k < s; ++k) {
    const int n = box.extent(k), len = ev.row_length(k);
    rows[k].resize(static_cast<std::size_t>(n) * len);
    for (int m = 0; m < n; ++m)
      ev.phase_row(k, Complex(kTwoPi * m / n, lambda ? 0.5 * (*lambda)[k] : 0.0), &rows[k][m * len]);
  }
  return rows;
}

EvolutionRecord evolve_hamiltonian(const LatticeModel& model, const InitialState& psi0,
                                   const EvolveOptions& opt) {
  const int s = model.dim_lattice(), d = model.dim_cell();
  const std::vector<double> out_times = output_times(opt, false);
  const double reach = std::exp(1.0) * model.coefficient_norm_sum() * opt.t_max;
  std::vector<int> slo, shi;
  support_bounds(psi0, slo, shi);
  EvolutionRecord rec;
  rec.kind = DynamicsKind::Hamiltonian;
  rec.precision_floor = 1e-12;
  rec.box.lo.resize(s);
  rec.box.hi.resize(s);
  for (int k = 0; k < s; ++k) {
    rec.box.lo[k] = slo[k] - static_cast<int>(std::ceil(reach * std::max(0, -model.min_offset(k)))) - opt.margin;
    int hi = shi[k] + static_cast<int>(std::ceil(reach * std::max(0, model.max_offset(k)))) + opt.margin;
    rec.box.hi[k] = rec.box.lo[k] + fft_friendly(hi - rec.box.lo[k] + 1) - 1;
  }
  const std::int64_t N = rec.box.size();
  const std::size_t bytes =
      static_cast<std::size_t>(N) * (2 * d * sizeof(Complex) + out_times.size() * sizeof(double));
  if (bytes > opt.memory_budget) throw BoxTooLarge(bytes, opt.memory_budget);

  std::vector<int> dims(s);
  for (int k = 0; k < s; ++k) dims[k] = rec.box.extent(k);
  FftwBuffer phi0(static_cast<std::size_t>(N) * d), work(static_cast<std::size_t>(N) * d);
  fftw_plan fwd = fftw_plan_dft(s, dims.data(), work.data, work.data, FFTW_FORWARD, FFTW_ESTIMATE);
  fftw_plan bwd = fftw_plan_dft(s, dims.data(), work.data, work.data, FFTW_BACKWARD, FFTW_ESTIMATE);
  auto run = [&](fftw_plan plan, Complex* buf) {
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(buf), reinterpret_cast<fftw_complex*>(buf));
  };
  // Component-major: component c occupies [c N, (c+1) N).
  std::fill(phi0.c(), phi0.c() + N * d, Complex(0.0));
  for (const auto& [x, v] : psi0.amplitudes)
    for (int c = 0; c < d; ++c) phi0.c()[c * N + rec.box.index(x)] += v[c];
  for (int c = 0; c < d; ++c) run(fwd, phi0.c() + c * N);

  SymbolEvaluator proto(model);
  const auto rows = phase_rows(proto, rec.box, 0.0, nullptr);
  for (double t : out_times) {
    parallel_blocks(N, [&](std::int64_t lo, std::int64_t hi) {
      SymbolEvaluator ev(model);
      std::vector<const Complex*> rp(s);
      CMatrix h;
      CVector v(d);
      for (std::int64_t m = lo; m < hi; ++m) {
        std::int64_t r = m;
        for (int k = s - 1; k >= 0; --k) {
          rp[k] = &rows[k][static_cast<std::size_t>(r % dims[k]) * ev.row_length(k)];
          r /= dims[k];
        }
        ev.combine(rp.data(), h);
        if (d == 1) {
          work.c()[m] = std::exp(Complex(0.0, -t * h(0, 0).real())) * phi0.c()[m];
          continue;
        }
        Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (h + h.adjoint()));
        for (int c = 0; c < d; ++c) v[c] = phi0.c()[c * N + m];
        CVector coeff = es.eigenvectors().adjoint() * v;
        for (int c = 0; c < d; ++c) coeff[c] *= std::exp(Complex(0.0, -t * es.eigenvalues()[c]));
        v = es.eigenvectors() * coeff;
        for (int c = 0; c < d; ++c) work.c()[c * N + m] = v[c];
      }
    });
    for (int c = 0; c < d; ++c) run(bwd, work.c() + c * N);
    std::vector<double> dist(N, 0.0);
    const double scale = 1.0 / (static_cast<double>(N) * static_cast<double>(N));
    for (int c = 0; c < d; ++c)
      for (std::int64_t i = 0; i < N; ++i) dist[i] += std::norm(work.c()[c * N + i]) * scale;
    rec.boundary_mass = std::max(rec.boundary_mass, boundary_layer_mass(rec.box, dist));
    rec.times.push_back(t);
    rec.distributions.push_back(std::move(dist));
  }
  fftw_destroy_plan(fwd);
  fftw_destroy_plan(bwd);
  rec.wraparound_safe = rec.boundary_mass < 1e-14;
  return rec;
}

}  // namespace

InitialState InitialState::localized(const Site& x, const CVector& v) {
  InitialState st;
  st.dim_lattice = static_cast<int>(x.size());
  st.dim_cell = static_cast<int>(v.size());
  st.amplitudes.emplace_back(x, v);
  st.normalize();
  return st;
}

double InitialState::norm2() const {
  double n = 0.0;
  for (const auto& [x, v] : amplitudes) n += v.squaredNorm();
  return n;
}

void InitialState::normalize() {
  const double n = std::sqrt(norm2());
  if (!(n > 0)) throw ModelError("initial state is zero");
  for (auto& [x, v] : amplitudes) v /= n;
  normalized = true;
}

std::int64_t LatticeBox::size() const {
  std::int64_t n = 1;
  for (int k = 0; k < dim(); ++k) n *= extent(k);
  return n;
}

std::int64_t LatticeBox::index(const Site& x) const {
  std::int64_t idx = 0;
  for (int k = 0; k < dim(); ++k) idx = idx * extent(k) + (x[k] - lo[k]);
  return idx;
}

Site LatticeBox::site(std::int64_t idx) const {
  Site x(dim());
  for (int k = dim() - 1; k >= 0; --k) {
    x[k] = lo[k] + static_cast<int>(idx % extent(k));
    idx /= extent(k);
  }
  return x;
}

bool LatticeBox::contains(const Site& x) const {
  for (int k = 0; k < dim(); ++k)
    if (x[k] < lo[k] || x[k] > hi[k]) return false;
  return true;
}

double EvolutionRecord::total_probability(std::size_t i) const {
  return std::accumulate(distributions.at(i).begin(), distributions.at(i).end(), 0.0);
}

std::size_t EvolutionRecord::time_index(double t) const {
  for (std::size_t i = 0; i < times.size(); ++i)
    if (std::abs(times[i] - t) <= 1e-9 * std::max(1.0, std::abs(t))) return i;
  throw NumericError("time " + std::to_string(t) + " was not stored");
}

EvolutionRecord evolve(const LatticeModel& model, const InitialState& psi0, const EvolveOptions& opt) {
  check_state(model, psi0);
  if (!(opt.t_max >= 0)) throw NumericError("t_max must be nonnegative");
  EvolutionRecord rec = model.is_walk() ? evolve_walk(model, psi0, opt) : evolve_hamiltonian(model, psi0, opt);
  rec.model = std::make_shared<const LatticeModel>(model);
  rec.initial = psi0;
  return rec;
}

// ---------------------------------------------------------------------------------------------

TailRegion TailRegion::half_space(RVector n, double c) {
  TailRegion r;
  r.kind = Kind::HalfSpace;
  r.n = std::move(n);
  r.c = c;
  return r;
}

TailRegion TailRegion::ball_complement(double radius) {
  TailRegion r;
  r.kind = Kind::BallComplement;
  r.r = radius;
  return r;
}

TailRegion TailRegion::parse(const std::string& text, int s) {
  std::istringstream is(text);
  std::string kind;
  is >> kind;
  if (kind == "ball") {
    double r;
    if (!(is >> r) || r < 0) throw ModelError("region: expected 'ball r' with r >= 0");
    return ball_complement(r);
  }
  if (kind == "half") {
    std::string nv;
    double c;
    if (!(is >> nv >> c)) throw ModelError("region: expected 'half n1,...,ns c'");
    RVector n(s);
    std::istringstream ns(nv);
    std::string item;
    int k = 0;
    while (std::getline(ns, item, ',')) {
      if (k >= s) throw ModelError("region: normal has too many components");
      n[k++] = std::stod(item);
    }
    if (k != s) throw ModelError("region: normal must have " + std::to_string(s) + " components");
    return half_space(n, c);
  }
  throw ModelError("region: unknown kind '" + kind + "'");
}

std::string TailRegion::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (kind == Kind::BallComplement) {
    os << "ball " << r;
  } else {
    os << "half ";
    for (Eigen::Index k = 0; k < n.size(); ++k) os << (k ? "," : "") << n[k];
    os << ' ' << c;
  }
  return os.str();
}

bool TailRegion::counts(const Site& x, double t) const {
  if (kind == Kind::HalfSpace) {
    double v = 0.0;
    for (Eigen::Index k = 0; k < n.size(); ++k) v += n[k] * x[k];
    const double thr = c * t;
    return v >= thr - 1e-12 * std::max(1.0, std::abs(thr));
  }
  double q = 0.0;
  for (int xi : x) q += double(xi) * xi;
  const double thr = r * t;
  return std::sqrt(q) >= thr - 1e-12 * std::max(1.0, thr);
}

TailSeries tail_probability(const EvolutionRecord& rec, const TailRegion& region) {
  TailSeries ts;
  ts.region = region;
  ts.precision_floor = rec.precision_floor;
  for (std::size_t i = 0; i < rec.times.size(); ++i) {
    const double t = rec.times[i];
    const auto& dist = rec.distributions[i];
    double p = 0.0;
    for (std::int64_t k = 0; k < static_cast<std::int64_t>(dist.size()); ++k)
      if (dist[k] != 0.0 && region.counts(rec.box.site(k), t)) p += dist[k];
    p = std::clamp(p, 0.0, 1.0);
    ts.times.push_back(t);
    ts.probabilities.push_back(p);
    ts.empirical_rates.push_back(t > 0 ? (p > 0 ? -std::log(p) / t : kInf)
                                       : std::numeric_limits<double>::quiet_NaN());
    ts.below_precision.push_back(p < rec.precision_floor);
  }
  return ts;
}

MomentSeries exp_moment(const EvolutionRecord& rec, const RVector& lambda) {
  MomentSeries out;
  out.times = rec.times;
  const int s = rec.box.dim();
  if (lambda.size() != s) throw ModelError("lambda dimension mismatch");
  if (rec.kind == DynamicsKind::Walk) {
    for (const auto& dist : rec.distributions) {
      double m = -kInf;
      std::vector<double> e(dist.size(), -kInf);
      for (std::int64_t k = 0; k < static_cast<std::int64_t>(dist.size()); ++k) {
        if (!(dist[k] > 0)) continue;
        Site x = rec.box.site(k);
        double lx = 0.0;
        for (int a = 0; a < s; ++a) lx += lambda[a] * x[a];
        e[k] = lx + std::log(dist[k]);
        m = std::max(m, e[k]);
      }
      long double acc = 0.0L;
      for (double v : e)
        if (v > -kInf) acc += std::exp(static_cast<long double>(v - m));
      out.log_moment.push_back(m + static_cast<double>(std::log(acc)));
    }
    return out;
  }

  const LatticeModel& model = *rec.model;
  const int d = model.dim_cell();
  const std::int64_t N = rec.box.size();
  std::vector<int> dims(s);
  for (int k = 0; k < s; ++k) dims[k] = rec.box.extent(k);
  SymbolEvaluator proto(model);
  const auto rows = phase_rows(proto, rec.box, 0.0, &lambda);
  std::vector<double> terms(N);
  for (double t : rec.times) {
    parallel_blocks(N, [&](std::int64_t lo, std::int64_t hi) {
      SymbolEvaluator ev(model);
      std::vector<const Complex*> rp(s);
      CMatrix h;
      CVector phi(d);
      for (std::int64_t m = lo; m < hi; ++m) {
        std::int64_t r = m;
        std::vector<int> mi(s);
        for (int k = s - 1; k >= 0; --k) {
          mi[k] = static_cast<int>(r % dims[k]);
          rp[k] = &rows[k][static_cast<std::size_t>(mi[k]) * ev.row_length(k)];
          r /= dims[k];
        }
        ev.combine(rp.data(), h);
        phi.setZero();
        for (const auto& [x, v] : rec.initial.amplitudes) {
          Complex arg = 0.0;
          for (int k = 0; k < s; ++k) arg += Complex(kTwoPi * mi[k] / dims[k], 0.5 * lambda[k]) * double(x[k]);
          phi += std::exp(Complex(0.0, -1.0) * arg) * v;
        }
        if (d == 1) {
          terms[m] = std::norm(std::exp(Complex(0.0, -t) * h(0, 0)) * phi[0]);
        } else {
          CMatrix u = (Complex(0.0, -t) * h).exp();
          terms[m] = (u * phi).squaredNorm();
        }
      }
    });
    long double acc = 0.0L;
    for (double v : terms) acc += v;
    if (!std::isfinite(static_cast<double>(acc))) throw NumericError("exponential moment overflow");
    out.log_moment.push_back(std::log(static_cast<double>(acc / N)));
  }
  return out;
}

RateFit empirical_rate(const TailSeries& ts, double t_lo, double t_hi) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < ts.times.size(); ++i) {
    const double t = ts.times[i];
    if (t < t_lo || t > t_hi || t <= 0) continue;
    if (ts.below_precision[i] || !(ts.probabilities[i] > 0)) continue;
    x.push_back(t);
    y.push_back(std::log(ts.probabilities[i]));
  }
  if (x.size() < 5)
    throw InsufficientData("rate fit needs at least 5 usable points, have " + std::to_string(x.size()));
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  RateFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.rate = -f.slope;
  f.points = static_cast<int>(x.size());
  return f;
}

// ---------------------------------------------------------------------------------------------

VelocityDistribution velocity_histogram(const EvolutionRecord& rec, double t) {
  const std::size_t i = rec.time_index(t);
  if (!(t > 0)) throw NumericError("velocity histogram needs t > 0");
  const int L = rec.model ? std::max(1, rec.model->max_jump_length()) : 1;
  if (L * t < 20) throw NumericError("velocity histogram needs L t >= 20");
  VelocityDistribution out;
  out.dim = rec.box.dim();
  const auto& dist = rec.distributions[i];
  for (std::int64_t k = 0; k < static_cast<std::int64_t>(dist.size()); ++k) {
    if (!(dist[k] > 0)) continue;
    Site x = rec.box.site(k);
    RVector v(out.dim);
    for (int a = 0; a < out.dim; ++a) v[a] = x[a] / t;
    out.points.push_back(v);
    out.weights.push_back(dist[k]);
  }
  return out;
}

VelocityDistribution theoretical_velocity_distribution(const LatticeModel& model, const InitialState& psi0,
                                                       int grid_n, double gap_tol,
                                                       double max_degenerate_fraction) {
  check_state(model, psi0);
  const int s = model.dim_lattice(), d = model.dim_cell();
  std::int64_t total = 1;
  for (int k = 0; k < s; ++k) total *= grid_n;
  std::vector<std::vector<VelocitySample>> per(total);
  std::vector<CMatrix> vecs(total);
  std::vector<char> ok(total, 0);
  parallel_blocks(total, [&](std::int64_t lo, std::int64_t hi) {
    BandEvaluator be(model, gap_tol);
    RVector p(s);
    for (std::int64_t i = lo; i < hi; ++i) {
      grid_momentum(i, grid_n, s, 0.5, p.data());
      if (!be.try_evaluate(p, per[i])) continue;
      ok[i] = 1;
      CVector psi_hat = CVector::Zero(d);
      for (const auto& [x, v] : psi0.amplitudes) {
        double ph = 0.0;
        for (int k = 0; k < s; ++k) ph += p[k] * x[k];
        psi_hat += std::exp(Complex(0.0, -ph)) * v;
      }
      for (int j = 0; j < d; ++j)
        per[i][j].weight = std::norm(be.eigenvectors().col(j).dot(psi_hat)) / static_cast<double>(total);
    }
  });
  std::int64_t bad = total - std::accumulate(ok.begin(), ok.end(), std::int64_t{0});
  if (static_cast<double>(bad) > max_degenerate_fraction * total)
    throw NumericError("model too singular for grid sampling");
  VelocityDistribution out;
  out.dim = s;
  double sum = 0.0;
  for (std::int64_t i = 0; i < total; ++i) {
    if (!ok[i]) continue;
    for (auto& v : per[i]) {
      out.points.push_back(v.velocity);
      out.weights.push_back(v.weight);
      sum += v.weight;
    }
  }
  if (sum > 0)
    for (double& w : out.weights) w /= sum;
  return out;
}

namespace {

double ks_1d(std::vector<std::pair<double, double>> a, std::vector<std::pair<double, double>> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double ta = 0.0, tb = 0.0;
  for (auto& e : a) ta += e.second;
  for (auto& e : b) tb += e.second;
  if (!(ta > 0) || !(tb > 0)) return 1.0;
  std::size_t i = 0, j = 0;
  double fa = 0.0, fb = 0.0, best = 0.0;
  while (i < a.size() || j < b.size()) {
    double v = std::min(i < a.size() ? a[i].first : kInf, j < b.size() ? b[j].first : kInf);
    while (i < a.size() && a[i].first <= v) fa += a[i++].second;
    while (j < b.size() && b[j].first <= v) fb += b[j++].second;
    best = std::max(best, std::abs(fa / ta - fb / tb));
  }
  return best;
}

}  // namespace

double KolmogorovDistance::max() const {
  double m = per_axis.size() > 1 ? radial : 0.0;
  for (double v : per_axis) m = std::max(m, v);
  return m;
}

KolmogorovDistance kolmogorov_distance(const VelocityDistribution& a, const VelocityDistribution& b) {
  if (a.dim != b.dim) throw ModelError("velocity distributions have different dimensions");
  KolmogorovDistance out;
  auto project = [](const VelocityDistribution& d, int axis) {
    std::vector<std::pair<double, double>> r(d.points.size());
    for (std::size_t i = 0; i < d.points.size(); ++i)
      r[i] = {axis < 0 ? d.points[i].norm() : d.points[i][axis], d.weights[i]};
    return r;
  };
  for (int k = 0; k < a.dim; ++k) out.per_axis.push_back(ks_1d(project(a, k), project(b, k)));
  out.radial = ks_1d(project(a, -1), project(b, -1));
  return out;
}

}  // namespace lattail

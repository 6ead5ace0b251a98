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

#include "lattail/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <tuple>
#include <unordered_map>

#include "lattail/error.hpp"

namespace lattail {
namespace {

struct AffineFrame {
  RVector origin;
  Eigen::MatrixXd basis;       // ambient x k, orthonormal columns
  Eigen::MatrixXd complement;  // ambient x (ambient - k)
  double scale = 1.0;
};

AffineFrame affine_frame(const std::vector<RVector>& pts, int dim, double tol) {
  AffineFrame f;
  f.origin = RVector::Zero(dim);
  for (const auto& p : pts) f.origin += p;
  f.origin /= static_cast<double>(pts.size());
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dim, dim);
  double scale = 0.0;
  for (const auto& p : pts) {
    RVector q = p - f.origin;
    cov.noalias() += q * q.transpose();
    scale = std::max(scale, q.norm());
  }
  f.scale = std::max(scale, 1e-300);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  // Eigenvalues ascending; keep a direction when the point cloud has non-negligible width along it.
  std::vector<int> keep, drop;
  for (int i = 0; i < dim; ++i) {
    RVector u = es.eigenvectors().col(i);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& p : pts) {
      double t = u.dot(p - f.origin);
      lo = std::min(lo, t);
      hi = std::max(hi, t);
    }
    ((hi - lo) > tol * std::max(1.0, scale) ? keep : drop).push_back(i);
  }
  f.basis.resize(dim, static_cast<Eigen::Index>(keep.size()));
  f.complement.resize(dim, static_cast<Eigen::Index>(drop.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) f.basis.col(i) = es.eigenvectors().col(keep[i]);
  for (std::size_t i = 0; i < drop.size(); ++i) f.complement.col(i) = es.eigenvectors().col(drop[i]);
  return f;
}

// Hull in k = 1, 2, 3 local coordinates. Returns vertex indices and local facets.
struct LocalHull {
  std::vector<int> vertices;
  std::vector<std::pair<RVector, double>> facets;
};

LocalHull hull1(const std::vector<RVector>& xi) {
  int lo = 0, hi = 0;
  for (int i = 1; i < static_cast<int>(xi.size()); ++i) {
    if (xi[i][0] < xi[lo][0]) lo = i;
    if (xi[i][0] > xi[hi][0]) hi = i;
  }
  LocalHull h;
  h.vertices = {lo, hi};
  RVector n(1);
  n[0] = 1.0;
  h.facets.emplace_back(n, xi[hi][0]);
  n[0] = -1.0;
  h.facets.emplace_back(n, -xi[lo][0]);
  return h;
}

double cross2(const RVector& o, const RVector& a, const RVector& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

LocalHull hull2(const std::vector<RVector>& xi, double eps) {
  std::vector<int> idx(xi.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    return std::tie(xi[a][0], xi[a][1]) < std::tie(xi[b][0], xi[b][1]);
  });
  std::vector<int> chain(2 * idx.size() + 1);
  int k = 0;
  for (int i : idx) {
    while (k >= 2 && cross2(xi[chain[k - 2]], xi[chain[k - 1]], xi[i]) <= eps) --k;
    chain[k++] = i;
  }
  for (int j = static_cast<int>(idx.size()) - 2, t = k + 1; j >= 0; --j) {
    int i = idx[j];
    while (k >= t && cross2(xi[chain[k - 2]], xi[chain[k - 1]], xi[i]) <= eps) --k;
    chain[k++] = i;
  }
  chain.resize(std::max(k - 1, 0));
  LocalHull h;
  h.vertices = chain;
  const int m = static_cast<int>(chain.size());
  for (int i = 0; i < m; ++i) {
    const RVector& a = xi[chain[i]];
    const RVector& b = xi[chain[(i + 1) % m]];
    RVector n(2);
    n << (b[1] - a[1]), -(b[0] - a[0]);
    n.normalize();
    h.facets.emplace_back(n, n.dot(a));
  }
  return h;
}

struct Tri {
  int v[3];
  Eigen::Vector3d n;
  double off;
  std::vector<int> outside;
  bool alive = true;
};

std::uint64_t edge_key(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

LocalHull hull3(const std::vector<RVector>& xi, double eps) {
  const int n = static_cast<int>(xi.size());
  std::vector<Eigen::Vector3d> P(n);
  for (int i = 0; i < n; ++i) P[i] = Eigen::Vector3d(xi[i][0], xi[i][1], xi[i][2]);

  // Initial tetrahedron from extreme points.
  int ext[6] = {0, 0, 0, 0, 0, 0};
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < 3; ++a) {
      if (P[i][a] < P[ext[2 * a]][a]) ext[2 * a] = i;
      if (P[i][a] > P[ext[2 * a + 1]][a]) ext[2 * a + 1] = i;
    }
  int i0 = ext[0], i1 = ext[1];
  double best = -1.0;
  for (int a = 0; a < 6; ++a)
    for (int b = a + 1; b < 6; ++b) {
      double d = (P[ext[a]] - P[ext[b]]).squaredNorm();
      if (d > best) best = d, i0 = ext[a], i1 = ext[b];
    }
  Eigen::Vector3d dir = (P[i1] - P[i0]).normalized();
  int i2 = -1;
  best = -1.0;
  for (int i = 0; i < n; ++i) {
    Eigen::Vector3d q = P[i] - P[i0];
    double d = (q - q.dot(dir) * dir).squaredNorm();
    if (d > best) best = d, i2 = i;
  }
  Eigen::Vector3d pn = (P[i1] - P[i0]).cross(P[i2] - P[i0]).normalized();
  int i3 = -1;
  best = -1.0;
  for (int i = 0; i < n; ++i) {
    double d = std::abs(pn.dot(P[i] - P[i0]));
    if (d > best) best = d, i3 = i;
  }
  if (best <= eps) throw NumericError("convex hull: point set is numerically planar");

  std::vector<Tri> faces;
  std::unordered_map<std::uint64_t, int> edges;
  auto make_face = [&](int a, int b, int c) {
    Tri t;
    t.v[0] = a, t.v[1] = b, t.v[2] = c;
    t.n = (P[b] - P[a]).cross(P[c] - P[a]);
    double len = t.n.norm();
    t.n /= (len > 0 ? len : 1.0);
    t.off = t.n.dot(P[a]);
    faces.push_back(std::move(t));
    int id = static_cast<int>(faces.size()) - 1;
    edges[edge_key(a, b)] = id;
    edges[edge_key(b, c)] = id;
    edges[edge_key(c, a)] = id;
    return id;
  };
  {
    int tet[4] = {i0, i1, i2, i3};
    int fidx[4][3] = {{0, 1, 2}, {0, 3, 1}, {1, 3, 2}, {2, 3, 0}};
    for (auto& f : fidx) {
      int a = tet[f[0]], b = tet[f[1]], c = tet[f[2]];
      int other = tet[6 - f[0] - f[1] - f[2]];
      Eigen::Vector3d nn = (P[b] - P[a]).cross(P[c] - P[a]);
      if (nn.dot(P[other] - P[a]) > 0) std::swap(b, c);
      make_face(a, b, c);
    }
  }
  auto dist = [&](const Tri& t, int i) { return t.n.dot(P[i]) - t.off; };
  for (int i = 0; i < n; ++i) {
    if (i == i0 || i == i1 || i == i2 || i == i3) continue;
    for (auto& t : faces)
      if (dist(t, i) > eps) {
        t.outside.push_back(i);
        break;
      }
  }

  std::vector<int> work = {0, 1, 2, 3};
  std::vector<char> visible_mark;
  while (!work.empty()) {
    int fi = work.back();
    work.pop_back();
    if (!faces[fi].alive || faces[fi].outside.empty()) continue;
    int q = -1;
    double far = -1.0;
    for (int i : faces[fi].outside) {
      double d = dist(faces[fi], i);
      if (d > far) far = d, q = i;
    }
    visible_mark.assign(faces.size(), 0);
    std::vector<int> visible = {fi};
    visible_mark[fi] = 1;
    std::vector<std::pair<int, int>> horizon;
    for (std::size_t k = 0; k < visible.size(); ++k) {
      const Tri& t = faces[visible[k]];
      for (int e = 0; e < 3; ++e) {
        int u = t.v[e], w = t.v[(e + 1) % 3];
        auto it = edges.find(edge_key(w, u));
        if (it == edges.end()) throw NumericError("convex hull: broken adjacency");
        int nb = it->second;
        if (visible_mark[nb]) continue;
        if (dist(faces[nb], q) > eps) {
          visible_mark[nb] = 1;
          visible.push_back(nb);
        } else {
          horizon.emplace_back(u, w);
        }
      }
    }
    std::vector<int> orphans;
    for (int vf : visible) {
      Tri& t = faces[vf];
      t.alive = false;
      for (int i : t.outside)
        if (i != q) orphans.push_back(i);
      t.outside.clear();
      t.outside.shrink_to_fit();
      for (int e = 0; e < 3; ++e) {
        auto it = edges.find(edge_key(t.v[e], t.v[(e + 1) % 3]));
        if (it != edges.end() && it->second == vf) edges.erase(it);
      }
    }
    std::vector<int> created;
    for (auto [u, w] : horizon) created.push_back(make_face(u, w, q));
    for (int i : orphans)
      for (int cf : created)
        if (dist(faces[cf], i) > eps) {
          faces[cf].outside.push_back(i);
          break;
        }
    for (int cf : created) work.push_back(cf);
  }

  LocalHull h;
  std::vector<char> used(n, 0);
  std::map<std::tuple<long long, long long, long long, long long>, int> merged;
  for (const auto& t : faces) {
    if (!t.alive) continue;
    for (int v : t.v) used[v] = 1;
    auto key = std::make_tuple(std::llround(t.n[0] * 1e9), std::llround(t.n[1] * 1e9),
                               std::llround(t.n[2] * 1e9), std::llround(t.off * 1e9));
    if (merged.count(key)) continue;
    merged[key] = 1;
    RVector nn(3);
    nn << t.n[0], t.n[1], t.n[2];
    h.facets.emplace_back(nn, t.off);
  }
  for (int i = 0; i < n; ++i)
    if (used[i]) h.vertices.push_back(i);
  return h;
}

// Minimum Euclidean norm over conv(points - x): Wolfe's method.
double min_norm_distance(const std::vector<RVector>& pts, const RVector& x) {
  const int n = static_cast<int>(pts.size());
  auto P = [&](int i) -> RVector { return pts[i] - x; };
  double max_sq = 0.0;
  int j0 = 0;
  for (int i = 0; i < n; ++i) {
    double s = P(i).squaredNorm();
    max_sq = std::max(max_sq, s);
    if (s < P(j0).squaredNorm()) j0 = i;
  }
  std::vector<int> S = {j0};
  std::vector<double> w = {1.0};
  RVector y = P(j0);
  const double tiny = 1e-14;
  for (int outer = 0; outer < 10 * n + 100; ++outer) {
    int j = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      double v = y.dot(P(i));
      if (v < best) best = v, j = i;
    }
    if (y.squaredNorm() - best <= 1e-13 * std::max(max_sq, 1e-300)) break;
    if (std::find(S.begin(), S.end(), j) != S.end()) break;
    S.push_back(j);
    w.push_back(0.0);
    for (int inner = 0; inner < 10 * n + 100; ++inner) {
      const int m = static_cast<int>(S.size());
      Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m + 1, m + 1);
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + 1);
      for (int a = 0; a < m; ++a) {
        for (int b = 0; b < m; ++b) A(a, b) = P(S[a]).dot(P(S[b]));
        A(a, m) = A(m, a) = 1.0;
      }
      rhs[m] = 1.0;
      Eigen::VectorXd sol = A.completeOrthogonalDecomposition().solve(rhs);
      bool positive = true;
      for (int a = 0; a < m; ++a) positive = positive && sol[a] > tiny;
      if (positive) {
        for (int a = 0; a < m; ++a) w[a] = sol[a];
        break;
      }
      double theta = 1.0;
      for (int a = 0; a < m; ++a)
        if (sol[a] <= tiny) theta = std::min(theta, w[a] / (w[a] - sol[a]));
      std::vector<int> S2;
      std::vector<double> w2;
      for (int a = 0; a < m; ++a) {
        double wa = (1 - theta) * w[a] + theta * sol[a];
        if (wa > tiny) S2.push_back(S[a]), w2.push_back(wa);
      }
      if (S2.empty()) {
        S2.push_back(S.back());
        w2.push_back(1.0);
      }
      double total = std::accumulate(w2.begin(), w2.end(), 0.0);
      for (double& v : w2) v /= total;
      S = std::move(S2);
      w = std::move(w2);
    }
    y = RVector::Zero(x.size());
    for (std::size_t a = 0; a < S.size(); ++a) y += w[a] * P(S[a]);
  }
  return y.norm();
}

}  // namespace

Polytope Polytope::hull(const std::vector<RVector>& points, int ambient_dim, double tol) {
  Polytope h;
  h.ambient_dim_ = ambient_dim;
  if (points.empty()) return h;
  for (const auto& p : points)
    if (p.size() != ambient_dim) throw GeometryError("hull: point dimension mismatch");

  if (ambient_dim > 3) {
    h.vertices_ = points;
    AffineFrame f = affine_frame(points, ambient_dim, tol);
    h.affine_dim_ = static_cast<int>(f.basis.cols());
    return h;
  }

  h.exact_ = true;
  AffineFrame f = affine_frame(points, ambient_dim, tol);
  const int k = static_cast<int>(f.basis.cols());
  h.affine_dim_ = k;
  for (int i = 0; i < f.complement.cols(); ++i) {
    RVector u = f.complement.col(i);
    h.equalities_.push_back({u, u.dot(f.origin)});
  }
  if (k == 0) {
    h.vertices_ = {points.front()};
    return h;
  }
  std::vector<RVector> xi(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) xi[i] = f.basis.transpose() * (points[i] - f.origin);
  const double eps = tol * std::max(1.0, f.scale);
  LocalHull lh = k == 1 ? hull1(xi) : k == 2 ? hull2(xi, eps * std::max(1.0, f.scale)) : hull3(xi, eps);
  for (int v : lh.vertices) h.vertices_.push_back(points[v]);
  for (auto& [nl, ol] : lh.facets) {
    RVector nf = f.basis * nl;
    h.facets_.push_back({nf, ol + nf.dot(f.origin)});
  }
  return h;
}

bool Polytope::contains(const RVector& x, double tol) const {
  if (empty()) return false;
  if (!exact_) return min_norm_distance(vertices_, x) <= tol;
  for (const auto& e : equalities_)
    if (std::abs(e.normal.dot(x) - e.offset) > tol) return false;
  for (const auto& f : facets_)
    if (f.normal.dot(x) - f.offset > tol) return false;
  return true;
}

double Polytope::distance(const RVector& x) const {
  if (empty()) return std::numeric_limits<double>::infinity();
  if (exact_ && contains(x, 0.0)) return 0.0;
  return min_norm_distance(vertices_, x);
}

double Polytope::support(const RVector& dir) const {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& v : vertices_) best = std::max(best, dir.dot(v));
  return best;
}

double Polytope::max_norm() const {
  double best = 0.0;
  for (const auto& v : vertices_) best = std::max(best, v.norm());
  return best;
}

Polytope Polytope::scaled(double factor) const {
  if (!(factor > 0)) throw GeometryError("polytope scale factor must be positive");
  Polytope out = *this;
  for (auto& v : out.vertices_) v *= factor;
  for (auto& f : out.facets_) f.offset *= factor;
  for (auto& e : out.equalities_) e.offset *= factor;
  return out;
}

double gauge(const Polytope& hull, const RVector& x) {
  const char* msg =
      "gauge: origin is not an interior point of the hull; augment the jump set with the origin";
  if (hull.empty()) throw GeometryError("gauge: empty hull");
  if (hull.has_facets()) {
    if (!hull.equalities().empty()) throw GeometryError(msg);
    double g = 0.0;
    for (const auto& f : hull.facets()) {
      if (f.offset <= 1e-12) throw GeometryError(msg);
      g = std::max(g, f.normal.dot(x) / f.offset);
    }
    return g;
  }
  const int s = hull.ambient_dim();
  double scale = hull.max_norm();
  double probe = 1e-6 * std::max(scale, 1e-300);
  for (int k = 0; k < s; ++k)
    for (double sign : {-1.0, 1.0}) {
      RVector e = RVector::Zero(s);
      e[k] = sign * probe;
      if (!hull.contains(e, 0.0)) throw GeometryError(msg);
    }
  if (x.norm() == 0.0) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (!hull.contains(x / hi, 1e-13 * scale)) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid > 0 && hull.contains(x / mid, 1e-13 * scale))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

}  // namespace lattail

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

#include "lattail/catalog.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <map>

#include "lattail/error.hpp"

namespace lattail {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Laurent polynomials in z_k = exp(i p_k); the key is the exponent vector.
using Laurent = std::map<std::vector<int>, Complex>;
using LMatrix = std::vector<std::vector<Laurent>>;

Laurent constant(int s, Complex c) { return {{std::vector<int>(s, 0), c}}; }

Laurent monomial(int s, int axis, int power, Complex c = 1.0) {
  std::vector<int> e(s, 0);
  e[axis] = power;
  return {{e, c}};
}

Laurent operator+(Laurent a, const Laurent& b) {
  for (const auto& [k, v] : b) a[k] += v;
  return a;
}

Laurent operator*(const Laurent& a, const Laurent& b) {
  Laurent r;
  for (const auto& [ka, va] : a)
    for (const auto& [kb, vb] : b) {
      std::vector<int> k(ka.size());
      for (std::size_t i = 0; i < k.size(); ++i) k[i] = ka[i] + kb[i];
      r[k] += va * vb;
    }
  return r;
}

Laurent operator*(Complex c, Laurent a) {
  for (auto& [k, v] : a) v *= c;
  return a;
}

Laurent cosine(int s, int axis) { return monomial(s, axis, 1, 0.5) + monomial(s, axis, -1, 0.5); }

Laurent sine(int s, int axis) {
  const Complex h(0.0, -0.5);  // 1/(2i)
  return monomial(s, axis, 1, h) + monomial(s, axis, -1, -h);
}

LMatrix zeros(int s, int d) { return LMatrix(d, std::vector<Laurent>(d, constant(s, 0.0))); }

LMatrix matmul(const LMatrix& a, const LMatrix& b) {
  const int d = static_cast<int>(a.size());
  LMatrix r(d, std::vector<Laurent>(d));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) r[i][j] = r[i][j] + a[i][k] * b[k][j];
  return r;
}

/// exp(i p_axis sigma) = cos(p) 1 + i sin(p) sigma for a Pauli matrix sigma.
LMatrix exp_i_sigma(int s, int axis, const Eigen::Matrix2cd& sigma) {
  LMatrix r = zeros(s, 2);
  const Complex I(0.0, 1.0);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      Laurent e = (i == j ? 1.0 : 0.0) * cosine(s, axis);
      r[i][j] = e + (I * sigma(i, j)) * sine(s, axis);
    }
  return r;
}

/// The term exp(i p.k) of the symbol is a physical displacement by -k.
std::vector<Jump> to_jumps(const LMatrix& m, int s) {
  const int d = static_cast<int>(m.size());
  std::map<std::vector<int>, CMatrix> acc;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (const auto& [k, v] : m[i][j]) {
        if (std::abs(v) < 1e-15) continue;
        Site y(s);
        for (int a = 0; a < s; ++a) y[a] = -k[a];
        auto it = acc.find(y);
        if (it == acc.end()) it = acc.emplace(y, CMatrix::Zero(d, d)).first;
        it->second(i, j) += v;
      }
  std::vector<Jump> out;
  for (auto& [y, c] : acc) out.push_back({y, c});
  return out;
}

Eigen::Matrix2cd pauli(int k) {
  Eigen::Matrix2cd m;
  const Complex I(0.0, 1.0);
  if (k == 1) m << 0, 1, 1, 0;
  if (k == 2) m << 0, -I, I, 0;
  if (k == 3) m << 1, 0, 0, -1;
  return m;
}

CatalogEntry coin1d(double a) {
  if (!(a > 0.0 && a < 1.0)) throw ModelError("coin1d: parameter a must lie in (0, 1)");
  const double b = std::sqrt(1.0 - a * a);
  // W(p) = diag(e^{ip}, e^{-ip}) [[a, b], [-b, a]]
  LMatrix coin = zeros(1, 2);
  coin[0][0] = constant(1, a);
  coin[0][1] = constant(1, b);
  coin[1][0] = constant(1, -b);
  coin[1][1] = constant(1, a);
  LMatrix shift = zeros(1, 2);
  shift[0][0] = monomial(1, 0, 1);
  shift[1][1] = monomial(1, 0, -1);
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, a);
  std::string label = "coin1d(" + std::string(buf, res.ptr) + ")";
  CatalogEntry e{label, LatticeModel(label, DynamicsKind::Walk, 1, 2, to_jumps(matmul(shift, coin), 1)), {},
                 "1D qubit walk with real coin parameter a"};
  auto& cf = e.closed_forms;
  cf.dispersion = [a](const RVector& p) { return std::acos(a * std::cos(p[0])); };
  cf.group_velocity = [a](const RVector& p) {
    double v = a * std::sin(p[0]) / std::sqrt(1.0 - a * a * std::cos(p[0]) * std::cos(p[0]));
    return std::vector<RVector>{RVector::Constant(1, v), RVector::Constant(1, -v)};
  };
  // R(lambda) = 2 arcsinh(a sinh(|lambda/2|))
  cf.dual_rate = [a](const RVector& l) { return 2.0 * std::asinh(a * std::sinh(std::abs(l[0] / 2.0))); };
  // lambda(x) = 2 log((sqrt(x^2-a^2) + x sqrt(1-a^2)) / (a sqrt(1-x^2)))
  // I(x) = x lambda(x) - 2 log((sqrt(x^2-a^2) + sqrt(1-a^2)) / sqrt(1-x^2))
  cf.rate = [a](const RVector& xv) {
    const double x = std::abs(xv[0]);
    if (x <= a) return 0.0;
    if (x > 1.0) return kInf;
    if (x == 1.0) return -2.0 * std::log(a);
    const double r = std::sqrt(x * x - a * a), c = std::sqrt(1.0 - a * a), w = std::sqrt(1.0 - x * x);
    const double lam = 2.0 * std::log((r + x * c) / (a * w));
    return x * lam - 2.0 * std::log((r + c) / w);
  };
  cf.boundary_coeffs = [a](const RVector&) { return std::make_pair(a, a - a * a * a); };
  cf.region = [a](const RVector& v, double tol) { return std::abs(v[0]) <= a + tol; };
  return e;
}

CatalogEntry shift1d() {
  LMatrix w = zeros(1, 1);
  w[0][0] = monomial(1, 0, -1);
  CatalogEntry e{"shift1d", LatticeModel("shift1d", DynamicsKind::Walk, 1, 1, to_jumps(w, 1)), {},
                 "pure right shift"};
  auto& cf = e.closed_forms;
  cf.dispersion = [](const RVector& p) { return std::abs(p[0]); };
  cf.group_velocity = [](const RVector&) { return std::vector<RVector>{RVector::Constant(1, 1.0)}; };
  cf.dual_rate = [](const RVector& l) { return l[0]; };
  cf.rate = [](const RVector& x) { return std::abs(x[0] - 1.0) <= 1e-12 ? 0.0 : kInf; };
  cf.region = [](const RVector& v, double tol) { return std::abs(v[0] - 1.0) <= tol; };
  return e;
}

CatalogEntry weyl2d() {
  LMatrix w = matmul(exp_i_sigma(2, 0, pauli(1)), exp_i_sigma(2, 1, pauli(3)));
  CatalogEntry e{"weyl2d", LatticeModel("weyl2d", DynamicsKind::Walk, 2, 2, to_jumps(w, 2)), {},
                 "2D walk exp(i p1 sigma1) exp(i p2 sigma3) with circular light cone"};
  auto& cf = e.closed_forms;
  // omega = arccos(cos p1 cos p2)
  cf.dispersion = [](const RVector& p) { return std::acos(std::cos(p[0]) * std::cos(p[1])); };
  cf.group_velocity = [](const RVector& p) {
    const double c1 = std::cos(p[0]), c2 = std::cos(p[1]);
    RVector v(2);
    v << std::sin(p[0]) * c2, c1 * std::sin(p[1]);
    v /= std::sqrt(1.0 - c1 * c1 * c2 * c2);
    return std::vector<RVector>{v, -v};
  };
  cf.region = [](const RVector& v, double tol) { return v.norm() <= 1.0 + tol; };
  return e;
}

CatalogEntry nonconvex2d() {
  LMatrix h = zeros(2, 1);
  h[0][0] = cosine(2, 0) * cosine(2, 1) + Complex(-1.0) * sine(2, 0);
  CatalogEntry e{"nonconvex2d",
                 LatticeModel("nonconvex2d", DynamicsKind::Hamiltonian, 2, 1, to_jumps(h, 2)), {},
                 "scalar Hamiltonian cos p1 cos p2 - sin p1 with non-convex propagation region"};
  auto& cf = e.closed_forms;
  cf.dispersion = [](const RVector& p) {
    return std::cos(p[0]) * std::cos(p[1]) - std::sin(p[0]);
  };
  cf.group_velocity = [](const RVector& p) {
    RVector v(2);
    v << -std::sin(p[0]) * std::cos(p[1]) - std::cos(p[0]), -std::cos(p[0]) * std::sin(p[1]);
    return std::vector<RVector>{v};
  };
  return e;
}

CatalogEntry weyl3d() {
  LMatrix w = matmul(matmul(exp_i_sigma(3, 0, pauli(1)), exp_i_sigma(3, 1, pauli(2))),
                     exp_i_sigma(3, 2, pauli(3)));
  CatalogEntry e{"weyl3d", LatticeModel("weyl3d", DynamicsKind::Walk, 3, 2, to_jumps(w, 3)), {},
                 "3D Weyl walk exp(i p1 sigma1) exp(i p2 sigma2) exp(i p3 sigma3)"};
  auto& cf = e.closed_forms;
  // tr W / 2 = cos p1 cos p2 cos p3 + sin p1 sin p2 sin p3
  cf.dispersion = [](const RVector& p) {
    return std::acos(std::cos(p[0]) * std::cos(p[1]) * std::cos(p[2]) +
                     std::sin(p[0]) * std::sin(p[1]) * std::sin(p[2]));
  };
  // Intersection of three orthogonal unit cylinders.
  cf.region = [](const RVector& v, double tol) {
    const double b = (1.0 + tol) * (1.0 + tol);
    return v[0] * v[0] + v[1] * v[1] <= b && v[1] * v[1] + v[2] * v[2] <= b &&
           v[0] * v[0] + v[2] * v[2] <= b;
  };
  return e;
}

CatalogEntry spherical3d() {
  const int s = 3;
  const Complex I(0.0, 1.0);
  Laurent c1 = cosine(s, 0), c2 = cosine(s, 1), s1 = sine(s, 0), s2 = sine(s, 1);
  LMatrix w = zeros(s, 2);
  w[0][0] = c1 * c2 * monomial(s, 2, 1);
  w[0][1] = Complex(-1.0) * (c1 * s2) + I * s1;
  w[1][0] = c1 * s2 + I * s1;
  w[1][1] = c1 * c2 * monomial(s, 2, -1);
  CatalogEntry e{"spherical3d", LatticeModel("spherical3d", DynamicsKind::Walk, 3, 2, to_jumps(w, s)), {},
                 "3D walk with spherical propagation region and conical points"};
  auto& cf = e.closed_forms;
  // omega = arccos(cos p1 cos p2 cos p3)
  cf.dispersion = [](const RVector& p) {
    return std::acos(std::cos(p[0]) * std::cos(p[1]) * std::cos(p[2]));
  };
  cf.group_velocity = [](const RVector& p) {
    const double c1 = std::cos(p[0]), c2 = std::cos(p[1]), c3 = std::cos(p[2]);
    RVector v(3);
    v << std::sin(p[0]) * c2 * c3, c1 * std::sin(p[1]) * c3, c1 * c2 * std::sin(p[2]);
    v /= std::sqrt(1.0 - c1 * c1 * c2 * c2 * c3 * c3);
    return std::vector<RVector>{v, -v};
  };
  // R~(ell) = 2 arcosh(cosh(ell / (2 sqrt 3))^3)
  cf.radial_dual = [](double ell) {
    return 2.0 * std::acosh(std::pow(std::cosh(ell / (2.0 * std::sqrt(3.0))), 3));
  };
  cf.region = [](const RVector& v, double tol) { return v.norm() <= 1.0 + tol; };
  return e;
}

}  // namespace

CatalogEntry catalog_get(const std::string& name) {
  if (name == "coin1d") return coin1d(1.0 / std::sqrt(2.0));
  if (name.rfind("coin1d(", 0) == 0 && name.back() == ')') {
    const std::string arg = name.substr(7, name.size() - 8);
    double a = 0.0;
    auto r = std::from_chars(arg.data(), arg.data() + arg.size(), a);
    if (r.ec != std::errc() || r.ptr != arg.data() + arg.size())
      throw ModelError("coin1d: cannot parse parameter '" + arg + "'");
    return coin1d(a);
  }
  if (name == "shift1d") return shift1d();
  if (name == "weyl2d") return weyl2d();
  if (name == "nonconvex2d") return nonconvex2d();
  if (name == "weyl3d") return weyl3d();
  if (name == "spherical3d") return spherical3d();
  throw ModelError("unknown catalog model '" + name + "'");
}

bool is_catalog_name(const std::string& name) {
  for (const auto& n : catalog_names())
    if (name == n) return true;
  if (name.rfind("coin1d(", 0) != 0) return false;
  try {
    catalog_get(name);
    return true;
  } catch (const ModelError&) {
    return false;
  }
}

std::vector<std::string> catalog_names() {
  return {"coin1d", "weyl2d", "nonconvex2d", "weyl3d", "spherical3d", "shift1d"};
}

}  // namespace lattail

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

#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

#include "lattail/catalog.hpp"
#include "lattail/error.hpp"
#include "lattail/model.hpp"
#include "lattail/polytope.hpp"
#include "oracles.hpp"

using namespace lattail;

namespace {

const char* kHadamard = R"({
  "label": "hadamard",
  "kind": "walk",
  "dim_lattice": 1,
  "dim_cell": 2,
  "jumps": [
    {"offset": [-1], "matrix": [[[0.7071067811865476, 0], [0.7071067811865476, 0]], [[0, 0], [0, 0]]]},
    {"offset": [1], "matrix": [[[0, 0], [0, 0]], [[-0.7071067811865476, 0], [0.7071067811865476, 0]]]}
  ]
})";

const char* kShift = R"({"label": "shift", "kind": "walk", "dim_lattice": 1, "dim_cell": 1,
  "jumps": [{"offset": [1], "matrix": [[[1, 0]]]}]})";

}  // namespace

TEST_CASE("hadamard document loads as a walk") {
  LatticeModel m = load_model(kHadamard);
  CHECK(m.is_walk());
  CHECK(m.dim_lattice() == 1);
  CHECK(m.dim_cell() == 2);
  CHECK(m.jumps().size() == 2);
  CHECK(m.validation().unitarity_defect < 1e-14);
}

TEST_CASE("hadamard symbol at the origin") {
  LatticeModel m = load_model(kHadamard);
  CMatrix w = evaluate_symbol(m, ComplexMomentum::real(RVector::Zero(1))).matrix;
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(w(0, 0) - r) < 1e-15);
  CHECK(std::abs(w(0, 1) - r) < 1e-15);
  CHECK(std::abs(w(1, 0) + r) < 1e-15);
  CHECK(std::abs(w(1, 1) - r) < 1e-15);
}

TEST_CASE("shift symbol grows like e^lambda") {
  LatticeModel m = load_model(kShift);
  CMatrix w = evaluate_symbol(m, ComplexMomentum(RVector::Zero(1), RVector::Ones(1))).matrix;
  CHECK(std::abs(w(0, 0)) == doctest::Approx(std::exp(1.0)).epsilon(1e-15));
  // Direct sum: C_1 exp(-i (p + i lambda)) at p = 0.3.
  CMatrix w2 = evaluate_symbol(m, ComplexMomentum(RVector::Constant(1, 0.3), RVector::Ones(1))).matrix;
  std::complex<double> ref = std::exp(std::complex<double>(0, -1) * std::complex<double>(0.3, 1.0));
  CHECK(std::abs(w2(0, 0) - ref) < 1e-14);
}

TEST_CASE("duplicate offsets are rejected") {
  const char* doc = R"({"kind": "walk", "dim_lattice": 1, "dim_cell": 1,
    "jumps": [{"offset": [1], "matrix": [[[1, 0]]]}, {"offset": [1], "matrix": [[[1, 0]]]}]})";
  CHECK_THROWS_WITH_AS(load_model(doc), doctest::Contains("duplicate offset"), ModelError);
}

TEST_CASE("schema and invariant violations") {
  CHECK_THROWS_AS(load_model("[1,2]"), ModelError);
  CHECK_THROWS_AS(load_model(R"({"kind": "walk", "dim_lattice": 1, "dim_cell": 1, "jumps": [], "extra": 1})"),
                  ModelError);
  CHECK_THROWS_WITH_AS(load_model(R"({"kind": "walk", "dim_lattice": 2, "dim_cell": 1,
    "jumps": [{"offset": [1], "matrix": [[[1, 0]]]}]})"),
                       doctest::Contains("dimension mismatch"), ModelError);
  // Two equal-weight jumps are not unitary.
  CHECK_THROWS_AS(load_model(R"({"kind": "walk", "dim_lattice": 1, "dim_cell": 1,
    "jumps": [{"offset": [1], "matrix": [[[0.5, 0]]]}, {"offset": [-1], "matrix": [[[0.5, 0]]]}]})"),
                  ModelError);
  // Hopping without its adjoint partner is not Hermitian.
  CHECK_THROWS_AS(load_model(R"({"kind": "hamiltonian", "dim_lattice": 1, "dim_cell": 1,
    "jumps": [{"offset": [1], "matrix": [[[0.5, 0]]]}]})"),
                  ModelError);
  CHECK_NOTHROW(load_model(R"({"kind": "hamiltonian", "dim_lattice": 1, "dim_cell": 1,
    "jumps": [{"offset": [1], "matrix": [[[0.5, 0]]]}, {"offset": [-1], "matrix": [[[0.5, 0]]]}]})"));
}

TEST_CASE("document round trip") {
  for (const auto& name : catalog_names()) {
    LatticeModel m = catalog_get(name).model;
    LatticeModel back = load_model(model_to_document(m));
    REQUIRE(back.jumps().size() == m.jumps().size());
    for (std::size_t i = 0; i < m.jumps().size(); ++i) {
      CHECK(back.jumps()[i].offset == m.jumps()[i].offset);
      CHECK((back.jumps()[i].coeff - m.jumps()[i].coeff).norm() == 0.0);
    }
  }
}

TEST_CASE("symbol periodicity and conjugation identity") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-3.0, 3.0);
  for (const auto& name : catalog_names()) {
    LatticeModel m = catalog_get(name).model;
    const int s = m.dim_lattice(), d = m.dim_cell();
    for (int trial = 0; trial < 20; ++trial) {
      RVector p(s), l(s);
      for (int k = 0; k < s; ++k) p[k] = U(rng), l[k] = U(rng) / 2;
      CMatrix a = evaluate_symbol(m, ComplexMomentum(p, l)).matrix;
      for (int k = 0; k < s; ++k) {
        RVector q = p;
        q[k] += kTwoPi;
        CMatrix b = evaluate_symbol(m, ComplexMomentum(q, l)).matrix;
        CHECK((a - b).norm() <= 1e-12 * std::max(1.0, a.norm()));
      }
      CMatrix c = evaluate_symbol(m, ComplexMomentum(p, -l)).matrix;
      if (m.is_walk())
        CHECK((a * c.adjoint() - CMatrix::Identity(d, d)).norm() <= 1e-10 * std::max(1.0, a.norm() * c.norm()));
      else
        CHECK((a.adjoint() - c).norm() <= 1e-12 * std::max(1.0, a.norm()));
    }
  }
}

TEST_CASE("hamiltonian spectrum is real on the torus") {
  LatticeModel m = catalog_get("nonconvex2d").model;
  CMatrix h = evaluate_symbol(m, ComplexMomentum::real(RVector::Constant(2, 0.4))).matrix;
  CHECK(std::abs(h(0, 0).imag()) < 1e-14);
  CHECK(h(0, 0).real() == doctest::Approx(std::cos(0.4) * std::cos(0.4) - std::sin(0.4)).epsilon(1e-14));
}

TEST_CASE("symbol derivative against central differences") {
  LatticeModel m = catalog_get("weyl2d").model;
  RVector p(2);
  p << 0.3, -1.1;
  const double h = 1e-6;
  for (int k = 0; k < 2; ++k) {
    RVector pp = p, pm = p;
    pp[k] += h;
    pm[k] -= h;
    CMatrix fd = (evaluate_symbol(m, ComplexMomentum::real(pp)).matrix -
                  evaluate_symbol(m, ComplexMomentum::real(pm)).matrix) / (2 * h);
    CHECK((symbol_derivative(m, p, k) - fd).norm() < 1e-8);
  }
}

TEST_CASE("jump hulls") {
  Polytope h = jump_hull(load_model(kHadamard));
  CHECK(h.support(RVector::Ones(1)) == doctest::Approx(1.0));
  CHECK(h.support(-RVector::Ones(1)) == doctest::Approx(1.0));
  Polytope sh = jump_hull(load_model(kShift));
  CHECK(sh.vertices().size() == 1);
  CHECK(sh.vertices()[0][0] == 1.0);
  Polytope sp = jump_hull(catalog_get("spherical3d").model);
  CHECK(sp.contains(RVector::Ones(3)));
  CHECK(sp.support(RVector::Ones(3).normalized()) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
  CHECK(gauge(augmented_jump_hull(catalog_get("spherical3d").model), RVector::Constant(3, 1.2)) ==
        doctest::Approx(1.2).epsilon(1e-12));
}

TEST_CASE("coefficient norm sum of the non-convex hamiltonian") {
  // cos p1 cos p2 - sin p1: four diagonal hoppings of 1/4 and two axis hoppings of 1/2.
  LatticeModel m = catalog_get("nonconvex2d").model;
  CHECK(m.jumps().size() == 6);
  CHECK(m.coefficient_norm_sum() == doctest::Approx(2.0).epsilon(1e-14));
}

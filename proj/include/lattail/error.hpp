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

#include <stdexcept>
#include <string>

namespace lattail {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Model document violates the schema or a model invariant.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Iterative numerics did not converge or produced non-finite values.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Group velocities were requested at a momentum with a near-degenerate spectrum.
class DegeneratePoint : public Error {
 public:
  DegeneratePoint(std::string where, double gap)
      : Error("degenerate spectrum at " + where + " (gap " + std::to_string(gap) + ")"),
        gap_(gap) {}
  double gap() const noexcept { return gap_; }

 private:
  double gap_;
};

/// Boundary expansion preconditions failed.
class BoundaryError : public Error {
 public:
  enum class Reason { NonUniqueMaximizer, DegenerateMaximizer, ThirdDerivativeUnstable };
  BoundaryError(Reason reason, const std::string& detail)
      : Error(name(reason) + ": " + detail), reason_(reason) {}
  Reason reason() const noexcept { return reason_; }

  static std::string name(Reason r) {
    switch (r) {
      case Reason::NonUniqueMaximizer: return "NonUniqueMaximizer";
      case Reason::DegenerateMaximizer: return "DegenerateMaximizer";
      case Reason::ThirdDerivativeUnstable: return "ThirdDerivativeUnstable";
    }
    return "BoundaryError";
  }

 private:
  Reason reason_;
};

/// Polytope query outside its domain (e.g. gauge of a hull without interior origin).
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Too few usable points for a fit.
class InsufficientData : public Error {
 public:
  using Error::Error;
};

/// Lattice box for an evolution exceeds the memory budget.
class BoxTooLarge : public Error {
 public:
  BoxTooLarge(std::size_t required, std::size_t budget)
      : Error("evolution box needs " + std::to_string(required) + " bytes, budget is " +
              std::to_string(budget)),
        required_(required) {}
  std::size_t required_bytes() const noexcept { return required_; }

 private:
  std::size_t required_;
};

/// File I/O or CSV structure problem.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace lattail

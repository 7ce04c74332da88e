#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <stdexcept>
#include <string>

namespace nsch {

using Scalar = double;
using Index  = Eigen::Index;

/// Flat per-cell or per-face data; all field types wrap one of these.
using Array = Eigen::ArrayXd;

using Vector = Eigen::VectorXd;

/// Base for all failures raised by the library.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// An iterative solver stopped without meeting its tolerance.
struct NonConvergenceError : Error {
  NonConvergenceError(const std::string& what, Scalar residual, int iterations)
      : Error(what), residual(residual), iterations(iterations) {}
  Scalar residual;
  int iterations;
};

/// Time-step restriction violated; carries a suggested replacement step.
struct CflError : Error {
  CflError(const std::string& what, Scalar suggested_dt)
      : Error(what), suggested_dt(suggested_dt) {}
  Scalar suggested_dt;
};

/// Per-step energy audit failed beyond tolerance while in strict mode.
struct EnergyViolationError : Error {
  EnergyViolationError(const std::string& what, Scalar violation, Scalar tolerance)
      : Error(what), violation(violation), tolerance(tolerance) {}
  Scalar violation;
  Scalar tolerance;
};

}  // namespace nsch

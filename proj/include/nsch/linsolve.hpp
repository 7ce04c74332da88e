#pragma once

#include "nsch/types.hpp"

#include <functional>

namespace nsch {

/// Compressed-row sparse operator. Construction validates structure
/// (sorted in-range column indices, finite coefficients).
class SparseOperator {
 public:
  SparseOperator() = default;
  explicit SparseOperator(Eigen::SparseMatrix<Scalar> m);

  Index rows() const { return mat_.rows(); }
  Index cols() const { return mat_.cols(); }
  const Eigen::SparseMatrix<Scalar>& matrix() const { return mat_; }

  Vector apply(const Vector& x) const { return mat_ * x; }

 private:
  Eigen::SparseMatrix<Scalar> mat_;
};

struct LinearSolveStats {
  int iterations = 0;
  Scalar residual = 0.0;  // recomputed ||Ax - b||, not the iteration estimate
};

/// Jacobi is the default; the coupled phase Jacobian needs the incomplete-LU
/// preconditioner (plain diagonal scaling breaks down on its stiff
/// fourth-order coupling).
enum class Preconditioner { jacobi, ilut };

/// BiCGStab. Returns x with ||Ax - b|| <= tol ||b||; the residual is
/// recomputed independently and a NonConvergenceError carries it on failure.
Vector bicgstab(const SparseOperator& A, const Vector& b, const Vector& x0, Scalar tol,
                int max_iter, LinearSolveStats* stats = nullptr,
                Preconditioner precond = Preconditioner::jacobi);

struct NewtonConfig {
  Scalar abs_tol = 1e-10;
  Scalar rel_tol = 1e-9;
  int max_iter = 50;
  Scalar damping = 1.0;       // initial step fraction, in (0, 1]
  Scalar shrink = 0.5;        // line-search backtracking factor
  int max_backtracks = 30;
  Scalar linear_tol = 1e-12;  // inner BiCGStab relative tolerance
  Preconditioner precond = Preconditioner::jacobi;
};

struct NewtonStats {
  int iterations = 0;
  Scalar residual_norm = 0.0;
  int linear_iterations = 0;  // accumulated over all Newton steps
  Scalar linear_residual = 0.0;
};

using ResidualFn = std::function<Vector(const Vector&)>;
using JacobianFn = std::function<SparseOperator(const Vector&)>;

/// Damped Newton with a monotone line search on ||residual||_inf. The full
/// step is tried first; damping only engages when it fails to decrease the
/// residual.
Vector newton_solve(const ResidualFn& residual, const JacobianFn& jacobian, const Vector& x0,
                    const NewtonConfig& cfg, NewtonStats* stats = nullptr);

}  // namespace nsch

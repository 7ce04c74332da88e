#include "nsch/linsolve.hpp"

#include <Eigen/IterativeLinearSolvers>

#include <algorithm>
#include <cmath>
#include <limits>

namespace nsch {

SparseOperator::SparseOperator(Eigen::SparseMatrix<Scalar> m) : mat_(std::move(m)) {
  mat_.makeCompressed();
  for (Index k = 0; k < mat_.nonZeros(); ++k)
    if (!std::isfinite(mat_.valuePtr()[k]))
      throw Error("SparseOperator: non-finite coefficient");
  // compressed Eigen storage keeps inner indices sorted and in range
}

namespace {

template <class Solver>
Vector run_bicgstab(Solver& solver, const SparseOperator& A, const Vector& b, const Vector& x0,
                    Scalar tol, int max_iter, LinearSolveStats* stats) {
  solver.setTolerance(tol);
  solver.setMaxIterations(max_iter);
  solver.compute(A.matrix());
  Vector x = solver.solveWithGuess(b, x0);

  // never trust the iteration's own estimate
  const Scalar res = (A.apply(x) - b).norm();
  if (stats) {
    stats->iterations = int(solver.iterations());
    stats->residual = res;
  }
  if (!x.allFinite() || res > tol * b.norm())
    throw NonConvergenceError("bicgstab: no convergence, |Ax-b| = " + std::to_string(res) +
                                  " vs tol*|b| = " + std::to_string(tol * b.norm()),
                              res, int(solver.iterations()));
  return x;
}

}  // namespace

Vector bicgstab(const SparseOperator& A, const Vector& b, const Vector& x0, Scalar tol,
                int max_iter, LinearSolveStats* stats, Preconditioner precond) {
  if (A.rows() != A.cols() || A.rows() != b.size())
    throw Error("bicgstab: shape mismatch");
  if (b.norm() == 0.0) {
    if (stats) *stats = {0, 0.0};
    return Vector::Zero(b.size());
  }
  if (precond == Preconditioner::ilut) {
    Eigen::BiCGSTAB<Eigen::SparseMatrix<Scalar>, Eigen::IncompleteLUT<Scalar>> solver;
    solver.preconditioner().setDroptol(1e-8);
    solver.preconditioner().setFillfactor(20);
    return run_bicgstab(solver, A, b, x0, tol, max_iter, stats);
  }
  Eigen::BiCGSTAB<Eigen::SparseMatrix<Scalar>, Eigen::DiagonalPreconditioner<Scalar>> solver;
  return run_bicgstab(solver, A, b, x0, tol, max_iter, stats);
}

Vector newton_solve(const ResidualFn& residual, const JacobianFn& jacobian, const Vector& x0,
                    const NewtonConfig& cfg, NewtonStats* stats) {
  if (!(cfg.abs_tol > 0.0 && cfg.rel_tol > 0.0 && cfg.max_iter >= 1))
    throw Error("newton_solve: invalid configuration");
  Vector x = x0;
  Vector r = residual(x);
  if (!r.allFinite()) throw Error("newton_solve: non-finite residual at initial guess");
  Scalar rnorm = r.lpNorm<Eigen::Infinity>();
  const Scalar r0norm = rnorm;
  int lin_iters = 0;
  Scalar lin_res = 0.0;

  int it = 0;
  for (; it < cfg.max_iter; ++it) {
    if (rnorm <= cfg.abs_tol || rnorm <= cfg.rel_tol * r0norm) break;

    const SparseOperator J = jacobian(x);
    LinearSolveStats ls;
    // near the floating-point floor of the residual evaluation a fixed
    // relative tolerance becomes unreachable; loosen as |r| approaches
    // abs_tol, and retry once with a coarse tolerance before giving up
    const Scalar inner_tol =
        std::clamp(0.01 * cfg.abs_tol / std::max(rnorm, 1e-300), cfg.linear_tol, 1e-4);
    Vector dx;
    try {
      dx = bicgstab(J, -r, Vector::Zero(x.size()), inner_tol, int(2 * x.size()) + 50, &ls,
                    cfg.precond);
    } catch (const NonConvergenceError&) {
      dx = bicgstab(J, -r, Vector::Zero(x.size()), 1e-6, int(2 * x.size()) + 50, &ls,
                    cfg.precond);
    }
    lin_iters += ls.iterations;
    lin_res = ls.residual;

    Scalar step = cfg.damping;
    bool accepted = false;
    for (int bt = 0; bt <= cfg.max_backtracks; ++bt) {
      Vector x_try = x + step * dx;
      Vector r_try = residual(x_try);
      const Scalar rn_try = r_try.allFinite() ? r_try.lpNorm<Eigen::Infinity>()
                                              : std::numeric_limits<Scalar>::infinity();
      if (rn_try < rnorm) {
        x = std::move(x_try);
        r = std::move(r_try);
        rnorm = rn_try;
        accepted = true;
        break;
      }
      step *= cfg.shrink;
    }
    if (!accepted)
      throw NonConvergenceError("newton_solve: line search stalled at |r| = " +
                                    std::to_string(rnorm),
                                rnorm, it);
  }

  if (!(rnorm <= cfg.abs_tol || rnorm <= cfg.rel_tol * r0norm))
    throw NonConvergenceError(
        "newton_solve: max iterations with |r| = " + std::to_string(rnorm), rnorm, it);
  if (stats) {
    stats->iterations = it;
    stats->residual_norm = rnorm;
    stats->linear_iterations = lin_iters;
    stats->linear_residual = lin_res;
  }
  return x;
}

}  // namespace nsch

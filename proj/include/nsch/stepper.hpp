#pragma once

#include "nsch/diagnostics.hpp"
#include "nsch/linsolve.hpp"
#include "nsch/state.hpp"

namespace nsch {

struct StepConfig {
  Scalar dt = 1e-3;
  Scalar cfl_safety = 0.5;   // in (0, 1]
  Scalar delta_reg = 1e-10;  // vacuum lift in the chemical-potential relation
  NewtonConfig newton;
  bool frozen_velocity = false;  // skip the momentum update (phase sub-flow)
  bool strict_energy = false;    // abort on an energy-audit violation
  Scalar tol_energy = 0.0;       // audit tolerance, pinned by calibration
};

/// Donor-cell mass flux rho_up * u on interior faces; boundary fluxes are
/// zero by the velocity tag, so divergence sums telescope exactly.
VectorField mass_flux(const ScalarField& rho, const VectorField& u);

struct StepResult {
  State next;
  DiagnosticsRecord rec;
};

/// One semi-implicit step of the coupled system, split as
/// continuity -> phase -> momentum. The splitting keeps both discrete mass
/// identities exact in flux form, and the convex/concave treatment of the
/// mixing energy makes the phase sub-flow unconditionally energy stable.
class Stepper {
 public:
  Stepper(const Grid& grid, const PhysicalParams& params, const RegularizedPotential& reg,
          const StepConfig& cfg, Scalar M_r);

  /// First-order upwind finite-volume transport; positivity preserving
  /// under the CFL precondition, total mass exact.
  ScalarField step_continuity(const ScalarField& rho, const VectorField& u, Scalar dt) const;

  struct PhaseResult {
    ScalarField c;
    ScalarField mu;
    NewtonStats stats;
  };

  /// Coupled implicit solve of the transported phase equation and the
  /// chemical-potential relation, F_eps implicit (convex), the -theta0 c
  /// term explicit (concave).
  PhaseResult step_phase(const ScalarField& rho_next, const ScalarField& rho,
                         const VectorField& u, const ScalarField& c, const ScalarField& mu_prev,
                         Scalar dt) const;

  struct MomentumResult {
    VectorField momentum;
    LinearSolveStats stats;
  };

  /// Explicit upwind convection and pressure/capillary forces, implicit
  /// viscous operator with coefficients frozen at c_next.
  MomentumResult step_momentum(const ScalarField& rho_next, const VectorField& momentum,
                               const VectorField& u, const ScalarField& c_next, Scalar dt) const;

  /// Full step with the per-step energy audit.
  StepResult step(const State& s) const;

  const StepConfig& config() const { return cfg_; }
  void set_tol_energy(Scalar tol) { cfg_.tol_energy = tol; }
  void set_strict(bool strict) { cfg_.strict_energy = strict; }
  Scalar mean_ratio() const { return M_r_; }

  /// Newton residual and Jacobian of the phase system, exposed so tests can
  /// check the Jacobian against finite differences.
  Vector phase_residual(const Vector& x, const ScalarField& rho_next, const ScalarField& rho,
                        const ScalarField& c_old, const ScalarField& div_flux_c,
                        Scalar dt) const;
  SparseOperator phase_jacobian(const Vector& x, const ScalarField& rho_next, Scalar dt) const;

 private:
  Grid grid_;
  PhysicalParams params_;
  RegularizedPotential reg_;
  StepConfig cfg_;
  Scalar M_r_;
  Eigen::SparseMatrix<Scalar> lap_;  // cells Laplacian, Neumann ghosts
};

/// Symmetric positive matrix of the viscous quadratic form plus the face
/// mass: diag(rho_f vol) + dt * V with u^T V u = int S(c, grad u) : grad u.
Eigen::SparseMatrix<Scalar> viscous_system_matrix(const Grid& g, const ScalarField& c,
                                                  const ViscosityProfile& prof,
                                                  const Array& rho_face_x,
                                                  const Array& rho_face_y, Scalar dt);

/// div K on faces for the cell-centered capillary tensor (odd ghosts for
/// the off-diagonal entries at walls).
VectorField tensor_divergence_on_faces(const TensorField& t);

}  // namespace nsch

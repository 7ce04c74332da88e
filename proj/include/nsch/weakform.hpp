#pragma once

#include "nsch/simulation.hpp"

#include <functional>
#include <string>

namespace nsch {

/// Separable space-time test function psi(t) phi(x). psi comes from a
/// smooth compactly supported bump family on [0, T); phi is a tensor-product
/// polynomial (scalar tests) or a vector polynomial vanishing on the
/// boundary (momentum tests). Spatial derivatives are closed-form; psi is
/// tabulated at trajectory times and differentiated by centered differences,
/// which makes constant-in-time trajectories cancel exactly.
struct TestFunction {
  Scalar support_fraction = 0.75;  // psi support ends at this fraction of T
  bool half_bump = false;          // true: psi(0) > 0, support [0, T0)
  int degree = 2;                  // spatial polynomial degree
  Scalar scale = 1.0;              // overall multiplier (residuals are linear in it)

  Scalar psi(Scalar t, Scalar T) const;

  // scalar tests (no boundary condition)
  Scalar phi(const Grid& g, Scalar x, Scalar y) const;
  std::array<Scalar, 2> grad_phi(const Grid& g, Scalar x, Scalar y) const;

  // momentum tests, zero on the whole boundary
  Scalar phi_vec(const Grid& g, int comp, Scalar x, Scalar y) const;
  Scalar dphi_vec(const Grid& g, int comp, int dax, Scalar x, Scalar y) const;
};

/// Renormalization pair: bounded continuous b on [0, inf) and
/// B(rho) = B(1) + int_1^rho b(z)/z^2 dz in closed form.
struct RenormalizationPair {
  std::string name;
  std::function<Scalar(Scalar)> b;
  std::function<Scalar(Scalar)> B;

  static RenormalizationPair zero_one();            // b = 0, B = 1
  static RenormalizationPair truncation(Scalar k);  // b = min(z, k), B = L_k, L_k(1) = 0
};

// Residuals |LHS - RHS| of the limit weak formulations on a stored
// trajectory, midpoint quadrature in space and trapezoid in time.

Scalar residual_renormalized_continuity(const Trajectory& traj, const RenormalizationPair& pair,
                                        const TestFunction& test);

Scalar residual_momentum(const Trajectory& traj, const TestFunction& test);

Scalar residual_concentration(const Trajectory& traj, const TestFunction& test);

/// The chemical-potential identity. `open_time` integrates against an
/// interior bump (test class open at t = 0), `closed_time` against the
/// half-open bump; both conventions are reported. `split_form_max` is the
/// worst per-step residual of the scheme's own splitting (concave term at
/// the previous level, vacuum lift included), which the stepper enforces at
/// Newton tolerance.
struct ChemicalPotentialResidual {
  Scalar open_time = 0.0;
  Scalar closed_time = 0.0;
  Scalar split_form_max = 0.0;
};

ChemicalPotentialResidual residual_chemical_potential(const Trajectory& traj,
                                                      const TestFunction& test);

struct EnergyAuditReport {
  bool ok = true;
  Scalar worst_margin = 0.0;  // min over steps of E0 - E(tau) - cumulative dissipation
  int worst_step = 0;
  Scalar accumulated_tol = 0.0;
};

/// E(tau) + int_0^tau (S : grad u + |grad mu|^2) <= E0 + accumulated
/// tolerance, checked at every stored step.
EnergyAuditReport audit_energy_inequality(const Trajectory& traj);

/// All residual rows on one trajectory: the renormalized continuity
/// equation for each library (b, B) pair, momentum, concentration, and both
/// time conventions of the chemical-potential identity.
struct ResidualSet {
  std::vector<std::string> names;
  std::vector<Scalar> values;
};

ResidualSet evaluate_residuals(const Trajectory& traj, const TestFunction& test);

/// Reruns the base scenario under simultaneous (h, dt) halving and reports
/// residuals per level with observed orders between levels.
struct RefinementStudy {
  std::vector<std::string> names;
  std::vector<std::vector<Scalar>> residuals;  // [row][level]
  std::vector<std::vector<Scalar>> orders;     // [row][level-1]
  bool all_orders_at_least(Scalar min_order) const;
};

RefinementStudy weakform_refinement_study(const Trajectory& base, int refinements,
                                          const TestFunction& test);

}  // namespace nsch

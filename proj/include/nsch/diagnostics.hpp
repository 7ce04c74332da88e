#pragma once

#include "nsch/constitutive.hpp"
#include "nsch/state.hpp"

#include <string>
#include <vector>

namespace nsch {

/// Everything tracked per step: conserved masses, the regularized total
/// energy, dissipation increments, the chemical/free-energy estimate
/// integrals, the phase-bound defect, and field ranges. Solver statistics
/// and the energy-audit outcome are appended at the end of each CSV row.
struct DiagnosticsRecord {
  Scalar time = 0.0;
  Scalar M = 0.0;
  Scalar M_c = 0.0;
  Scalar E_eps = 0.0;
  Scalar visc_dissipation = 0.0;  // int S : grad u at the new level
  Scalar mu_dissipation = 0.0;    // int |grad mu|^2 at the new level
  Scalar ne1 = 0.0;               // int rho F'_eps(c) (c - M_r)
  Scalar ne1_abs = 0.0;           // int rho |F'_eps(c)|
  Scalar mu_h1 = 0.0;             // ||mu||_{W^{1,2}}
  Scalar rho_fprime_sq = 0.0;     // int rho |F'_eps(c)|^2
  Scalar phase_defect = 0.0;      // int rho (|c| - 1)_+^2
  Scalar pressure_norm = 0.0;     // ||p(rho)||_{L^{q(gamma)}}
  Scalar c_min = 0.0, c_max = 0.0;
  Scalar rho_min = 0.0, rho_max = 0.0;

  // appended: solver statistics, then the energy audit
  int newton_iterations = 0;
  Scalar newton_residual = 0.0;
  int phase_linear_iterations = 0;
  Scalar phase_linear_residual = 0.0;
  int viscous_iterations = 0;
  Scalar viscous_residual = 0.0;
  Scalar energy_margin = 0.0;  // E(n) - E(n+1) - dt (Dv + Dmu)
  int energy_ok = 1;
  Scalar tol_energy = 0.0;
};

/// Regularized total energy, assembled from the same discrete forms the
/// stepper audits: kinetic on faces, elastic/mixing at cells, gradient
/// energy on faces.
Scalar total_energy_eps(const State& s, const PhysicalParams& params,
                        const RegularizedPotential& reg);

/// int S(c, grad u) : grad u over cells; nonnegative by construction.
Scalar viscous_dissipation(const VectorField& u, const ScalarField& c,
                           const ViscosityProfile& prof);

/// int |grad mu|^2 over faces.
Scalar mu_dissipation(const ScalarField& mu);

Scalar pressure_exponent(Scalar gamma);  // q(gamma) = min(5/3 - 1/gamma, 3/2)

/// Fills the state-derived entries (dissipations and solver statistics are
/// the stepper's to fill).
DiagnosticsRecord record(const State& s, const PhysicalParams& params,
                         const RegularizedPotential& reg, Scalar M_r);

/// The four uniform-estimate time-series norms over [0, T], by trapezoid
/// on uniformly spaced records.
struct TimeseriesSummary {
  Scalar ne1_l2 = 0.0;             // ||ne1||_{L^2(0,T)}
  Scalar ne1_abs_l2 = 0.0;         // ||ne1_abs||_{L^2(0,T)}
  Scalar mu_l2w12 = 0.0;           // ||mu||_{L^2(0,T;W^{1,2})}
  Scalar sqrt_rho_fprime_l2 = 0.0; // ||sqrt(rho) F'_eps(c)||_{L^2(L^2)}
};

TimeseriesSummary timeseries_norms(const std::vector<DiagnosticsRecord>& records, Scalar T);

/// CSV schema: fixed column order as listed in DiagnosticsRecord, solver
/// statistics and audit fields appended. All quantities nondimensional.
std::string diagnostics_csv_header();
std::string diagnostics_csv_row(const DiagnosticsRecord& r);
void write_diagnostics_csv(const std::string& path, const std::vector<DiagnosticsRecord>& records);
std::vector<DiagnosticsRecord> read_diagnostics_csv(const std::string& path);

}  // namespace nsch

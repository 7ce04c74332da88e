#pragma once

#include "nsch/config.hpp"
#include "nsch/diagnostics.hpp"
#include "nsch/stepper.hpp"

#include <string>
#include <vector>

namespace nsch {

/// Raised when the initial data fails the admissibility hypotheses; carries
/// the named conditions for the CLI to print.
struct ValidationFailure : Error {
  ValidationFailure(const std::string& what, std::vector<Violation> v)
      : Error(what), violations(std::move(v)) {}
  std::vector<Violation> violations;
};

/// A config resolved into runnable pieces: grid, parameters, admissible
/// initial data, and the step configuration with dt pinned (cfl-auto uses
/// the initial velocity plus the sound speed).
struct Scenario {
  Scenario(const Grid& g, const PhysicalParams& p, const RegularizedPotential& r,
           AdmissibleInitialData d)
      : grid(g), params(p), reg(r), data(std::move(d)) {}
  Grid grid;
  PhysicalParams params;
  RegularizedPotential reg;
  AdmissibleInitialData data;
  StepConfig step;
  Scalar T = 1.0;
  int n_steps = 1;
};

Scenario resolve_scenario(const RunConfig& cfg);

/// Ordered sequence of states at uniform dt, plus the per-step diagnostics.
struct Trajectory {
  RunConfig config;   // resolved source configuration
  Grid grid;
  Scalar dt = 0.0;
  Scalar eps = 0.0;
  Scalar M_r = 0.0;
  std::vector<State> states;               // one per step, including step 0
  std::vector<DiagnosticsRecord> records;  // aligned with states
};

/// Runs the scenario to time T. The energy-audit tolerance is pinned at run
/// start: a short calibration pass measures the worst per-step defect of
/// the explicit terms (scaling with dt^2) and fixes
///   tol_energy = 10 * worst + floor(newton tolerance);
/// for the frozen-velocity sub-flow started from rest the tolerance is the
/// Newton floor alone. Identical configs produce bit-identical records.
Trajectory run_trajectory(const RunConfig& cfg, bool keep_states = true);

/// Writes diagnostics.csv, config.resolved, and snapshots every
/// `snapshot_interval` steps (plus the final state) under cfg.output_dir.
void write_trajectory(const std::string& dir, const Trajectory& traj);

/// Loads a trajectory written with snapshot_interval = 1.
Trajectory load_trajectory(const std::string& dir);

}  // namespace nsch

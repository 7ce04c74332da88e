#pragma once

#include "nsch/state.hpp"

#include <optional>
#include <string>
#include <vector>

namespace nsch {

/// Fully resolved run configuration. Every key of the line-oriented
/// `section.key = value` format maps onto one field; unknown keys are
/// rejected and all physical constraints are re-validated at parse time.
struct RunConfig {
  // grid
  int dim = 1;
  Index cells_x = 64;
  Index cells_y = 64;
  Scalar length_x = 1.0;
  Scalar length_y = 1.0;

  // physics
  Scalar gamma = 2.0;
  Scalar theta = 1.0;
  Scalar theta0 = 2.0;
  std::string eta_spec = "rational:0.5,1.5";
  std::string lambda_spec = "constant:0";

  // potential
  Scalar eps = 0.1;

  // initial data: preset or field files
  PresetSpec preset;
  std::string rho_file;  // optional grid-binary overrides
  std::string m_file;    // prefix, _x/_y.nschf appended
  std::string c_file;

  // time
  Scalar T = 1.0;
  Scalar dt = 0.0;  // 0 selects cfl-auto
  Scalar cfl_safety = 0.5;
  bool frozen_velocity = false;

  // stepper
  Scalar delta_reg = 1e-10;
  Scalar newton_abs_tol = 1e-10;
  Scalar newton_rel_tol = 1e-9;
  int newton_max_iter = 50;

  // output
  std::string output_dir = "out";
  int snapshot_interval = 0;  // 0 = none, 1 = every step, ...
  bool strict_energy = true;
  bool csv_fields = false;

  // sweep
  std::vector<Scalar> eps_schedule = {1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
};

struct ParseResult {
  std::optional<RunConfig> config;
  std::vector<std::string> errors;  // every problem, not first-error-only
  bool ok() const { return errors.empty(); }
};

ParseResult parse_config(const std::string& text);
ParseResult parse_config_file(const std::string& path);

/// The config re-serialized with every key explicit; parsing it back
/// reproduces the same configuration.
std::string serialize_config(const RunConfig& cfg);

/// One line per key: name, default, description. Backs `--help-config`.
std::string config_reference();

}  // namespace nsch

#include "nsch/simulation.hpp"

#include "nsch/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace fs = std::filesystem;

namespace nsch {

Scenario resolve_scenario(const RunConfig& cfg) {
  const Grid grid = (cfg.dim == 1)
                        ? Grid::make_1d(cfg.cells_x, cfg.length_x)
                        : Grid::make_2d(cfg.cells_x, cfg.cells_y, cfg.length_x, cfg.length_y);
  const PhysicalParams params(cfg.gamma, cfg.theta, cfg.theta0,
                              ViscosityProfile::from_specs(cfg.eta_spec, cfg.lambda_spec));
  const RegularizedPotential reg(params.potential, cfg.eps);

  InitialFields init = build_preset(cfg.preset, grid);
  if (!cfg.rho_file.empty()) init.rho0 = read_scalar_field(cfg.rho_file, BcTag::none);
  if (!cfg.c_file.empty()) init.c0 = read_scalar_field(cfg.c_file, BcTag::neumann_zero);
  if (!cfg.m_file.empty()) init.m0 = read_vector_field(cfg.m_file, grid);

  ValidationResult vr = validate_initial_data(init.rho0, init.m0, init.c0, params);
  if (!vr.ok()) {
    std::string what = "initial data rejected:";
    for (const auto& v : vr.violations) what += "\n  [" + v.condition + "] " + v.message;
    throw ValidationFailure(what, vr.violations);
  }

  Scenario sc(grid, params, reg, std::move(*vr.data));
  sc.T = cfg.T;
  sc.step.cfl_safety = cfg.cfl_safety;
  sc.step.delta_reg = cfg.delta_reg;
  sc.step.newton.abs_tol = cfg.newton_abs_tol;
  sc.step.newton.rel_tol = cfg.newton_rel_tol;
  sc.step.newton.max_iter = cfg.newton_max_iter;
  sc.step.frozen_velocity = cfg.frozen_velocity;
  sc.step.strict_energy = cfg.strict_energy;

  Scalar dt = cfg.dt;
  if (dt <= 0.0) {
    // cfl-auto: material speed plus the acoustic speed of the initial data
    const State s0 = build_initial_state(sc.data, reg, cfg.delta_reg);
    const Scalar umax = s0.velocity().max_abs();
    const Scalar rho_max = sc.data.rho0.values.maxCoeff();
    const Scalar cs = std::sqrt(cfg.gamma * std::pow(std::max(rho_max, Scalar(1e-12)),
                                                     cfg.gamma - 1.0));
    dt = cfg.cfl_safety * grid.min_spacing() / (umax + cs);
  }
  // land exactly on T with uniform steps
  sc.n_steps = std::max(1, int(std::llround(std::ceil(cfg.T / dt - 1e-9))));
  sc.step.dt = cfg.T / Scalar(sc.n_steps);
  return sc;
}

namespace {

Scalar audit_floor(const NewtonConfig& newton, Scalar e0_scale) {
  return 50.0 * newton.abs_tol * (1.0 + std::abs(e0_scale)) +
         1e3 * std::numeric_limits<Scalar>::epsilon() * (1.0 + std::abs(e0_scale));
}

}  // namespace

Trajectory run_trajectory(const RunConfig& cfg, bool keep_states) {
  Scenario sc = resolve_scenario(cfg);
  const State s0 = build_initial_state(sc.data, sc.reg, sc.step.delta_reg);
  const Scalar E0 = total_energy_eps(s0, sc.params, sc.reg);

  Scalar tol = audit_floor(sc.step.newton, E0);
  const bool from_rest = (s0.momentum.max_abs() == 0.0);
  if (!(sc.step.frozen_velocity && from_rest)) {
    // calibration pass: measure the dt^2-scale defect of the explicit
    // terms; early convective dissipation can mask the acoustic exchange,
    // so an a-priori dt^2 term rides along with the measured one
    StepConfig calib = sc.step;
    calib.strict_energy = false;
    calib.tol_energy = std::numeric_limits<Scalar>::infinity();
    Stepper stepper(sc.grid, sc.params, sc.reg, calib, sc.data.M_r);
    State s = s0;
    Scalar worst = 0.0;
    const int k = std::min(50, sc.n_steps);
    for (int i = 0; i < k; ++i) {
      StepResult r = stepper.step(s);
      worst = std::max(worst, -r.rec.energy_margin);
      s = std::move(r.next);
    }
    tol += 10.0 * worst + 0.1 * sc.step.dt * sc.step.dt * std::max(Scalar(1), std::abs(E0));
  }

  StepConfig run_cfg = sc.step;
  run_cfg.tol_energy = tol;
  Stepper stepper(sc.grid, sc.params, sc.reg, run_cfg, sc.data.M_r);

  Trajectory traj;
  traj.config = cfg;
  traj.config.dt = sc.step.dt;  // resolved
  traj.grid = sc.grid;
  traj.dt = sc.step.dt;
  traj.eps = sc.reg.eps();
  traj.M_r = sc.data.M_r;

  DiagnosticsRecord rec0 = record(s0, sc.params, sc.reg, sc.data.M_r);
  rec0.tol_energy = tol;
  traj.records.push_back(rec0);
  if (keep_states) traj.states.push_back(s0);

  State s = s0;
  for (int i = 0; i < sc.n_steps; ++i) {
    StepResult r = stepper.step(s);
    traj.records.push_back(r.rec);
    s = std::move(r.next);
    if (keep_states) traj.states.push_back(s);
  }
  if (!keep_states) traj.states.push_back(s);  // final state always available
  return traj;
}

void write_trajectory(const std::string& dir, const Trajectory& traj) {
  fs::create_directories(dir);
  {
    std::ofstream out(dir + "/config.resolved", std::ios::binary);
    if (!out) throw Error("cannot write '" + dir + "/config.resolved'");
    out << serialize_config(traj.config);
  }
  write_diagnostics_csv(dir + "/diagnostics.csv", traj.records);

  const int k = traj.config.snapshot_interval;
  if (k > 0 && !traj.states.empty()) {
    for (std::size_t i = 0; i < traj.states.size(); i += std::size_t(k))
      write_state(dir, traj.states[i], int(i));
    write_state(dir, traj.states.back(), int(traj.states.size() - 1));
    if (traj.config.csv_fields)
      for (std::size_t i = 0; i < traj.states.size(); i += std::size_t(k)) {
        write_field_csv(dir + "/rho_" + std::to_string(i) + ".csv", traj.states[i].rho);
        write_field_csv(dir + "/c_" + std::to_string(i) + ".csv", traj.states[i].c);
      }
  }
}

Trajectory load_trajectory(const std::string& dir) {
  std::ifstream in(dir + "/config.resolved");
  if (!in) throw Error("'" + dir + "' does not hold a trajectory (missing config.resolved)");
  std::stringstream ss;
  ss << in.rdbuf();
  ParseResult pr = parse_config(ss.str());
  if (!pr.ok()) throw Error("stored config in '" + dir + "' fails to parse");

  Trajectory traj;
  traj.config = *pr.config;
  traj.records = read_diagnostics_csv(dir + "/diagnostics.csv");
  if (traj.records.size() < 2) throw Error("trajectory in '" + dir + "' has fewer than 2 records");
  traj.dt = traj.records[1].time - traj.records[0].time;
  traj.eps = traj.config.eps;
  traj.grid = (traj.config.dim == 1)
                  ? Grid::make_1d(traj.config.cells_x, traj.config.length_x)
                  : Grid::make_2d(traj.config.cells_x, traj.config.cells_y,
                                  traj.config.length_x, traj.config.length_y);
  if (traj.config.snapshot_interval != 1)
    throw Error("trajectory in '" + dir + "' was not stored at every step "
                "(output.snapshot_interval must be 1 for auditing)");
  traj.states.reserve(traj.records.size());
  for (std::size_t i = 0; i < traj.records.size(); ++i) {
    State s = read_state(dir, traj.grid, int(i), traj.config.eps);
    s.time = traj.records[i].time;
    traj.states.push_back(std::move(s));
  }
  // M_r from the stored initial record
  traj.M_r = (traj.records[0].M > 0.0) ? traj.records[0].M_c / traj.records[0].M : 0.0;
  return traj;
}

}  // namespace nsch

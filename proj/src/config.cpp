#include "nsch/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace nsch {

namespace {

struct KeyDoc {
  const char* key;
  const char* fallback;
  const char* doc;
};

// every accepted key; --help-config is generated from this table
const KeyDoc kKeys[] = {
    {"grid.dim", "1", "spatial dimension, 1 or 2"},
    {"grid.cells_x", "64", "cells along x"},
    {"grid.cells_y", "64", "cells along y (2D only)"},
    {"grid.length_x", "1.0", "domain length along x"},
    {"grid.length_y", "1.0", "domain length along y (2D only)"},
    {"physics.gamma", "2.0", "adiabatic exponent, must satisfy gamma > 3/2"},
    {"physics.theta", "1.0", "entropy temperature, 0 < theta < theta0"},
    {"physics.theta0", "2.0", "critical temperature"},
    {"physics.eta", "rational:0.5,1.5",
     "shear viscosity profile: constant:V or rational:LO,HI"},
    {"physics.lambda", "constant:0", "bulk viscosity profile"},
    {"potential.eps", "0.1", "regularization level, in (0, 1/2)"},
    {"init.preset", "uniform", "uniform | spinodal | bubble | shear"},
    {"init.rho0", "1.0", "background density"},
    {"init.rho_amplitude", "0.0", "smooth cosine density bump amplitude"},
    {"init.c0", "0.0", "uniform concentration value"},
    {"init.mean", "0.0", "spinodal: target mean concentration M_r"},
    {"init.amplitude", "1e-3", "spinodal noise / shear velocity amplitude"},
    {"init.modes", "6", "spinodal: highest seeded cosine mode"},
    {"init.seed", "1", "seed for the portable perturbation generator"},
    {"init.radius", "0.25", "bubble radius"},
    {"init.width", "0.05", "bubble/shear interface width"},
    {"init.c_in", "0.9", "bubble interior concentration"},
    {"init.c_out", "-0.9", "bubble exterior concentration"},
    {"init.c_amplitude", "0.5", "shear stripe amplitude"},
    {"init.rho_file", "", "load rho0 from a field file instead of the preset"},
    {"init.m_file", "", "load momentum from field files (prefix, _x/_y appended)"},
    {"init.c_file", "", "load c0 from a field file"},
    {"time.T", "1.0", "final time"},
    {"time.dt", "0", "time step; 0 selects cfl-auto from the initial fields"},
    {"time.cfl_safety", "0.5", "CFL safety factor, in (0, 1]"},
    {"time.frozen_velocity", "false", "skip the momentum update (phase sub-flow)"},
    {"stepper.delta_reg", "1e-10", "vacuum lift in the chemical-potential relation"},
    {"stepper.newton_abs_tol", "1e-10", "Newton absolute tolerance"},
    {"stepper.newton_rel_tol", "1e-9", "Newton relative tolerance"},
    {"stepper.newton_max_iter", "50", "Newton iteration cap"},
    {"output.dir", "out", "output directory"},
    {"output.snapshot_interval", "0", "state snapshot cadence; 0 disables"},
    {"output.strict_energy", "true", "abort when the energy audit fails"},
    {"output.csv_fields", "false", "also export snapshot fields as CSV"},
    {"sweep.eps_schedule", "1e-1,3e-2,1e-2,3e-3,1e-3",
     "strictly decreasing schedule in (0, 1/2)"},
};

bool parse_bool(const std::string& v, bool& out) {
  if (v == "true" || v == "1") { out = true; return true; }
  if (v == "false" || v == "0") { out = false; return true; }
  return false;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

ParseResult parse_config(const std::string& text) {
  ParseResult res;
  RunConfig cfg;
  std::map<std::string, std::string> kv;

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      res.errors.push_back("line " + std::to_string(lineno) + ": expected 'section.key = value'");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    bool known = false;
    for (const auto& k : kKeys)
      if (key == k.key) { known = true; break; }
    if (!known) {
      res.errors.push_back("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
      continue;
    }
    if (kv.count(key))
      res.errors.push_back("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    kv[key] = val;
  }

  auto take = [&](const char* key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    return it->second;
  };
  auto num = [&](const char* key, Scalar& slot) {
    if (auto v = take(key)) {
      try {
        std::size_t pos = 0;
        slot = std::stod(*v, &pos);
        if (pos != v->size()) throw std::invalid_argument("");
      } catch (...) {
        res.errors.push_back(std::string(key) + ": not a number: '" + *v + "'");
      }
    }
  };
  auto integer = [&](const char* key, auto& slot) {
    if (auto v = take(key)) {
      try {
        std::size_t pos = 0;
        const long long x = std::stoll(*v, &pos);
        if (pos != v->size()) throw std::invalid_argument("");
        slot = decltype(slot)(x);
      } catch (...) {
        res.errors.push_back(std::string(key) + ": not an integer: '" + *v + "'");
      }
    }
  };
  auto boolean = [&](const char* key, bool& slot) {
    if (auto v = take(key)) {
      if (!parse_bool(*v, slot))
        res.errors.push_back(std::string(key) + ": expected true/false, got '" + *v + "'");
    }
  };
  auto str = [&](const char* key, std::string& slot) {
    if (auto v = take(key)) slot = *v;
  };

  integer("grid.dim", cfg.dim);
  integer("grid.cells_x", cfg.cells_x);
  integer("grid.cells_y", cfg.cells_y);
  num("grid.length_x", cfg.length_x);
  num("grid.length_y", cfg.length_y);
  num("physics.gamma", cfg.gamma);
  num("physics.theta", cfg.theta);
  num("physics.theta0", cfg.theta0);
  str("physics.eta", cfg.eta_spec);
  str("physics.lambda", cfg.lambda_spec);
  num("potential.eps", cfg.eps);
  str("init.preset", cfg.preset.name);
  num("init.rho0", cfg.preset.rho0);
  num("init.rho_amplitude", cfg.preset.rho_amplitude);
  num("init.c0", cfg.preset.c0);
  num("init.mean", cfg.preset.mean);
  num("init.amplitude", cfg.preset.amplitude);
  integer("init.modes", cfg.preset.modes);
  integer("init.seed", cfg.preset.seed);
  num("init.radius", cfg.preset.radius);
  num("init.width", cfg.preset.width);
  num("init.c_in", cfg.preset.c_in);
  num("init.c_out", cfg.preset.c_out);
  num("init.c_amplitude", cfg.preset.c_amplitude);
  str("init.rho_file", cfg.rho_file);
  str("init.m_file", cfg.m_file);
  str("init.c_file", cfg.c_file);
  num("time.T", cfg.T);
  num("time.dt", cfg.dt);
  num("time.cfl_safety", cfg.cfl_safety);
  boolean("time.frozen_velocity", cfg.frozen_velocity);
  num("stepper.delta_reg", cfg.delta_reg);
  num("stepper.newton_abs_tol", cfg.newton_abs_tol);
  num("stepper.newton_rel_tol", cfg.newton_rel_tol);
  integer("stepper.newton_max_iter", cfg.newton_max_iter);
  str("output.dir", cfg.output_dir);
  integer("output.snapshot_interval", cfg.snapshot_interval);
  boolean("output.strict_energy", cfg.strict_energy);
  boolean("output.csv_fields", cfg.csv_fields);
  if (auto v = take("sweep.eps_schedule")) {
    cfg.eps_schedule.clear();
    std::stringstream ss(*v);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        cfg.eps_schedule.push_back(std::stod(trim(tok)));
      } catch (...) {
        res.errors.push_back("sweep.eps_schedule: not a number: '" + tok + "'");
      }
    }
  }

  // physical constraints, each named after the violated condition
  if (!(cfg.dim == 1 || cfg.dim == 2)) res.errors.push_back("grid.dim: must be 1 or 2");
  if (cfg.cells_x < 2) res.errors.push_back("grid.cells_x: need at least 2 cells");
  if (cfg.dim == 2 && cfg.cells_y < 2) res.errors.push_back("grid.cells_y: need at least 2 cells");
  if (!(cfg.length_x > 0.0)) res.errors.push_back("grid.length_x: must be positive");
  if (cfg.dim == 2 && !(cfg.length_y > 0.0))
    res.errors.push_back("grid.length_y: must be positive");
  if (!(cfg.gamma > 1.5))
    res.errors.push_back("physics.gamma: adiabatic exponent must satisfy gamma > 3/2, got " +
                         std::to_string(cfg.gamma));
  if (!(cfg.theta > 0.0 && cfg.theta < cfg.theta0))
    res.errors.push_back(
        "physics.theta/theta0: thermodynamical condition 0 < theta < theta0 violated");
  if (!(cfg.eps > 0.0 && cfg.eps < 0.5))
    res.errors.push_back("potential.eps: regularization level must lie in (0, 1/2)");
  if (!(cfg.T > 0.0)) res.errors.push_back("time.T: final time must be positive");
  if (cfg.dt < 0.0) res.errors.push_back("time.dt: must be nonnegative (0 = cfl-auto)");
  if (!(cfg.cfl_safety > 0.0 && cfg.cfl_safety <= 1.0))
    res.errors.push_back("time.cfl_safety: must lie in (0, 1]");
  if (!(cfg.delta_reg > 0.0)) res.errors.push_back("stepper.delta_reg: must be positive");
  if (!(cfg.newton_abs_tol > 0.0 && cfg.newton_rel_tol > 0.0))
    res.errors.push_back("stepper.newton_*_tol: tolerances must be positive");
  if (cfg.newton_max_iter < 1) res.errors.push_back("stepper.newton_max_iter: need >= 1");
  if (cfg.snapshot_interval < 0)
    res.errors.push_back("output.snapshot_interval: must be nonnegative");
  if (cfg.preset.name != "uniform" && cfg.preset.name != "spinodal" &&
      cfg.preset.name != "bubble" && cfg.preset.name != "shear")
    res.errors.push_back("init.preset: unknown preset '" + cfg.preset.name + "'");
  if (cfg.eps_schedule.empty()) {
    res.errors.push_back("sweep.eps_schedule: must not be empty");
  } else {
    for (std::size_t i = 0; i < cfg.eps_schedule.size(); ++i) {
      const Scalar e = cfg.eps_schedule[i];
      if (!(e > 0.0 && e < 0.5)) {
        res.errors.push_back("sweep.eps_schedule: entries must lie in (0, 1/2)");
        break;
      }
      if (i > 0 && !(e < cfg.eps_schedule[i - 1])) {
        res.errors.push_back("sweep.eps_schedule: must be strictly decreasing");
        break;
      }
    }
  }
  try {
    ViscosityProfile::from_specs(cfg.eta_spec, cfg.lambda_spec);
  } catch (const Error& e) {
    res.errors.push_back(std::string("physics.eta/lambda: ") + e.what());
  }

  if (res.errors.empty()) res.config = std::move(cfg);
  return res;
}

ParseResult parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

namespace {
std::string fmt_num(Scalar v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace

std::string serialize_config(const RunConfig& c) {
  std::ostringstream os;
  os << "grid.dim = " << c.dim << '\n'
     << "grid.cells_x = " << c.cells_x << '\n'
     << "grid.cells_y = " << c.cells_y << '\n'
     << "grid.length_x = " << fmt_num(c.length_x) << '\n'
     << "grid.length_y = " << fmt_num(c.length_y) << '\n'
     << "physics.gamma = " << fmt_num(c.gamma) << '\n'
     << "physics.theta = " << fmt_num(c.theta) << '\n'
     << "physics.theta0 = " << fmt_num(c.theta0) << '\n'
     << "physics.eta = " << c.eta_spec << '\n'
     << "physics.lambda = " << c.lambda_spec << '\n'
     << "potential.eps = " << fmt_num(c.eps) << '\n'
     << "init.preset = " << c.preset.name << '\n'
     << "init.rho0 = " << fmt_num(c.preset.rho0) << '\n'
     << "init.rho_amplitude = " << fmt_num(c.preset.rho_amplitude) << '\n'
     << "init.c0 = " << fmt_num(c.preset.c0) << '\n'
     << "init.mean = " << fmt_num(c.preset.mean) << '\n'
     << "init.amplitude = " << fmt_num(c.preset.amplitude) << '\n'
     << "init.modes = " << c.preset.modes << '\n'
     << "init.seed = " << c.preset.seed << '\n'
     << "init.radius = " << fmt_num(c.preset.radius) << '\n'
     << "init.width = " << fmt_num(c.preset.width) << '\n'
     << "init.c_in = " << fmt_num(c.preset.c_in) << '\n'
     << "init.c_out = " << fmt_num(c.preset.c_out) << '\n'
     << "init.c_amplitude = " << fmt_num(c.preset.c_amplitude) << '\n';
  if (!c.rho_file.empty()) os << "init.rho_file = " << c.rho_file << '\n';
  if (!c.m_file.empty()) os << "init.m_file = " << c.m_file << '\n';
  if (!c.c_file.empty()) os << "init.c_file = " << c.c_file << '\n';
  os << "time.T = " << fmt_num(c.T) << '\n'
     << "time.dt = " << fmt_num(c.dt) << '\n'
     << "time.cfl_safety = " << fmt_num(c.cfl_safety) << '\n'
     << "time.frozen_velocity = " << (c.frozen_velocity ? "true" : "false") << '\n'
     << "stepper.delta_reg = " << fmt_num(c.delta_reg) << '\n'
     << "stepper.newton_abs_tol = " << fmt_num(c.newton_abs_tol) << '\n'
     << "stepper.newton_rel_tol = " << fmt_num(c.newton_rel_tol) << '\n'
     << "stepper.newton_max_iter = " << c.newton_max_iter << '\n'
     << "output.dir = " << c.output_dir << '\n'
     << "output.snapshot_interval = " << c.snapshot_interval << '\n'
     << "output.strict_energy = " << (c.strict_energy ? "true" : "false") << '\n'
     << "output.csv_fields = " << (c.csv_fields ? "true" : "false") << '\n';
  os << "sweep.eps_schedule = ";
  for (std::size_t i = 0; i < c.eps_schedule.size(); ++i)
    os << (i ? "," : "") << fmt_num(c.eps_schedule[i]);
  os << '\n';
  return os.str();
}

std::string config_reference() {
  std::ostringstream os;
  os << "Configuration keys (line format: section.key = value; '#' comments)\n\n";
  for (const auto& k : kKeys) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "  %-26s default: %-22s %s\n", k.key, k.fallback, k.doc);
    os << buf;
  }
  return os.str();
}

}  // namespace nsch

#include "nsch/config.hpp"

#include <doctest.h>

#include <string>

using namespace nsch;

namespace {

bool mentions(const std::vector<std::string>& errors, const std::string& needle) {
  for (const auto& e : errors)
    if (e.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("minimal config accepted with defaults filled") {
  const ParseResult r = parse_config("init.preset = uniform\n");
  REQUIRE(r.ok());
  CHECK(r.config->dim == 1);
  CHECK(r.config->gamma == 2.0);
  CHECK(r.config->eps == 0.1);
  CHECK(r.config->strict_energy == true);
  CHECK(r.config->eps_schedule.size() == 5);
}

TEST_CASE("comments, blank lines, and whitespace are tolerated") {
  const ParseResult r = parse_config(
      "# a comment\n"
      "\n"
      "  physics.gamma   =  1.8   # trailing\n"
      "grid.dim = 2\n");
  REQUIRE(r.ok());
  CHECK(r.config->gamma == 1.8);
  CHECK(r.config->dim == 2);
}

TEST_CASE("adiabatic exponent constraint is cited") {
  const ParseResult r = parse_config("physics.gamma = 1.2\n");
  CHECK(!r.ok());
  CHECK(mentions(r.errors, "gamma > 3/2"));
}

TEST_CASE("thermodynamical condition is cited") {
  const ParseResult r = parse_config("physics.theta = 2\nphysics.theta0 = 1\n");
  CHECK(!r.ok());
  CHECK(mentions(r.errors, "0 < theta < theta0"));
}

TEST_CASE("unknown keys rejected, all errors reported at once") {
  const ParseResult r = parse_config(
      "physics.gamma = 1.0\n"
      "bogus.key = 1\n"
      "potential.eps = 0.7\n"
      "time.T = -1\n");
  CHECK(!r.ok());
  CHECK(r.errors.size() >= 4);
  CHECK(mentions(r.errors, "unknown key 'bogus.key'"));
  CHECK(mentions(r.errors, "(0, 1/2)"));
  CHECK(mentions(r.errors, "time.T"));
}

TEST_CASE("schedule must be strictly decreasing and in range") {
  CHECK(!parse_config("sweep.eps_schedule = 0.1,0.2\n").ok());
  CHECK(!parse_config("sweep.eps_schedule = 0.6,0.1\n").ok());
  CHECK(parse_config("sweep.eps_schedule = 0.2,0.1,0.05\n").ok());
}

TEST_CASE("duplicate keys and malformed lines are flagged") {
  const ParseResult r = parse_config(
      "physics.gamma = 2\n"
      "physics.gamma = 2.5\n"
      "this is not a key value pair\n");
  CHECK(!r.ok());
  CHECK(mentions(r.errors, "duplicate"));
  CHECK(mentions(r.errors, "expected"));
}

TEST_CASE("serialize and reparse is the identity") {
  RunConfig cfg;
  cfg.dim = 2;
  cfg.cells_x = 48;
  cfg.cells_y = 24;
  cfg.gamma = 1.75;
  cfg.eps = 0.03;
  cfg.preset.name = "shear";
  cfg.preset.amplitude = 0.125;
  cfg.dt = 1e-3;
  cfg.frozen_velocity = true;
  cfg.eps_schedule = {0.1, 0.01};
  const ParseResult r = parse_config(serialize_config(cfg));
  REQUIRE(r.ok());
  CHECK(r.config->dim == cfg.dim);
  CHECK(r.config->cells_y == cfg.cells_y);
  CHECK(r.config->gamma == cfg.gamma);
  CHECK(r.config->eps == cfg.eps);
  CHECK(r.config->preset.name == cfg.preset.name);
  CHECK(r.config->preset.amplitude == cfg.preset.amplitude);
  CHECK(r.config->frozen_velocity == cfg.frozen_velocity);
  CHECK(r.config->eps_schedule == cfg.eps_schedule);
}

TEST_CASE("every key appears in the reference") {
  const std::string ref = config_reference();
  const RunConfig cfg;
  for (const std::string key :
       {"grid.dim", "physics.gamma", "potential.eps", "init.preset", "time.T",
        "stepper.delta_reg", "output.dir", "sweep.eps_schedule", "output.csv_fields",
        "init.seed", "time.frozen_velocity"})
    CHECK(ref.find(key) != std::string::npos);
  // and the serialized form only uses known keys: reparse must succeed
  CHECK(parse_config(serialize_config(cfg)).ok());
}

#include "nsch/state.hpp"

#include <doctest.h>

#include <cmath>

using namespace nsch;

namespace {

PhysicalParams default_params(Scalar gamma = 2.0) {
  return PhysicalParams(gamma, 1.0, 2.0,
                        ViscosityProfile::from_specs("constant:1", "constant:0"));
}

bool has_violation(const ValidationResult& r, const std::string& name) {
  for (const auto& v : r.violations)
    if (v.condition == name) return true;
  return false;
}

}  // namespace

TEST_CASE("uniform data accepted with the expected masses") {
  const Grid g = Grid::make_1d(32, 1.0);
  ScalarField rho(g, BcTag::none);
  rho.values.setConstant(1.0);
  VectorField m(g);
  ScalarField c(g, BcTag::neumann_zero);
  const auto r = validate_initial_data(rho, m, c, default_params());
  REQUIRE(r.ok());
  CHECK(r.data->M == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r.data->M_c == doctest::Approx(0.0));
  CHECK(r.data->M_r == doctest::Approx(0.0));
}

TEST_CASE("single-fluid data rejected by the mean constraint") {
  const Grid g = Grid::make_1d(16, 1.0);
  ScalarField rho(g, BcTag::none);
  rho.values.setConstant(1.0);
  VectorField m(g);
  ScalarField c(g, BcTag::neumann_zero);
  c.values.setConstant(1.0);  // only one fluid present
  const auto r = validate_initial_data(rho, m, c, default_params());
  CHECK(!r.ok());
  CHECK(has_violation(r, "mean_constraint"));

  c.values.setConstant(-1.0);
  const auto r2 = validate_initial_data(rho, m, c, default_params());
  CHECK(has_violation(r2, "mean_constraint"));
}

TEST_CASE("pointwise hypothesis violations carry their names") {
  const Grid g = Grid::make_1d(16, 1.0);
  ScalarField rho(g, BcTag::none);
  rho.values.setConstant(1.0);
  VectorField m(g);
  ScalarField c(g, BcTag::neumann_zero);

  ScalarField bad_rho = rho;
  bad_rho.values[4] = -0.25;
  CHECK(has_violation(validate_initial_data(bad_rho, m, c, default_params()),
                      "rho0_nonnegative"));

  ScalarField bad_c = c;
  bad_c.values[2] = 1.25;
  CHECK(has_violation(validate_initial_data(rho, m, bad_c, default_params()), "c0_range"));

  ScalarField zero_rho(g, BcTag::none);
  CHECK(has_violation(validate_initial_data(zero_rho, m, c, default_params()),
                      "positive_total_mass"));

  // momentum on vacuum makes the kinetic term infinite
  ScalarField vac = rho;
  for (Index i = 0; i < 8; ++i) vac.values[i] = 0.0;
  VectorField bad_m(g);
  bad_m.comp[0][2] = 0.5;  // face inside the vacuum region
  CHECK(has_violation(validate_initial_data(vac, bad_m, c, default_params()),
                      "finite_initial_energy"));
}

TEST_CASE("mean of an analytic profile matches the closed-form integral") {
  // c0 = 0.2 + 0.5 cos(2 pi x / L): the cosine sums to zero over cells, so
  // M_r = 0.2 exactly up to roundoff; cross-checked against the analytic
  // integral 0.2 L
  const Grid g = Grid::make_1d(64, 2.0);
  ScalarField rho(g, BcTag::none);
  rho.values.setConstant(1.0);
  VectorField m(g);
  ScalarField c(g, BcTag::neumann_zero);
  for (Index i = 0; i < g.cell_count(); ++i)
    c.values[i] = 0.2 + 0.5 * std::cos(2.0 * M_PI * g.cell_center(0, i) / 2.0);
  const auto r = validate_initial_data(rho, m, c, default_params());
  REQUIRE(r.ok());
  CHECK(r.data->M_c == doctest::Approx(0.2 * 2.0).epsilon(1e-12));
  CHECK(r.data->M_r == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("build_initial_state: uniform data gives the closed-form potential") {
  const Grid g = Grid::make_1d(16, 1.0);
  ScalarField rho(g, BcTag::none);
  rho.values.setConstant(2.0);
  VectorField m(g);
  ScalarField c(g, BcTag::neumann_zero);
  c.values.setConstant(0.3);
  const PhysicalParams params = default_params();
  const RegularizedPotential reg(params.potential, 0.1);
  const auto r = validate_initial_data(rho, m, c, params);
  REQUIRE(r.ok());
  const State s = build_initial_state(*r.data, reg);
  const Scalar expected = reg.prime(0.3) - 2.0 * 0.3;
  for (Index i = 0; i < g.cell_count(); ++i)
    CHECK(s.mu.values[i] == doctest::Approx(expected).epsilon(1e-8));
  // the builder never alters the initial fields
  CHECK((s.rho.values == rho.values).all());
  CHECK((s.c.values == c.values).all());
  CHECK(s.time == 0.0);
}

TEST_CASE("seeded modes are deterministic, bounded, and mean-free") {
  const Grid g = Grid::make_2d(24, 16, 1.0, 1.0);
  const ScalarField a = seeded_modes(g, 5, 42);
  const ScalarField b = seeded_modes(g, 5, 42);
  CHECK((a.values == b.values).all());
  const ScalarField c = seeded_modes(g, 5, 43);
  CHECK(!(c.values == a.values).all());
  CHECK(a.values.abs().maxCoeff() <= 1.0 + 1e-12);
  CHECK(std::abs(a.values.sum()) / Scalar(g.cell_count()) < 1e-12);
}

TEST_CASE("spinodal preset: accepted, energy near the uniform baseline") {
  const Grid g = Grid::make_1d(256, 1.0);
  PresetSpec spec;
  spec.name = "spinodal";
  spec.mean = 0.0;
  spec.amplitude = 1e-3;
  spec.seed = 11;
  const InitialFields f = build_preset(spec, g);
  const PhysicalParams params = default_params();
  const auto r = validate_initial_data(f.rho0, f.m0, f.c0, params);
  REQUIRE(r.ok());
  CHECK(std::abs(r.data->M_r) < 1e-12);
  // baseline: uniform rho = 1, c = 0 on the unit interval has E = 1/(gamma-1)
  const Scalar baseline = 1.0 / (params.gamma() - 1.0);
  CHECK(std::abs(r.data->E0 - baseline) < 5e-3);
  CHECK(r.data->E0 != baseline);
}

TEST_CASE("build never rejects what validate accepted (round trip)") {
  const Grid g = Grid::make_2d(16, 16, 1.0, 1.0);
  PresetSpec spec;
  spec.name = "bubble";
  spec.c_in = 0.9;
  spec.c_out = -0.9;
  const InitialFields f = build_preset(spec, g);
  const PhysicalParams params = default_params();
  const RegularizedPotential reg(params.potential, 0.05);
  const auto r = validate_initial_data(f.rho0, f.m0, f.c0, params);
  REQUIRE(r.ok());
  const State s = build_initial_state(*r.data, reg);
  CHECK((s.c.values == f.c0.values).all());
  CHECK(s.mu.finite());
}

TEST_CASE("shear preset carries momentum that vanishes at walls") {
  const Grid g = Grid::make_2d(32, 32, 1.0, 1.0);
  PresetSpec spec;
  spec.name = "shear";
  spec.amplitude = 0.1;
  spec.c_amplitude = 0.5;
  spec.width = 0.1;
  const InitialFields f = build_preset(spec, g);
  CHECK(f.m0.comp[0].abs().maxCoeff() > 0.0);
  CHECK(f.m0.comp[1].abs().maxCoeff() == 0.0);
  const auto r = validate_initial_data(f.rho0, f.m0, f.c0, default_params());
  CHECK(r.ok());
}

TEST_CASE("velocity derivation floors vacuum faces") {
  const Grid g = Grid::make_1d(8, 1.0);
  State s;
  s.rho = ScalarField(g, BcTag::none);
  s.momentum = VectorField(g);
  s.c = ScalarField(g, BcTag::neumann_zero);
  s.mu = ScalarField(g, BcTag::neumann_zero);
  s.rho.values.setConstant(2.0);
  s.rho.values[0] = 0.0;
  s.rho.values[1] = 0.0;
  s.momentum.comp[0].setConstant(1.0);
  s.momentum.comp[0][0] = 0.0;  // vacuum face
  const VectorField u = s.velocity();
  CHECK(u.comp[0][0] == 0.0);
  CHECK(u.comp[0][4] == doctest::Approx(0.5));
}

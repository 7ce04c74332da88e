#include "nsch/stepper.hpp"

#include "nsch/simulation.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace nsch;

namespace {

PhysicalParams default_params(const std::string& eta = "constant:1", Scalar gamma = 2.0) {
  return PhysicalParams(gamma, 1.0, 2.0, ViscosityProfile::from_specs(eta, "constant:0"));
}

State uniform_state(const Grid& g, const RegularizedPotential& reg, Scalar rho0, Scalar c0) {
  ScalarField rho(g, BcTag::none);
  rho.values.setConstant(rho0);
  VectorField m(g);
  ScalarField c(g, BcTag::neumann_zero);
  c.values.setConstant(c0);
  const PhysicalParams params(reg.params().gamma, reg.theta(), reg.theta0(),
                              ViscosityProfile::from_specs("constant:1", "constant:0"));
  const auto r = validate_initial_data(rho, m, c, params);
  REQUIRE(r.ok());
  return build_initial_state(*r.data, reg);
}

StepConfig quick_config(Scalar dt) {
  StepConfig cfg;
  cfg.dt = dt;
  cfg.tol_energy = 1e-6;
  return cfg;
}

}  // namespace

TEST_CASE("continuity: zero velocity leaves the density untouched") {
  const Grid g = Grid::make_1d(32, 1.0);
  const PhysicalParams params = default_params();
  const RegularizedPotential reg(params.potential, 0.1);
  const Stepper st(g, params, reg, quick_config(1e-3), 0.0);
  ScalarField rho(g, BcTag::none);
  rho.values.setRandom();
  rho.values += 2.0;
  const ScalarField next = st.step_continuity(rho, VectorField(g), 1e-3);
  CHECK((next.values == rho.values).all());
}

TEST_CASE("continuity: exact mass over 1000 random-velocity steps") {
  const Grid g = Grid::make_1d(64, 1.0);
  const PhysicalParams params = default_params();
  const RegularizedPotential reg(params.potential, 0.1);
  const Scalar dt = 1e-3;
  const Stepper st(g, params, reg, quick_config(dt), 0.0);

  std::mt19937 rng(12);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  ScalarField rho(g, BcTag::none);
  for (Index i = 0; i < g.cell_count(); ++i) rho.values[i] = 1.0 + 0.5 * dist(rng);
  const Scalar mass0 = rho.values.sum() * g.cell_volume();
  for (int step = 0; step < 1000; ++step) {
    VectorField u(g);
    for (Index k = 0; k < u.comp[0].size(); ++k) u.comp[0][k] = dist(rng);
    rho = st.step_continuity(rho, u, dt);
  }
  const Scalar mass1 = rho.values.sum() * g.cell_volume();
  CHECK(std::abs(mass1 - mass0) / mass0 <= 1e-12);
  CHECK(rho.values.minCoeff() >= 0.0);
}

TEST_CASE("continuity: CFL violation proposes a reduced dt") {
  const Grid g = Grid::make_1d(32, 1.0);
  const PhysicalParams params = default_params();
  const RegularizedPotential reg(params.potential, 0.1);
  const Stepper st(g, params, reg, quick_config(1.0), 0.0);
  ScalarField rho(g, BcTag::none);
  rho.values.setConstant(1.0);
  VectorField u(g);
  u.comp[0].setConstant(2.0);
  try {
    st.step_continuity(rho, u, 1.0);
    FAIL("expected CflError");
  } catch (const CflError& e) {
    CHECK(e.suggested_dt > 0.0);
    CHECK(e.suggested_dt * 2.0 / g.min_spacing() <= 0.5);
  }
}

TEST_CASE("continuity: bump translates with first-order smearing, mass exact") {
  // constant interior velocity; compare against the exact translate at two
  // resolutions, the L1 error must shrink under refinement
  auto run = [](Index n) {
    const Grid g = Grid::make_1d(n, 1.0);
    const PhysicalParams params = default_params();
    const RegularizedPotential reg(params.potential, 0.1);
    const Scalar dt = 0.4 * g.spacing(0);  // CFL 0.4 at u = 1
    const Stepper st(g, params, reg, quick_config(dt), 0.0);
    ScalarField rho(g, BcTag::none);
    auto bump = [](double x) {
      const double r = (x - 0.3) / 0.1;
      return 0.1 + (std::abs(r) < 1.0 ? std::exp(-1.0 / (1.0 - r * r)) : 0.0);
    };
    for (Index i = 0; i < n; ++i) rho.values[i] = bump(g.cell_center(0, i));
    VectorField u(g);
    u.comp[0].setConstant(1.0);
    const Scalar mass0 = rho.values.sum() * g.cell_volume();
    const int steps = int(std::llround(0.2 / dt));
    for (int s = 0; s < steps; ++s) rho = st.step_continuity(rho, u, dt);
    CHECK(std::abs(rho.values.sum() * g.cell_volume() - mass0) / mass0 <= 1e-12);
    // compare on an interior window; the pinned wall faces starve the
    // inflow side and pile the outflow side, which is not translation
    double err = 0.0;
    const double shift = steps * dt;
    for (Index i = 0; i < n; ++i) {
      const double x = g.cell_center(0, i);
      if (x < 0.3 || x > 0.75) continue;
      err += std::abs(rho.values[i] - bump(x - shift)) * g.cell_volume();
    }
    return err;
  };
  const double coarse = run(128);
  const double fine = run(256);
  CHECK(fine < coarse);
  CHECK(coarse / fine > 1.3);  // first-order smearing
}

TEST_CASE("phase step: uniform equilibrium is a fixed point") {
  const Grid g = Grid::make_1d(32, 1.0);
  const PhysicalParams params = default_params();
  const RegularizedPotential reg(params.potential, 0.1);
  const Stepper st(g, params, reg, quick_config(1e-3), 0.2);
  const State s = uniform_state(g, reg, 1.0, 0.2);
  const auto res = st.step_phase(s.rho, s.rho, VectorField(g), s.c, s.mu, 1e-3);
  const Scalar mu_expected = reg.prime(0.2) - 2.0 * 0.2;
  for (Index i = 0; i < g.cell_count(); ++i) {
    CHECK(res.c.values[i] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(res.mu.values[i] == doctest::Approx(mu_expected).epsilon(1e-8));
  }
}

TEST_CASE("phase step: transported mass identity exact over many steps") {
  const Grid g = Grid::make_1d(64, 1.0);
  const PhysicalParams params = default_params();
  const RegularizedPotential reg(params.potential, 0.05);
  const Scalar dt = 2e-4;
  const Stepper st(g, params, reg, quick_config(dt), 0.1);

  PresetSpec spec;
  spec.name = "spinodal";
  spec.mean = 0.1;
  spec.amplitude = 0.2;
  spec.seed = 5;
  InitialFields f = build_preset(spec, g);
  const auto vr = validate_initial_data(f.rho0, f.m0, f.c0, params);
  REQUIRE(vr.ok());
  State s = build_initial_state(*vr.data, reg);
  VectorField u(g);
  for (Index k = 0; k < u.comp[0].size(); ++k)
    u.comp[0][k] = 0.3 * std::sin(M_PI * g.face_coord(0, k));

  const Scalar mc0 = (s.rho.values * s.c.values).sum() * g.cell_volume();
  for (int step = 0; step < 200; ++step) {
    const ScalarField rho_next = st.step_continuity(s.rho, u, dt);
    auto res = st.step_phase(rho_next, s.rho, u, s.c, s.mu, dt);
    s.rho = rho_next;
    s.c = std::move(res.c);
    s.mu = std::move(res.mu);
  }
  const Scalar mc1 = (s.rho.values * s.c.values).sum() * g.cell_volume();
  CHECK(std::abs(mc1 - mc0) / std::abs(mc0) <= 1e-12);
}

TEST_CASE("phase Jacobian matches directional finite differences") {
  const Grid g = Grid::make_1d(16, 1.0);
  const PhysicalParams params = default_params();
  const RegularizedPotential reg(params.potential, 0.1);
  const Scalar dt = 1e-3;
  const Stepper st(g, params, reg, quick_config(dt), 0.0);

  std::mt19937 rng(8);
  std::uniform_real_distribution<double> dist(-0.5, 0.5);
  ScalarField rho(g, BcTag::none), rho_next(g, BcTag::none);
  ScalarField c_old(g, BcTag::neumann_zero), divf(g, BcTag::none);
  for (Index i = 0; i < g.cell_count(); ++i) {
    rho.values[i] = 1.0 + 0.3 * dist(rng);
    rho_next.values[i] = 1.0 + 0.3 * dist(rng);
    c_old.values[i] = dist(rng);
    divf.values[i] = dist(rng);
  }
  Vector x(2 * g.cell_count());
  for (Index i = 0; i < x.size(); ++i) x[i] = dist(rng);
  Vector d(x.size());
  for (Index i = 0; i < d.size(); ++i) d[i] = dist(rng);
  d.normalize();

  const Vector r0 = st.phase_residual(x, rho_next, rho, c_old, divf, dt);
  const Vector jd = st.phase_jacobian(x, rho_next, dt).apply(d);
  Scalar best = 1.0;
  for (Scalar h = 1e-4; h >= 0.9e-7; h *= 0.1) {
    const Vector r1 = st.phase_residual(x + h * d, rho_next, rho, c_old, divf, dt);
    const Vector fd = (r1 - r0) / h;
    best = std::min(best, (fd - jd).norm() / jd.norm());
  }
  CHECK(best <= 1e-5);
}

TEST_CASE("viscous matrix encodes exactly the dissipation quadrature") {
  // u^T (dt V) u must equal dt * int S(c, grad u) : grad u for any u; this
  // adjoint pairing is what makes the implicit solve energy-consistent
  for (const int dim : {1, 2}) {
    const Grid g = (dim == 1) ? Grid::make_1d(24, 1.3) : Grid::make_2d(9, 7, 1.3, 0.8);
    const ViscosityProfile prof = ViscosityProfile::from_specs("rational:0.4,1.1", "constant:0.2");
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    ScalarField c(g, BcTag::none);
    for (Index i = 0; i < g.cell_count(); ++i) c.values[i] = dist(rng);
    VectorField u(g);
    Vector uvec(g.total_face_count());
    Index at = 0;
    for (int ax = 0; ax < dim; ++ax)
      for (Index k = 0; k < u.comp[ax].size(); ++k) {
        u.comp[ax][k] = dist(rng);
        uvec[at++] = u.comp[ax][k];
      }
    const Scalar dt = 0.37;
    const Array rfx = Array::Ones(g.face_count(0));
    const Array rfy = (dim == 2) ? Array::Ones(g.face_count(1)) : Array();
    const auto A = viscous_system_matrix(g, c, prof, rfx, rfy, dt);
    const Scalar quad_form = uvec.dot(A * uvec) - uvec.squaredNorm() * g.cell_volume();
    const Scalar direct = dt * viscous_dissipation(u, c, prof);
    CHECK(quad_form == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("momentum step: hydrostatic rest stays at rest") {
  const Grid g = Grid::make_2d(12, 12, 1.0, 1.0);
  const PhysicalParams params = default_params();
  const RegularizedPotential reg(params.potential, 0.1);
  const Stepper st(g, params, reg, quick_config(1e-3), 0.0);
  const State s = uniform_state(g, reg, 1.0, 0.1);
  const auto res = st.step_momentum(s.rho, s.momentum, s.velocity(), s.c, 1e-3);
  CHECK(res.momentum.comp[0].abs().maxCoeff() == 0.0);
  CHECK(res.momentum.comp[1].abs().maxCoeff() == 0.0);
}

TEST_CASE("momentum step: viscous decay matches the discrete rate") {
  // rho and c frozen uniform, tiny sine mode: each step scales the mode by
  // 1/(1 + dt a lambda_k / h^2), a = 4/3 eta, the exact discrete rate
  const Index n = 64;
  const Grid g = Grid::make_1d(n, 1.0);
  const Scalar eta = 0.7;
  const PhysicalParams params(2.0, 1.0, 2.0,
                              ViscosityProfile::from_specs("constant:0.7", "constant:0"));
  const RegularizedPotential reg(params.potential, 0.1);
  const Scalar dt = 1e-3;
  const Stepper st(g, params, reg, quick_config(dt), 0.0);

  State s = uniform_state(g, reg, 1.0, 0.0);
  const Scalar amp = 1e-6;
  const int k = 3;
  for (Index j = 0; j < g.face_count(0); ++j)
    s.momentum.comp[0][j] = amp * std::sin(k * M_PI * g.face_coord(0, j));

  const Scalar h = g.spacing(0);
  const Scalar lam = 2.0 - 2.0 * std::cos(k * M_PI / Scalar(n));
  const Scalar rate = 1.0 / (1.0 + dt * (4.0 / 3.0) * eta * lam / (h * h));

  Scalar e_prev = 0.5 * face_inner(s.momentum, s.velocity());
  for (int step = 0; step < 10; ++step) {
    auto res = st.step_momentum(s.rho, s.momentum, s.velocity(), s.c, dt);
    s.momentum = std::move(res.momentum);
    const Scalar e = 0.5 * face_inner(s.momentum, s.velocity());
    CHECK(e < e_prev);  // kinetic energy strictly decreases
    CHECK(e / e_prev == doctest::Approx(rate * rate).epsilon(1e-4));
    e_prev = e;
  }
}

TEST_CASE("momentum step: near-inviscid interior disturbance conserves momentum") {
  const Index n = 128;
  const Grid g = Grid::make_1d(n, 1.0);
  const PhysicalParams params(2.0, 1.0, 2.0,
                              ViscosityProfile::from_specs("constant:1e-8", "constant:0"));
  const RegularizedPotential reg(params.potential, 0.1);
  const Scalar dt = 1e-4;
  const Stepper st(g, params, reg, quick_config(dt), 0.0);

  State s = uniform_state(g, reg, 1.0, 0.0);
  for (Index j = 0; j < g.face_count(0); ++j) {
    const double x = g.face_coord(0, j);
    const double r = (x - 0.5) / 0.15;
    s.momentum.comp[0][j] = (std::abs(r) < 1.0) ? 0.05 * std::exp(-1.0 / (1.0 - r * r)) : 0.0;
  }
  const Scalar p0 = s.momentum.comp[0].sum() * g.cell_volume();
  for (int step = 0; step < 20; ++step) {
    auto res = st.step_momentum(s.rho, s.momentum, s.velocity(), s.c, dt);
    s.momentum = std::move(res.momentum);
  }
  const Scalar p1 = s.momentum.comp[0].sum() * g.cell_volume();
  CHECK(std::abs(p1 - p0) <= 1e-8 * std::abs(p0));
}

TEST_CASE("2D momentum: interior disturbance conserves both components") {
  const Grid g = Grid::make_2d(48, 48, 1.0, 1.0);
  const PhysicalParams params(2.0, 1.0, 2.0,
                              ViscosityProfile::from_specs("constant:1e-8", "constant:0"));
  const RegularizedPotential reg(params.potential, 0.1);
  const Scalar dt = 1e-4;
  const Stepper st(g, params, reg, quick_config(dt), 0.0);

  State s = uniform_state(g, reg, 1.0, 0.0);
  auto shape = [](double x, double y) {
    const double rx = (x - 0.5) / 0.18, ry = (y - 0.5) / 0.18;
    const double r2 = rx * rx + ry * ry;
    return (r2 < 1.0) ? 0.03 * std::exp(-1.0 / (1.0 - r2)) : 0.0;
  };
  for (Index t = 0; t < 48; ++t)
    for (Index f = 0; f + 1 < 48; ++f) {
      s.momentum.comp[0][g.face_index(0, f, t)] = shape(g.face_coord(0, f), g.cell_center(1, t));
      s.momentum.comp[1][g.face_index(1, f, t)] =
          -shape(g.cell_center(0, t), g.face_coord(1, f));
    }
  const Scalar px0 = s.momentum.comp[0].sum() * g.cell_volume();
  const Scalar py0 = s.momentum.comp[1].sum() * g.cell_volume();
  for (int step = 0; step < 10; ++step) {
    auto res = st.step_momentum(s.rho, s.momentum, s.velocity(), s.c, dt);
    s.momentum = std::move(res.momentum);
  }
  const Scalar px1 = s.momentum.comp[0].sum() * g.cell_volume();
  const Scalar py1 = s.momentum.comp[1].sum() * g.cell_volume();
  const Scalar scale = std::abs(px0) + std::abs(py0);
  CHECK(std::abs(px1 - px0) <= 1e-8 * scale);
  CHECK(std::abs(py1 - py0) <= 1e-8 * scale);
}

TEST_CASE("full step: equilibrium is a fixed point with zero dissipation") {
  const Grid g = Grid::make_1d(24, 1.0);
  const PhysicalParams params = default_params();
  const RegularizedPotential reg(params.potential, 0.1);
  StepConfig cfg = quick_config(1e-3);
  cfg.strict_energy = true;
  cfg.tol_energy = 1e-12;
  const Stepper st(g, params, reg, cfg, 0.3);
  const State s = uniform_state(g, reg, 1.0, 0.3);
  const StepResult r = st.step(s);
  CHECK((r.next.rho.values == s.rho.values).all());
  CHECK(r.next.momentum.max_abs() == 0.0);
  CHECK((r.next.c.values - s.c.values).abs().maxCoeff() <= 1e-13);
  CHECK((r.next.mu.values - s.mu.values).abs().maxCoeff() <= 1e-12);
  CHECK(r.rec.visc_dissipation == 0.0);
  CHECK(r.rec.mu_dissipation <= 1e-20);
  CHECK(r.rec.energy_ok == 1);
}

TEST_CASE("full step: strict mode aborts on an oversized time step") {
  // acoustic sloshing at a dt near the sound CFL: the explicit pressure
  // work injects an O(dt^2) defect that a zero tolerance must catch
  const Grid g = Grid::make_1d(64, 1.0);
  const PhysicalParams params = default_params("constant:1e-6");
  const RegularizedPotential reg(params.potential, 0.1);
  StepConfig cfg = quick_config(8e-3);
  cfg.strict_energy = true;
  cfg.tol_energy = 0.0;
  const Stepper st(g, params, reg, cfg, 0.0);

  PresetSpec spec;
  spec.name = "shear";
  spec.rho_amplitude = 0.3;
  spec.amplitude = 0.0;
  spec.c_amplitude = 0.0;
  spec.width = 0.1;
  const InitialFields f = build_preset(spec, g);
  const auto vr = validate_initial_data(f.rho0, f.m0, f.c0, params);
  REQUIRE(vr.ok());
  State s = build_initial_state(*vr.data, reg);
  CHECK_THROWS_AS(
      {
        for (int i = 0; i < 50; ++i) s = st.step(s).next;
      },
      EnergyViolationError);
}

TEST_CASE("vacuum cells stay finite; the lifted relation holds there") {
  const Grid g = Grid::make_1d(48, 1.0);
  const PhysicalParams params = default_params();
  const RegularizedPotential reg(params.potential, 0.1);
  StepConfig cfg = quick_config(1e-4);
  const Stepper st(g, params, reg, cfg, 0.0);

  ScalarField rho(g, BcTag::none);
  ScalarField c(g, BcTag::neumann_zero);
  for (Index i = 0; i < g.cell_count(); ++i) {
    const double x = g.cell_center(0, i);
    rho.values[i] = (x > 0.4 && x < 0.6) ? 0.0 : 1.0;  // interior vacuum slab
    c.values[i] = 0.3 * std::cos(M_PI * x);
  }
  VectorField m(g);
  const auto vr = validate_initial_data(rho, m, c, params);
  REQUIRE(vr.ok());
  State s = build_initial_state(*vr.data, reg, cfg.delta_reg);

  for (int step = 0; step < 5; ++step) {
    const StepResult r = st.step(s);
    s = r.next;
    CHECK(s.c.finite());
    CHECK(s.mu.finite());
  }
  const ScalarField lap_c = laplacian_neumann(s.c);
  for (Index i = 0; i < g.cell_count(); ++i) {
    if (s.rho.values[i] > cfg.delta_reg) continue;
    CHECK(std::abs(-lap_c.values[i] - cfg.delta_reg * s.mu.values[i]) <= 1e-8);
  }
}

TEST_CASE("discrete mass identities over a spinodal run") {
  RunConfig cfg;
  cfg.dim = 1;
  cfg.cells_x = 64;
  cfg.T = 0.05;
  cfg.dt = 5e-4;
  cfg.preset.name = "spinodal";
  cfg.preset.mean = 0.3;
  cfg.preset.amplitude = 0.1;
  cfg.preset.seed = 3;
  cfg.strict_energy = true;
  const Trajectory traj = run_trajectory(cfg, false);
  const Scalar M0 = traj.records.front().M;
  const Scalar Mc0 = traj.records.front().M_c;
  for (const auto& r : traj.records) {
    CHECK(std::abs(r.M - M0) / M0 <= 1e-12);
    CHECK(std::abs(r.M_c - Mc0) / std::abs(Mc0) <= 1e-12);
    CHECK(r.rho_min >= 0.0);
    CHECK(r.energy_ok == 1);
  }
}

TEST_CASE("frozen-velocity sub-flow dissipates at Newton tolerance") {
  RunConfig cfg;
  cfg.dim = 1;
  cfg.cells_x = 64;
  cfg.T = 0.05;
  cfg.dt = 1e-3;
  cfg.frozen_velocity = true;
  cfg.preset.name = "spinodal";
  cfg.preset.mean = 0.0;
  cfg.preset.amplitude = 0.2;
  cfg.preset.seed = 9;
  cfg.strict_energy = true;
  const Trajectory traj = run_trajectory(cfg, false);
  for (std::size_t k = 1; k < traj.records.size(); ++k) {
    const auto& r = traj.records[k];
    CHECK(r.energy_ok == 1);
    // the tolerance never left the Newton floor
    CHECK(r.tol_energy <= 100.0 * cfg.newton_abs_tol * (1.0 + traj.records[0].E_eps) + 1e-10);
    CHECK(r.energy_margin >= -r.tol_energy);
  }
}

TEST_CASE("spinodal run keeps c within 1 + O(eps)") {
  for (const double eps : {1e-1, 1e-2}) {
    RunConfig cfg;
    cfg.dim = 1;
    cfg.cells_x = 64;
    cfg.T = 0.2;
    cfg.dt = 1e-3;
    cfg.eps = eps;
    cfg.preset.name = "spinodal";
    cfg.preset.mean = 0.0;
    cfg.preset.amplitude = 0.3;
    cfg.preset.seed = 21;
    cfg.strict_energy = false;
    const Trajectory traj = run_trajectory(cfg, false);
    Scalar worst = 0.0;
    for (const auto& r : traj.records)
      worst = std::max({worst, std::abs(r.c_min), std::abs(r.c_max)});
    CHECK(worst <= 1.0 + 3.0 * eps);
  }
}

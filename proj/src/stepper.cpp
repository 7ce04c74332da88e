#include "nsch/stepper.hpp"

#include <cmath>
#include <vector>

namespace nsch {

namespace {

// Coefficient list of one velocity-gradient tensor entry as a linear
// functional of the stacked face vector [ux; uy].
struct LinComb {
  int n = 0;
  Index idx[4];
  Scalar w[4];
  void add(Index i, Scalar c) {
    if (i < 0) return;  // boundary face, value pinned to zero
    idx[n] = i;
    w[n] = c;
    ++n;
  }
};

// Stacked index of an interior face, or -1 for a boundary face.
Index stacked_face(const Grid& g, int axis, Index gface, Index transverse) {
  if (gface <= 0 || gface >= g.cells(axis)) return -1;
  const Index off = (axis == 0) ? 0 : g.face_count(0);
  return off + g.face_index(axis, gface - 1, transverse);
}

// ubar coefficients at cell (ix, iy) for component `axis`, negated mirror
// ghosts past the walls (matches velocity_gradient).
void add_cell_avg(const Grid& g, int axis, Index ix, Index iy, Scalar scale, LinComb& out) {
  Scalar sign = 1.0;
  const Index nx = g.cells(0);
  const Index ny = g.cells(1);
  if (ix < 0) { ix = 0; sign = -sign; }
  if (ix >= nx) { ix = nx - 1; sign = -sign; }
  if (iy < 0) { iy = 0; sign = -sign; }
  if (g.dim() == 2 && iy >= ny) { iy = ny - 1; sign = -sign; }
  const Index along = (axis == 0) ? ix : iy;
  const Index transverse = (axis == 0) ? iy : ix;
  out.add(stacked_face(g, axis, along, transverse), 0.5 * sign * scale);
  out.add(stacked_face(g, axis, along + 1, transverse), 0.5 * sign * scale);
}

}  // namespace

VectorField mass_flux(const ScalarField& rho, const VectorField& u) {
  if (!rho.grid.same_as(u.grid)) throw Error("mass_flux: mismatched grids");
  const Grid& g = rho.grid;
  VectorField flux(g);
  for (int ax = 0; ax < g.dim(); ++ax) {
    const Index n_along = g.cells(ax) - 1;
    const Index n_other = (g.dim() == 2) ? g.cells(1 - ax) : 1;
    for (Index t = 0; t < n_other; ++t)
      for (Index fc = 0; fc < n_along; ++fc) {
        const Index k = g.face_index(ax, fc, t);
        const Scalar uf = u.comp[ax][k];
        const Index lo = (ax == 0) ? g.cell_index(fc, t) : g.cell_index(t, fc);
        const Index hi = (ax == 0) ? g.cell_index(fc + 1, t) : g.cell_index(t, fc + 1);
        flux.comp[ax][k] = uf * (uf >= 0.0 ? rho.values[lo] : rho.values[hi]);
      }
  }
  return flux;
}

Stepper::Stepper(const Grid& grid, const PhysicalParams& params, const RegularizedPotential& reg,
                 const StepConfig& cfg, Scalar M_r)
    : grid_(grid), params_(params), reg_(reg), cfg_(cfg), M_r_(M_r),
      lap_(laplacian_matrix(grid)) {
  if (!(cfg.dt > 0.0)) throw Error("stepper: dt must be positive");
  if (!(cfg.delta_reg > 0.0)) throw Error("stepper: delta_reg must be positive");
  if (!(cfg.cfl_safety > 0.0 && cfg.cfl_safety <= 1.0))
    throw Error("stepper: cfl_safety must lie in (0, 1]");
}

ScalarField Stepper::step_continuity(const ScalarField& rho, const VectorField& u,
                                     Scalar dt) const {
  const Scalar umax = u.max_abs();
  const Scalar cfl = dt * umax / grid_.min_spacing();
  if (cfl > cfg_.cfl_safety * (1.0 + 1e-12)) {
    const Scalar dt_ok = 0.9 * cfg_.cfl_safety * grid_.min_spacing() / umax;
    throw CflError("step_continuity: CFL " + std::to_string(cfl) + " exceeds safety " +
                       std::to_string(cfg_.cfl_safety) + "; reduce dt to about " +
                       std::to_string(dt_ok),
                   dt_ok);
  }
  const ScalarField div = divergence(mass_flux(rho, u));
  ScalarField next(grid_, rho.bc_tag);
  next.values = rho.values - dt * div.values;
  const Scalar mn = next.values.minCoeff();
  if (mn < 0.0) {
    const Scalar scale = std::max(rho.values.maxCoeff(), Scalar(1));
    if (mn < -1e-12 * scale)
      throw Error("step_continuity: positivity lost (min rho = " + std::to_string(mn) + ")");
    next.values = next.values.max(0.0);  // roundoff-level underflow only
  }
  return next;
}

Vector Stepper::phase_residual(const Vector& x, const ScalarField& rho_next,
                               const ScalarField& rho, const ScalarField& c_old,
                               const ScalarField& div_flux_c, Scalar dt) const {
  const Index n = grid_.cell_count();
  ScalarField c(grid_, BcTag::neumann_zero, x.head(n).array());
  ScalarField mu(grid_, BcTag::neumann_zero, x.tail(n).array());
  const ScalarField lap_mu = laplacian_neumann(mu);
  const ScalarField lap_c = laplacian_neumann(c);
  Vector r(2 * n);
  for (Index i = 0; i < n; ++i) {
    const Scalar rn = rho_next.values[i];
    r[i] = rn * c.values[i] - rho.values[i] * c_old.values[i] +
           dt * (div_flux_c.values[i] - lap_mu.values[i]);
    r[n + i] = (rn + cfg_.delta_reg) * mu.values[i] + lap_c.values[i] -
               rn * reg_.prime(c.values[i]) + params_.theta0() * rn * c_old.values[i];
  }
  return r;
}

SparseOperator Stepper::phase_jacobian(const Vector& x, const ScalarField& rho_next,
                                       Scalar dt) const {
  const Index n = grid_.cell_count();
  std::vector<Eigen::Triplet<Scalar>> trip;
  trip.reserve(std::size_t(12 * n));
  for (Index i = 0; i < n; ++i) {
    trip.emplace_back(i, i, rho_next.values[i]);
    trip.emplace_back(n + i, n + i, rho_next.values[i] + cfg_.delta_reg);
    trip.emplace_back(n + i, i, -rho_next.values[i] * reg_.second(x[i]));
  }
  for (Index k = 0; k < lap_.outerSize(); ++k)
    for (Eigen::SparseMatrix<Scalar>::InnerIterator it(lap_, k); it; ++it) {
      trip.emplace_back(it.row(), n + it.col(), -dt * it.value());  // -dt L in the c rows
      trip.emplace_back(n + it.row(), it.col(), it.value());        // +L in the mu rows
    }
  Eigen::SparseMatrix<Scalar> J(2 * n, 2 * n);
  J.setFromTriplets(trip.begin(), trip.end());
  return SparseOperator(std::move(J));
}

Stepper::PhaseResult Stepper::step_phase(const ScalarField& rho_next, const ScalarField& rho,
                                         const VectorField& u, const ScalarField& c,
                                         const ScalarField& mu_prev, Scalar dt) const {
  const Index n = grid_.cell_count();

  // transported rho c with donor-cell concentration riding the mass flux
  const VectorField fm = mass_flux(rho, u);
  VectorField fc(grid_);
  for (int ax = 0; ax < grid_.dim(); ++ax) {
    const Index n_along = grid_.cells(ax) - 1;
    const Index n_other = (grid_.dim() == 2) ? grid_.cells(1 - ax) : 1;
    for (Index t = 0; t < n_other; ++t)
      for (Index f = 0; f < n_along; ++f) {
        const Index k = grid_.face_index(ax, f, t);
        const Index lo = (ax == 0) ? grid_.cell_index(f, t) : grid_.cell_index(t, f);
        const Index hi = (ax == 0) ? grid_.cell_index(f + 1, t) : grid_.cell_index(t, f + 1);
        const Scalar cd = (u.comp[ax][k] >= 0.0) ? c.values[lo] : c.values[hi];
        fc.comp[ax][k] = fm.comp[ax][k] * cd;
      }
  }
  const ScalarField div_fc = divergence(fc);

  Vector x0(2 * n);
  x0.head(n) = c.values.matrix();
  x0.tail(n) = mu_prev.values.matrix();

  const auto rfn = [&](const Vector& x) {
    return phase_residual(x, rho_next, rho, c, div_fc, dt);
  };
  const auto jfn = [&](const Vector& x) { return phase_jacobian(x, rho_next, dt); };

  NewtonConfig newton_cfg = cfg_.newton;
  newton_cfg.precond = Preconditioner::ilut;  // the coupled system defeats Jacobi
  NewtonStats stats;
  Vector x;
  try {
    x = newton_solve(rfn, jfn, x0, newton_cfg, &stats);
  } catch (const NonConvergenceError& e) {
    throw NonConvergenceError("step_phase: " + std::string(e.what()) +
                                  " (last residual " + std::to_string(e.residual) + ")",
                              e.residual, e.iterations);
  }

  // one refinement step, kept only if it lowers the residual; Newton's
  // quadratic tail usually lands near the evaluation floor
  {
    Vector r = rfn(x);
    const Scalar rn = r.lpNorm<Eigen::Infinity>();
    if (rn > 0.0) {
      try {
        LinearSolveStats ls;
        // a coarse relative solve of an already-converged residual lands
        // the true residual near the evaluation floor
        const Vector dx = bicgstab(jfn(x), -r, Vector::Zero(2 * n), 1e-4,
                                   int(4 * n) + 50, &ls, newton_cfg.precond);
        Vector x_try = x + dx;
        const Scalar rn_try = rfn(x_try).lpNorm<Eigen::Infinity>();
        if (rn_try < rn) {
          x = std::move(x_try);
          stats.residual_norm = rn_try;
          stats.linear_iterations += ls.iterations;
        }
      } catch (const NonConvergenceError&) {
        // keep the accepted Newton iterate
      }
    }
  }

  PhaseResult out;
  out.c = ScalarField(grid_, BcTag::neumann_zero, x.head(n).array());
  out.mu = ScalarField(grid_, BcTag::neumann_zero, x.tail(n).array());
  out.stats = stats;

  // constant shift restoring the transported mass identity exactly; a
  // constant leaves the Laplacian untouched so the residual stays at the
  // solver floor
  const Vector r_end = rfn(x);
  const Scalar vol = grid_.cell_volume();
  const Scalar mass_defect = r_end.head(n).sum() * vol;
  const Scalar M_next = rho_next.values.sum() * vol;
  if (M_next > 0.0) out.c.values -= mass_defect / M_next;
  return out;
}

namespace {

// Donor-cell divergence of m (x) u for one momentum component.
Array momentum_convection(const Grid& g, int axis, const VectorField& m, const VectorField& u) {
  Array out = Array::Zero(g.face_count(axis));
  const Scalar inv_h = 1.0 / g.spacing(axis);
  const Index n_other = (g.dim() == 2) ? g.cells(1 - axis) : 1;

  // along-axis flux at cells
  for (Index t = 0; t < n_other; ++t) {
    Scalar prev = 0.0;
    const Index n_along = g.cells(axis);
    for (Index i = 0; i <= n_along; ++i) {
      Scalar flux = 0.0;
      if (i < n_along) {
        const Scalar ubar =
            0.5 * (u.at_global(axis, i, t) + u.at_global(axis, i + 1, t));
        const Scalar md =
            (ubar >= 0.0) ? m.at_global(axis, i, t) : m.at_global(axis, i + 1, t);
        flux = ubar * md;
      }
      if (i > 0 && i < n_along) {
        out[g.face_index(axis, i - 1, t)] += (flux - prev) * inv_h;
      }
      prev = flux;
    }
  }
  if (g.dim() == 1) return out;

  // transverse flux at nodes
  const int other = 1 - axis;
  const Scalar inv_ht = 1.0 / g.spacing(other);
  const Index n_along = g.cells(axis) - 1;   // interior faces along axis
  const Index n_trans = g.cells(other);      // rows of faces
  for (Index f = 0; f < n_along; ++f) {
    const Index gface = f + 1;
    for (Index t = 0; t < n_trans; ++t) {
      // node fluxes at transverse positions t and t+1
      Scalar node_flux[2];
      for (int s = 0; s < 2; ++s) {
        const Index gnode = t + s;
        const Scalar adv = 0.5 * (u.at_global(other, gnode, gface - 1) +
                                  u.at_global(other, gnode, gface));
        Scalar md = 0.0;
        if (adv >= 0.0) {
          if (gnode >= 1) md = m.at_global(axis, gface, gnode - 1);
        } else {
          if (gnode < n_trans) md = m.at_global(axis, gface, gnode);
        }
        node_flux[s] = adv * md;
      }
      out[g.face_index(axis, f, t)] += (node_flux[1] - node_flux[0]) * inv_ht;
    }
  }
  return out;
}

}  // namespace

VectorField tensor_divergence_on_faces(const TensorField& t) {
  const Grid& g = t.grid;
  VectorField out(g);
  const Index nx = g.cells(0);
  const Index ny = (g.dim() == 2) ? g.cells(1) : 1;
  for (int ax = 0; ax < g.dim(); ++ax) {
    const Scalar inv_h = 1.0 / g.spacing(ax);
    const Index n_along = g.cells(ax) - 1;
    const Index n_other = (g.dim() == 2) ? g.cells(1 - ax) : 1;
    for (Index tr = 0; tr < n_other; ++tr)
      for (Index f = 0; f < n_along; ++f) {
        const Index lo = (ax == 0) ? g.cell_index(f, tr) : g.cell_index(tr, f);
        const Index hi = (ax == 0) ? g.cell_index(f + 1, tr) : g.cell_index(tr, f + 1);
        Scalar v = (t.at(ax, ax)[hi] - t.at(ax, ax)[lo]) * inv_h;
        if (g.dim() == 2) {
          const int ot = 1 - ax;
          const Scalar inv_ht = 1.0 / g.spacing(ot);
          // face-averaged off-diagonal entry at transverse neighbors, odd
          // ghosts past the walls
          auto tbar = [&](Index trr) -> Scalar {
            Scalar sign = 1.0;
            if (trr < 0) { trr = 0; sign = -1.0; }
            if (trr >= ((ax == 0) ? ny : nx)) { trr = ((ax == 0) ? ny : nx) - 1; sign = -1.0; }
            const Index clo = (ax == 0) ? g.cell_index(f, trr) : g.cell_index(trr, f);
            const Index chi = (ax == 0) ? g.cell_index(f + 1, trr) : g.cell_index(trr, f + 1);
            return 0.5 * sign * (t.at(ax, ot)[clo] + t.at(ax, ot)[chi]);
          };
          v += (tbar(tr + 1) - tbar(tr - 1)) * (0.5 * inv_ht);
        }
        out.comp[ax][g.face_index(ax, f, tr)] = v;
      }
  }
  return out;
}

Eigen::SparseMatrix<Scalar> viscous_system_matrix(const Grid& g, const ScalarField& c,
                                                  const ViscosityProfile& prof,
                                                  const Array& rho_face_x,
                                                  const Array& rho_face_y, Scalar dt) {
  const Index n_total = g.total_face_count();
  const Scalar vol = g.cell_volume();
  std::vector<Eigen::Triplet<Scalar>> trip;
  trip.reserve(std::size_t(n_total) * 20);

  for (Index k = 0; k < g.face_count(0); ++k)
    trip.emplace_back(k, k, rho_face_x[k] * vol);
  for (Index k = 0; k < g.face_count(1); ++k)
    trip.emplace_back(g.face_count(0) + k, g.face_count(0) + k, rho_face_y[k] * vol);

  const int d = g.dim();
  const Index nx = g.cells(0);
  const Index ny = (d == 2) ? g.cells(1) : 1;
  const Scalar inv_hx = 1.0 / g.spacing(0);
  const Scalar inv_hy = (d == 2) ? 1.0 / g.spacing(1) : 0.0;

  for (Index iy = 0; iy < ny; ++iy) {
    for (Index ix = 0; ix < nx; ++ix) {
      const Index cell = g.cell_index(ix, iy);
      const Scalar eta = prof.eta(c.values[cell]);
      const Scalar lam = prof.lambda(c.values[cell]);

      LinComb a[4];
      // a_xx
      a[0].add(stacked_face(g, 0, ix, iy), -inv_hx);
      a[0].add(stacked_face(g, 0, ix + 1, iy), inv_hx);
      if (d == 2) {
        // a_xy = du/dy, a_yx = dv/dx, a_yy
        add_cell_avg(g, 0, ix, iy + 1, 0.5 * inv_hy, a[1]);
        add_cell_avg(g, 0, ix, iy - 1, -0.5 * inv_hy, a[1]);
        add_cell_avg(g, 1, ix + 1, iy, 0.5 * inv_hx, a[2]);
        add_cell_avg(g, 1, ix - 1, iy, -0.5 * inv_hx, a[2]);
        a[3].add(stacked_face(g, 1, iy, ix), -inv_hy);
        a[3].add(stacked_face(g, 1, iy + 1, ix), inv_hy);
      }

      Scalar C[4][4] = {{0}};
      C[0][0] = 4.0 / 3.0 * eta + lam;
      if (d == 2) {
        C[3][3] = 4.0 / 3.0 * eta + lam;
        C[0][3] = C[3][0] = lam - 2.0 / 3.0 * eta;
        C[1][1] = C[2][2] = C[1][2] = C[2][1] = eta;
      }

      const int nent = d * d;
      for (int p = 0; p < nent; ++p)
        for (int q = 0; q < nent; ++q) {
          if (C[p][q] == 0.0) continue;
          const Scalar w = dt * vol * C[p][q];
          for (int ip = 0; ip < a[p].n; ++ip)
            for (int iq = 0; iq < a[q].n; ++iq)
              trip.emplace_back(a[p].idx[ip], a[q].idx[iq], w * a[p].w[ip] * a[q].w[iq]);
        }
    }
  }

  Eigen::SparseMatrix<Scalar> A(n_total, n_total);
  A.setFromTriplets(trip.begin(), trip.end());
  return A;
}

Stepper::MomentumResult Stepper::step_momentum(const ScalarField& rho_next,
                                               const VectorField& momentum, const VectorField& u,
                                               const ScalarField& c_next, Scalar dt) const {
  const Grid& g = grid_;
  const Scalar vol = g.cell_volume();

  const ScalarField p = pressure(rho_next, params_.gamma());
  const VectorField grad_p = gradient(p);
  const VectorField kort = tensor_divergence_on_faces(korteweg_stress(gradient(c_next)));

  const Array rfx = face_density(rho_next, 0);
  const Array rfy = (g.dim() == 2) ? face_density(rho_next, 1) : Array();

  Vector rhs(g.total_face_count());
  for (int ax = 0; ax < g.dim(); ++ax) {
    const Array conv = momentum_convection(g, ax, momentum, u);
    const Index off = (ax == 0) ? 0 : g.face_count(0);
    for (Index k = 0; k < g.face_count(ax); ++k)
      rhs[off + k] = vol * (momentum.comp[ax][k] -
                            dt * (conv[k] + grad_p.comp[ax][k] + kort.comp[ax][k]));
  }

  const auto A = viscous_system_matrix(g, c_next, params_.visc, rfx, rfy, dt);
  Vector u0(g.total_face_count());
  for (int ax = 0; ax < g.dim(); ++ax) {
    const Index off = (ax == 0) ? 0 : g.face_count(0);
    for (Index k = 0; k < g.face_count(ax); ++k) u0[off + k] = u.comp[ax][k];
  }

  LinearSolveStats stats;
  Vector unew;
  const SparseOperator op(A);
  try {
    unew = bicgstab(op, rhs, u0, 1e-10, int(2 * g.total_face_count()) + 100, &stats);
  } catch (const NonConvergenceError&) {
    try {
      unew = bicgstab(op, rhs, u0, 1e-10, int(2 * g.total_face_count()) + 100, &stats,
                      Preconditioner::ilut);
    } catch (const NonConvergenceError& e) {
      throw NonConvergenceError("step_momentum: viscous solve failed: " + std::string(e.what()),
                                e.residual, e.iterations);
    }
  }

  MomentumResult out;
  out.momentum = VectorField(g);
  for (int ax = 0; ax < g.dim(); ++ax) {
    const Index off = (ax == 0) ? 0 : g.face_count(0);
    const Array& rf = (ax == 0) ? rfx : rfy;
    for (Index k = 0; k < g.face_count(ax); ++k)
      out.momentum.comp[ax][k] = rf[k] * unew[off + k];
  }
  out.stats = stats;
  return out;
}

StepResult Stepper::step(const State& s) const {
  const Scalar dt = cfg_.dt;
  const Scalar E_before = total_energy_eps(s, params_, reg_);
  const VectorField u = s.velocity();

  const ScalarField rho_next = step_continuity(s.rho, u, dt);
  const PhaseResult phase = step_phase(rho_next, s.rho, u, s.c, s.mu, dt);

  State next;
  next.rho = rho_next;
  next.c = phase.c;
  next.mu = phase.mu;
  next.time = s.time + dt;
  next.eps = s.eps;

  LinearSolveStats visc_stats;
  if (cfg_.frozen_velocity) {
    next.momentum = s.momentum;
  } else {
    MomentumResult mom = step_momentum(rho_next, s.momentum, u, phase.c, dt);
    next.momentum = std::move(mom.momentum);
    visc_stats = mom.stats;
  }

  StepResult out;
  out.rec = record(next, params_, reg_, M_r_);
  out.rec.mu_dissipation = mu_dissipation(next.mu);
  out.rec.visc_dissipation =
      cfg_.frozen_velocity ? 0.0
                           : viscous_dissipation(next.velocity(), next.c, params_.visc);
  out.rec.newton_iterations = phase.stats.iterations;
  out.rec.newton_residual = phase.stats.residual_norm;
  out.rec.phase_linear_iterations = phase.stats.linear_iterations;
  out.rec.phase_linear_residual = phase.stats.linear_residual;
  out.rec.viscous_iterations = visc_stats.iterations;
  out.rec.viscous_residual = visc_stats.residual;

  const Scalar E_after = out.rec.E_eps;
  const Scalar margin =
      E_before - E_after - dt * (out.rec.visc_dissipation + out.rec.mu_dissipation);
  out.rec.energy_margin = margin;
  out.rec.tol_energy = cfg_.tol_energy;
  out.rec.energy_ok = (margin >= -cfg_.tol_energy) ? 1 : 0;
  if (!out.rec.energy_ok && cfg_.strict_energy)
    throw EnergyViolationError("step: energy inequality violated by " + std::to_string(-margin) +
                                   " (tolerance " + std::to_string(cfg_.tol_energy) + ")",
                               -margin, cfg_.tol_energy);
  out.next = std::move(next);
  return out;
}

}  // namespace nsch

#include "nsch/state.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace nsch {

namespace {

constexpr Scalar kVacuumFloor = 1e-14;

// splitmix64: portable, bit-reproducible across platforms
struct BitGen {
  std::uint64_t s;
  std::uint64_t next_u64() {
    s += 0x9E3779B97f4A7C15ull;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  // uniform in [-1, 1)
  Scalar next_signed() {
    return Scalar(next_u64() >> 11) * (1.0 / 4503599627370496.0) - 1.0;
  }
};

}  // namespace

Array face_density(const ScalarField& rho, int axis) { return cell_to_face(rho, axis); }

VectorField State::velocity() const {
  VectorField u(rho.grid);
  for (int ax = 0; ax < rho.grid.dim(); ++ax) {
    const Array rf = face_density(rho, ax);
    for (Index k = 0; k < rf.size(); ++k)
      u.comp[ax][k] = (rf[k] > kVacuumFloor) ? momentum.comp[ax][k] / rf[k] : 0.0;
  }
  return u;
}

ValidationResult validate_initial_data(const ScalarField& rho0, const VectorField& m0,
                                       const ScalarField& c0, const PhysicalParams& params) {
  ValidationResult out;
  const Grid& g = rho0.grid;
  if (!g.same_as(m0.grid) || !g.same_as(c0.grid)) {
    out.violations.push_back({"common_grid", "initial fields live on different grids"});
    return out;
  }

  for (Index i = 0; i < g.cell_count(); ++i) {
    if (rho0.values[i] < 0.0) {
      out.violations.push_back({"rho0_nonnegative",
                                "rho0 < 0 at cell " + std::to_string(i) +
                                    " (requires rho0 >= 0 a.e.)"});
      break;
    }
  }
  for (Index i = 0; i < g.cell_count(); ++i) {
    if (std::abs(c0.values[i]) > 1.0) {
      out.violations.push_back({"c0_range", "c0 outside [-1, 1] at cell " + std::to_string(i)});
      break;
    }
  }

  const Scalar vol = g.cell_volume();
  const Scalar M = rho0.values.sum() * vol;
  const Scalar M_c = (rho0.values * c0.values).sum() * vol;
  if (!(M > 0.0))
    out.violations.push_back({"positive_total_mass", "total mass M must be positive"});

  Scalar M_r = 0.0;
  if (M > 0.0) {
    M_r = M_c / M;
    if (!(std::abs(M_r) < 1.0))
      out.violations.push_back(
          {"mean_constraint", "M_r = M_c/M = " + std::to_string(M_r) +
                                  " lies outside (-1, 1); only one fluid would be present"});
  }

  // E0: kinetic on faces (0/0 read as 0 only for m = 0), potential and
  // mixing at cells, gradient energy on faces.
  Scalar E0 = 0.0;
  bool infinite = false;
  for (int ax = 0; ax < g.dim() && !infinite; ++ax) {
    const Array rf = face_density(rho0, ax);
    for (Index k = 0; k < rf.size(); ++k) {
      const Scalar m = m0.comp[ax][k];
      if (rf[k] <= 0.0) {
        if (m != 0.0) {
          infinite = true;
          break;
        }
      } else {
        E0 += 0.5 * m * m / rf[k] * vol;
      }
    }
  }
  if (infinite) {
    out.violations.push_back({"finite_initial_energy",
                              "momentum on a vacuum region makes the kinetic energy infinite"});
  } else if (out.violations.empty()) {
    for (Index i = 0; i < g.cell_count(); ++i) {
      const Scalar r = rho0.values[i];
      E0 += elastic_energy(r, params.gamma()) * vol;
      if (r > 0.0)
        E0 += r * (flory_huggins(c0.values[i], params.theta()) -
                   0.5 * params.theta0() * c0.values[i] * c0.values[i]) *
              vol;
    }
    const VectorField gc = gradient(c0);
    E0 += 0.5 * face_inner(gc, gc);
    if (!std::isfinite(E0))
      out.violations.push_back({"finite_initial_energy", "initial energy is not finite"});
  }

  if (!out.violations.empty()) return out;

  AdmissibleInitialData data;
  data.rho0 = rho0;
  data.m0 = m0;
  data.c0 = c0;
  data.M = M;
  data.M_c = M_c;
  data.M_r = M_r;
  data.E0 = E0;
  out.data = std::move(data);
  return out;
}

State build_initial_state(const AdmissibleInitialData& data, const RegularizedPotential& reg,
                          Scalar delta_reg) {
  State s;
  s.rho = data.rho0;
  s.momentum = data.m0;
  s.c = data.c0;
  s.c.bc_tag = BcTag::neumann_zero;
  s.time = 0.0;
  s.eps = reg.eps();

  const ScalarField lap_c = laplacian_neumann(s.c);
  s.mu = ScalarField(s.rho.grid, BcTag::neumann_zero);
  for (Index i = 0; i < s.rho.grid.cell_count(); ++i) {
    const Scalar r = s.rho.values[i];
    const Scalar rhs = -lap_c.values[i] + r * reg.prime(s.c.values[i]) -
                       reg.theta0() * r * s.c.values[i];
    s.mu.values[i] = rhs / (r + delta_reg);
  }
  if (!s.mu.finite())
    throw Error("build_initial_state: chemical-potential solve produced non-finite values");
  return s;
}

ScalarField seeded_modes(const Grid& grid, int max_mode, std::uint64_t seed) {
  BitGen gen{seed};
  ScalarField out(grid, BcTag::none);
  const Index nx = grid.cells(0);
  const Index ny = (grid.dim() == 2) ? grid.cells(1) : 1;

  if (grid.dim() == 1) {
    std::vector<Scalar> amp(std::size_t(max_mode) + 1, 0.0);
    Scalar total = 0.0;
    for (int k = 1; k <= max_mode; ++k) {
      amp[std::size_t(k)] = gen.next_signed();
      total += std::abs(amp[std::size_t(k)]);
    }
    if (total < 1e-12) total = 1.0;
    for (Index i = 0; i < nx; ++i) {
      const Scalar x = grid.cell_center(0, i);
      Scalar v = 0.0;
      for (int k = 1; k <= max_mode; ++k)
        v += amp[std::size_t(k)] * std::cos(Scalar(k) * M_PI * x / grid.length(0));
      out.values[i] = v / total;
    }
    return out;
  }

  std::vector<Scalar> amp(std::size_t(max_mode + 1) * std::size_t(max_mode + 1), 0.0);
  Scalar total = 0.0;
  for (int k = 0; k <= max_mode; ++k)
    for (int m = 0; m <= max_mode; ++m) {
      if (k == 0 && m == 0) continue;
      const Scalar a = gen.next_signed();
      amp[std::size_t(k) * std::size_t(max_mode + 1) + std::size_t(m)] = a;
      total += std::abs(a);
    }
  if (total < 1e-12) total = 1.0;
  for (Index iy = 0; iy < ny; ++iy) {
    const Scalar y = grid.cell_center(1, iy);
    for (Index ix = 0; ix < nx; ++ix) {
      const Scalar x = grid.cell_center(0, ix);
      Scalar v = 0.0;
      for (int k = 0; k <= max_mode; ++k)
        for (int m = 0; m <= max_mode; ++m) {
          if (k == 0 && m == 0) continue;
          v += amp[std::size_t(k) * std::size_t(max_mode + 1) + std::size_t(m)] *
               std::cos(Scalar(k) * M_PI * x / grid.length(0)) *
               std::cos(Scalar(m) * M_PI * y / grid.length(1));
        }
      out.values[grid.cell_index(ix, iy)] = v / total;
    }
  }
  return out;
}

InitialFields build_preset(const PresetSpec& spec, const Grid& grid) {
  InitialFields f;
  f.rho0 = ScalarField(grid, BcTag::none);
  f.c0 = ScalarField(grid, BcTag::neumann_zero);
  f.m0 = VectorField(grid);
  f.rho0.values.setConstant(spec.rho0);

  const Index nx = grid.cells(0);
  const Index ny = (grid.dim() == 2) ? grid.cells(1) : 1;
  const Scalar Lx = grid.length(0);
  const Scalar Ly = grid.length(1);

  if (spec.rho_amplitude != 0.0) {
    for (Index iy = 0; iy < ny; ++iy)
      for (Index ix = 0; ix < nx; ++ix) {
        const Scalar x = grid.cell_center(0, ix);
        Scalar bump = std::cos(M_PI * x / Lx);
        if (grid.dim() == 2) bump *= std::cos(M_PI * grid.cell_center(1, iy) / Ly);
        f.rho0.values[grid.cell_index(ix, iy)] = spec.rho0 + spec.rho_amplitude * bump;
      }
  }

  if (spec.name == "uniform") {
    f.c0.values.setConstant(spec.c0);
    return f;
  }

  if (spec.name == "spinodal") {
    const ScalarField noise = seeded_modes(grid, spec.modes, spec.seed);
    f.c0.values = spec.mean + spec.amplitude * noise.values;
    return f;
  }

  if (spec.name == "bubble") {
    for (Index iy = 0; iy < ny; ++iy)
      for (Index ix = 0; ix < nx; ++ix) {
        const Scalar dx = grid.cell_center(0, ix) - 0.5 * Lx;
        Scalar r2 = dx * dx;
        if (grid.dim() == 2) {
          const Scalar dy = grid.cell_center(1, iy) - 0.5 * Ly;
          r2 += dy * dy;
        }
        const Scalar r = std::sqrt(r2);
        f.c0.values[grid.cell_index(ix, iy)] =
            spec.c_out + (spec.c_in - spec.c_out) * 0.5 * (1.0 + std::tanh((spec.radius - r) / spec.width));
      }
    return f;
  }

  if (spec.name == "shear") {
    for (Index iy = 0; iy < ny; ++iy)
      for (Index ix = 0; ix < nx; ++ix) {
        const Scalar coord = (grid.dim() == 2) ? grid.cell_center(1, iy) : grid.cell_center(0, ix);
        const Scalar mid = (grid.dim() == 2) ? 0.5 * Ly : 0.5 * Lx;
        f.c0.values[grid.cell_index(ix, iy)] =
            spec.c_amplitude * std::tanh((coord - mid) / spec.width);
      }
    const Array rfx = face_density(f.rho0, 0);
    for (Index t = 0; t < ((grid.dim() == 2) ? ny : 1); ++t)
      for (Index fc = 0; fc < nx - 1; ++fc) {
        const Scalar x = grid.face_coord(0, fc);
        Scalar u = spec.amplitude * std::sin(M_PI * x / Lx);
        if (grid.dim() == 2) u *= std::sin(2.0 * M_PI * grid.cell_center(1, t) / Ly);
        const Index k = grid.face_index(0, fc, t);
        f.m0.comp[0][k] = rfx[k] * u;
      }
    return f;
  }

  throw Error("unknown initial-data preset '" + spec.name + "'");
}

}  // namespace nsch

#include "nsch/constitutive.hpp"

#include <cmath>
#include <limits>

namespace nsch {

std::function<Scalar(Scalar)> ViscosityProfile::parse_spec(const std::string& spec, Scalar& lo,
                                                           Scalar& hi) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw Error("viscosity spec '" + spec + "': expected 'constant:V' or 'rational:LO,HI'");
  const std::string kind = spec.substr(0, colon);
  const std::string args = spec.substr(colon + 1);
  if (kind == "constant") {
    const Scalar v = std::stod(args);
    lo = hi = v;
    return [v](Scalar) { return v; };
  }
  if (kind == "rational") {
    const auto comma = args.find(',');
    if (comma == std::string::npos)
      throw Error("viscosity spec '" + spec + "': rational needs two values");
    const Scalar a = std::stod(args.substr(0, comma));
    const Scalar b = std::stod(args.substr(comma + 1));
    lo = std::min(a, b);
    hi = std::max(a, b);
    return [a, b](Scalar c) { return a + (b - a) / (1.0 + c * c); };
  }
  throw Error("viscosity spec '" + spec + "': unknown kind '" + kind + "'");
}

ViscosityProfile ViscosityProfile::from_specs(const std::string& eta_spec,
                                              const std::string& lambda_spec) {
  ViscosityProfile p;
  Scalar lo = 0, hi = 0;
  p.eta = parse_spec(eta_spec, lo, hi);
  p.eta_min = std::min(lo, hi);
  p.eta_max = std::max(lo, hi);
  if (!(p.eta_min > 0.0)) throw Error("viscosity: eta must be bounded below by a positive value");
  Scalar llo = 0, lhi = 0;
  p.lambda = parse_spec(lambda_spec, llo, lhi);
  if (llo < 0.0) throw Error("viscosity: lambda must be nonnegative");
  p.lambda_max = lhi;
  return p;
}

ScalarField pressure(const ScalarField& rho, Scalar gamma) {
  for (Index i = 0; i < rho.values.size(); ++i)
    if (rho.values[i] < 0.0)
      throw Error("pressure: negative density at cell " + std::to_string(i));
  ScalarField p(rho.grid, BcTag::none);
  p.values = rho.values.pow(gamma);
  return p;
}

Scalar stress_contraction(Scalar eta, Scalar lambda, int dim, const Scalar a[4]) {
  if (dim == 1) return (4.0 / 3.0 * eta + lambda) * a[0] * a[0];
  const Scalar tr = a[0] + a[3];
  const Scalar sym_off = a[1] + a[2];
  return (4.0 / 3.0 * eta + lambda) * (a[0] * a[0] + a[3] * a[3]) +
         2.0 * (lambda - 2.0 / 3.0 * eta) * a[0] * a[3] + eta * sym_off * sym_off;
}

TensorField viscous_stress(const ScalarField& c, const TensorField& grad_u,
                           const ViscosityProfile& prof) {
  if (!c.grid.same_as(grad_u.grid)) throw Error("viscous_stress: mismatched grids");
  const Grid& g = c.grid;
  TensorField s(g);
  const int d = g.dim();
  for (Index i = 0; i < g.cell_count(); ++i) {
    const Scalar eta = prof.eta(c.values[i]);
    const Scalar lam = prof.lambda(c.values[i]);
    Scalar tr = 0.0;
    for (int a = 0; a < d; ++a) tr += grad_u.at(a, a)[i];
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        Scalar v = eta * (grad_u.at(a, b)[i] + grad_u.at(b, a)[i]);
        if (a == b) v += (lam - 2.0 / 3.0 * eta) * tr;
        s.at(a, b)[i] = v;
      }
  }
  return s;
}

TensorField korteweg_stress(const VectorField& grad_c) {
  const Grid& g = grad_c.grid;
  TensorField k(g);
  const auto gc = face_to_cell(grad_c);
  const int d = g.dim();
  for (Index i = 0; i < g.cell_count(); ++i) {
    Scalar norm2 = 0.0;
    for (int a = 0; a < d; ++a) norm2 += gc[a][i] * gc[a][i];
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        k.at(a, b)[i] = gc[a][i] * gc[b][i] - (a == b ? 0.5 * norm2 : 0.0);
  }
  return k;
}

ScalarField energy_density(const ScalarField& rho, const VectorField& u, const ScalarField& c,
                           const PhysicalParams& params) {
  const Grid& g = rho.grid;
  if (!g.same_as(u.grid) || !g.same_as(c.grid)) throw Error("energy_density: mismatched grids");
  ScalarField e(g, BcTag::none);
  const auto uc = face_to_cell(u);
  const auto gc = face_to_cell(gradient(c));
  const Scalar gamma = params.gamma();
  const Scalar theta = params.theta();
  const Scalar theta0 = params.theta0();
  for (Index i = 0; i < g.cell_count(); ++i) {
    const Scalar r = rho.values[i];
    if (r < 0.0) throw Error("energy_density: negative density at cell " + std::to_string(i));
    Scalar u2 = 0.0, gc2 = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      u2 += uc[a][i] * uc[a][i];
      gc2 += gc[a][i] * gc[a][i];
    }
    Scalar v = 0.5 * r * u2 + elastic_energy(r, gamma) + 0.5 * gc2;
    if (r > 0.0) {
      if (std::abs(c.values[i]) >= 1.0) {
        // singular state: report, never clip
        e.values[i] = std::numeric_limits<Scalar>::infinity();
        continue;
      }
      v += r * flory_huggins(c.values[i], theta) - 0.5 * theta0 * r * c.values[i] * c.values[i];
    }
    e.values[i] = v;
  }
  return e;
}

}  // namespace nsch

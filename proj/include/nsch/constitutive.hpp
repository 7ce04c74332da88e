#pragma once

#include "nsch/grid.hpp"
#include "nsch/potential.hpp"

#include <functional>
#include <string>

namespace nsch {

/// Shear and bulk viscosity as functions of the phase variable, with the
/// bounds 0 < eta_min <= eta(c) <= eta_max and 0 <= lambda(c) <= lambda_max.
struct ViscosityProfile {
  std::function<Scalar(Scalar)> eta;
  std::function<Scalar(Scalar)> lambda;
  Scalar eta_min = 0.5;
  Scalar eta_max = 1.5;
  Scalar lambda_max = 0.0;

  /// "constant:V" or "rational:LO,HI" for eta(c) = lo + (hi-lo)/(1+c^2).
  static std::function<Scalar(Scalar)> parse_spec(const std::string& spec, Scalar& lo, Scalar& hi);
  static ViscosityProfile from_specs(const std::string& eta_spec, const std::string& lambda_spec);
};

/// Everything the closures need: thermodynamics plus viscosities.
struct PhysicalParams {
  PhysicalParams(Scalar gamma, Scalar theta, Scalar theta0, ViscosityProfile visc)
      : potential(theta, theta0, gamma), visc(std::move(visc)) {}
  PotentialParams potential;
  ViscosityProfile visc;

  Scalar gamma() const { return potential.gamma; }
  Scalar theta() const { return potential.theta; }
  Scalar theta0() const { return potential.theta0; }
};

/// Cellwise p_e(rho) = rho^gamma. Rejects negative density naming the cell.
ScalarField pressure(const ScalarField& rho, Scalar gamma);

/// Newtonian stress from a cell-centered velocity gradient:
///   S = eta(c) (A + A^T - (2/3) tr A I) + lambda(c) tr A I.
/// The 3D deviatoric factor 2/3 is kept verbatim in 1D/2D.
TensorField viscous_stress(const ScalarField& c, const TensorField& grad_u,
                           const ViscosityProfile& prof);

/// Capillary stress K = grad c (x) grad c - |grad c|^2 / 2 I at cell
/// centers, from face gradients averaged to cells.
TensorField korteweg_stress(const VectorField& grad_c);

/// S(A) : A at one cell; nonnegative for eta > 0, lambda >= 0.
Scalar stress_contraction(Scalar eta, Scalar lambda, int dim, const Scalar a[4]);

/// Pointwise energy density per cell using the singular F with the vacuum
/// convention rho F(c) = 0 at rho = 0; |u|^2 and |grad c|^2 are interpolated
/// to cells. Cells with rho > 0 and |c| >= 1 report +infinity, never a clip.
ScalarField energy_density(const ScalarField& rho, const VectorField& u, const ScalarField& c,
                           const PhysicalParams& params);

}  // namespace nsch

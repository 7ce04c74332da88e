#pragma once

#include "nsch/types.hpp"

#include <string>
#include <vector>

namespace nsch {

/// Thermodynamic parameters. Construction enforces 0 < theta < theta0
/// and gamma > 3/2.
struct PotentialParams {
  PotentialParams(Scalar theta, Scalar theta0, Scalar gamma);
  Scalar theta;
  Scalar theta0;
  Scalar gamma;
};

// Logarithmic entropy of mixing on (-1, 1):
//   F(c)  = (theta/2) [(1+c) ln(1+c) + (1-c) ln(1-c)]
//   F'(c) = (theta/2) ln((1+c)/(1-c))
//   F''(c) = theta / (1 - c^2)
// Evaluated through log1p so the tails stay accurate up to |c| = 1 - 1e-16.
// The closed endpoints use the continuous extension F(+-1) = theta ln 2,
// which is valid for the value only; F' diverges there.

Scalar flory_huggins(Scalar c, Scalar theta);
Scalar flory_huggins_prime(Scalar c, Scalar theta);
Scalar flory_huggins_second(Scalar c, Scalar theta);

/// C2 extension of the entropy to all of R: the exact F on
/// [-1+eps, 1-eps], second-order Taylor branches about the seams outside.
/// Even in c, strictly convex, and an under-envelope of F on (-1, 1).
class RegularizedPotential {
 public:
  RegularizedPotential(const PotentialParams& params, Scalar eps);

  Scalar value(Scalar c) const;
  Scalar prime(Scalar c) const;
  Scalar second(Scalar c) const;

  /// G'_eps(c) = F''_eps(c) - theta0, the mixing-energy curvature.
  Scalar g_prime(Scalar c) const;

  Scalar eps() const { return eps_; }
  Scalar seam() const { return seam_; }
  Scalar theta() const { return params_.theta; }
  Scalar theta0() const { return params_.theta0; }
  const PotentialParams& params() const { return params_; }

  /// Seam data F(1-eps), F'(1-eps), F''(1-eps).
  Scalar seam_value() const { return f_; }
  Scalar seam_prime() const { return fp_; }
  Scalar seam_second() const { return fpp_; }

 private:
  PotentialParams params_;
  Scalar eps_;
  Scalar seam_;
  Scalar f_, fp_, fpp_;
};

/// Elastic energy density rho^gamma / (gamma - 1); the rho f_e(rho) form of
/// the closed-form integral, shifted by the conserved affine term.
Scalar elastic_energy(Scalar rho, Scalar gamma);

struct VerificationRow {
  std::string name;
  Scalar measured = 0.0;
  Scalar threshold = 0.0;
  bool pass = false;
};

/// Invariant table behind the `verify-potential` subcommand: seam
/// continuity of value/first/second derivative, exact evenness and
/// monotonicity, the under-envelope property against the singular entropy,
/// convexity, finite-difference consistency, and the curvature bounds of
/// the mixing energy.
std::vector<VerificationRow> verify_potential(Scalar theta, Scalar theta0, Scalar eps);

}  // namespace nsch

#pragma once

#include "nsch/constitutive.hpp"
#include "nsch/grid.hpp"
#include "nsch/potential.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nsch {

/// One time level: density and momentum on the staggered grid, phase
/// variable and chemical potential at cells, and the regularization level.
/// Value semantics throughout; steps return fresh states.
struct State {
  ScalarField rho;       // >= 0 cellwise
  VectorField momentum;  // rho u at faces
  ScalarField c;
  ScalarField mu;
  Scalar time = 0.0;
  Scalar eps = 0.0;

  /// u = m / rho_face; faces with rho_face below the floor move nothing.
  VectorField velocity() const;
};

/// Face-averaged density (arithmetic mean of the adjacent cells).
Array face_density(const ScalarField& rho, int axis);

struct Violation {
  std::string condition;  // stable machine-readable name
  std::string message;
};

/// Validated initial data together with the derived masses and energy.
struct AdmissibleInitialData {
  ScalarField rho0;
  VectorField m0;
  ScalarField c0;
  Scalar M = 0.0;    // total mass
  Scalar M_c = 0.0;  // relative mass
  Scalar M_r = 0.0;  // M_c / M, strictly inside (-1, 1)
  Scalar E0 = 0.0;   // initial total energy (singular entropy)
};

struct ValidationResult {
  std::optional<AdmissibleInitialData> data;
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

/// Checks the admissibility hypotheses on (rho0, m0, c0):
///   rho0 >= 0 and -1 <= c0 <= 1 cellwise; finite initial energy with
///   |m0|^2/rho0 read as 0 only where m0 = 0; M > 0 and M_r in (-1, 1).
/// Returns either the derived quantities or every violated condition.
ValidationResult validate_initial_data(const ScalarField& rho0, const VectorField& m0,
                                       const ScalarField& c0, const PhysicalParams& params);

/// Builds the level-0 state; mu0 solves the discrete chemical-potential
/// relation given (rho0, c0), with the vacuum lift delta_reg.
State build_initial_state(const AdmissibleInitialData& data, const RegularizedPotential& reg,
                          Scalar delta_reg = 1e-10);

// Named initial-data presets. All smooth, sampled from closed forms so the
// same preset refines consistently under grid halving.

struct PresetSpec {
  std::string name = "uniform";  // uniform | spinodal | bubble | shear
  Scalar rho0 = 1.0;
  Scalar rho_amplitude = 0.0;  // optional smooth density bump
  Scalar c0 = 0.0;            // uniform value / background
  Scalar mean = 0.0;          // spinodal: target M_r
  Scalar amplitude = 1e-3;    // spinodal noise / shear velocity scale
  int modes = 6;              // spinodal: highest seeded cosine mode
  std::uint64_t seed = 1;
  Scalar radius = 0.25;       // bubble
  Scalar width = 0.05;        // bubble / shear interface width
  Scalar c_in = 0.9;          // bubble inside value
  Scalar c_out = -0.9;        // bubble outside value
  Scalar c_amplitude = 0.5;   // shear stripe amplitude
};

struct InitialFields {
  ScalarField rho0;
  VectorField m0;
  ScalarField c0;
};

InitialFields build_preset(const PresetSpec& spec, const Grid& grid);

/// Smooth seeded perturbation in [-1, 1]: a normalized sum of Neumann
/// cosine modes with amplitudes drawn from a portable bit generator.
ScalarField seeded_modes(const Grid& grid, int max_mode, std::uint64_t seed);

}  // namespace nsch

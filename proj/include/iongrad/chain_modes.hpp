#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "iongrad/constants.hpp"

namespace iongrad {

enum class Direction { axial, radial_x, radial_y };

std::string_view to_string(Direction d);
Direction direction_from_string(std::string_view s);

/// Trap and ion parameters of a linear crystal. Frequencies are angular (rad/s).
struct CrystalSpec {
  int n_ions = 2;
  double omega_ax = constants::two_pi * 342.2e3;
  double omega_rad_x = constants::two_pi * 1.304e6;
  double omega_rad_y = constants::two_pi * 1.344e6;
  double ion_mass = constants::ba138_mass_amu * constants::atomic_mass_unit;
  double charge = constants::elementary_charge;

  double omega_rad(Direction d) const;
  /// Coulomb length (q^2 / (4 pi eps0 m omega_ax^2))^(1/3), meters.
  double length_scale() const;
  void validate() const;
};

struct EquilibriumPositions {
  std::vector<double> positions;  // meters, ascending
  std::vector<double> dimensionless;
  double length_scale = 0.0;
  int iterations = 0;
  double residual = 0.0;
};

/// Normal modes for one direction.
///
/// Ordering puts the centre-of-mass mode first in every direction: axial
/// frequencies ascend, radial frequencies descend. Column m of `vectors` is the
/// participation vector of mode m, sign-fixed so that its first non-negligible
/// component is positive.
struct ModeSpectrum {
  Direction direction = Direction::axial;
  std::vector<double> frequencies;  // rad/s
  Eigen::MatrixXd vectors;
  std::vector<double> lamb_dicke;  // filled by lamb_dicke(); empty until then

  int size() const { return static_cast<int>(frequencies.size()); }
  double participation(int ion, int mode) const { return vectors(ion, mode); }
};

EquilibriumPositions solve_equilibrium(const CrystalSpec& spec);

/// Dimensionless axial Hessian of the Coulomb + harmonic potential at u.
Eigen::MatrixXd axial_hessian(const std::vector<double>& u);
/// Dimensionless radial Hessian for radial-to-axial frequency ratio `beta`.
Eigen::MatrixXd radial_hessian(const std::vector<double>& u, double beta);

ModeSpectrum axial_modes(const CrystalSpec& spec, const EquilibriumPositions& eq);
ModeSpectrum radial_modes(const CrystalSpec& spec, const EquilibriumPositions& eq,
                          Direction axis);
/// Convenience: equilibrium + modes for one direction.
ModeSpectrum compute_modes(const CrystalSpec& spec, Direction direction);

struct SpacingReport {
  double delta = 0.0;
  /// |omega_nearest - omega_COM| / delta for each direction; 0 for one ion.
  double axial = 0.0;
  double radial_x = 0.0;
  double radial_y = 0.0;
  double breathing_ratio = 0.0;  // omega_BR / omega_COM (axial), 0 for one ion
};

SpacingReport mode_spacing_report(const CrystalSpec& spec, double delta);

/// eta_m = k_eff sqrt(hbar / (2 m omega_m)), single-ion mass, unit-norm vectors.
std::vector<double> lamb_dicke(const CrystalSpec& spec, const ModeSpectrum& modes,
                               double k_eff);

/// CSV rows `direction,mode_index,freq_hz,b_1..b_N` (header written when asked).
void write_spectrum_csv(std::ostream& os, const ModeSpectrum& modes, bool header);

/// Largest axial frequency for which the softest radial mode of an n-ion chain
/// stays at or above `min_radial_ratio` times the axial frequency.
double max_stable_axial_frequency(int n_ions, double omega_rad_min, double min_radial_ratio);

}  // namespace iongrad

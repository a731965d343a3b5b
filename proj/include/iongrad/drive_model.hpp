#pragma once

#include <array>
#include <complex>
#include <vector>

#include "iongrad/chain_modes.hpp"
#include "iongrad/constants.hpp"

namespace iongrad {

enum class HgMode { tem00, tem10 };
enum class Polarization { lin_parallel, lin_perpendicular };

/// Two co-propagating beams, TEM00 and TEM10, cut along the crystal axis at the
/// focal plane. Beam centres are offsets from the addressed ion, meters.
struct BeamPair {
  double waist = 1.0e-6;
  double power00 = 1.0;
  double power10 = 1.0;
  double center00 = 0.0;
  double center10 = 0.0;
  double rel_detuning = 0.0;  // rad/s, beat frequency between the beams
  double rel_phase = 0.0;     // rad
  Polarization polarization = Polarization::lin_parallel;
  double sensitivity = 1.0e5;  // Hz of differential shift per unit intensity

  void validate() const;
};

/// Normalised mode profile; TEM00 peaks at 1, TEM10 is scaled for equal power.
double field_amplitude(const BeamPair& beam, HgMode mode, double x);

/// |sqrt(P00) u00 + sqrt(P10) u10 exp(i(rel_detuning t + rel_phase))|^2.
/// Throws PhysicsError for lin_perpendicular beams, whose differential shift
/// comes from a polarisation gradient rather than the intensity.
double interference_intensity(const BeamPair& beam, double x, double t);

/// Spatial derivative of the differential AC Stark shift, Hz/m.
double stark_gradient(const BeamPair& beam, double x, double t, double qubit_sensitivity);

/// Amplitude of the part of stark_gradient oscillating at the beat frequency.
double oscillating_gradient_amplitude(const BeamPair& beam, double x, double qubit_sensitivity);

/// State-dependent drive on the addressed pair.
///
/// `force_amp[k]` is the per-ion drive scale Omega_k in 1/s, which folds the
/// optical power, qubit sensitivity and gradient together; the drive of mode m
/// for spin state i is c_{i,m} = eta_m sum_k b_{k,m} Omega_k e^{i phase_k} z_k(i).
struct DriveConfig {
  std::array<int, 2> target_ions{0, 1};
  Direction direction = Direction::axial;
  int target_mode = 0;
  double detuning = constants::two_pi * 20e3;  // delta > 0: drive at omega_target - delta
  int n_loops = 4;
  std::array<double, 2> force_amp{0.0, 0.0};
  std::array<double, 2> force_phase{0.0, constants::pi};
  double k_eff = constants::two_pi / 532e-9;
  /// Factor applied to power00 * power10 by the last calibration.
  double power_scale = 1.0;

  double gate_time() const { return n_loops * constants::two_pi / detuning; }
  double drive_frequency(const ModeSpectrum& modes) const {
    return modes.frequencies.at(target_mode) - detuning;
  }
  std::complex<double> ion_drive(int k) const {
    return std::polar(force_amp[k], force_phase[k]);
  }
  void validate(int n_ions) const;
};

/// Per-ion drive scale produced by the beam pair centred on one ion:
/// Omega = pi G / (2 k_eff), G the oscillating gradient amplitude at the ion.
double raw_force_amplitude(const BeamPair& beam, double k_eff);

struct CalibrationOptions {
  /// Apply the multi-mode correction so the entangling phase is exactly +-pi
  /// with every mode of the drive direction included.
  bool include_spectators = true;
};

/// Scale the existing per-ion amplitudes (equal magnitudes on both ions) so the
/// gate is maximally entangling. Throws CalibrationError when a target ion
/// does not participate in the target mode.
DriveConfig calibrate_amplitudes(const CrystalSpec& spec, const ModeSpectrum& modes,
                                 const DriveConfig& drive, CalibrationOptions opt = {});

/// Set amplitudes from the beam pair, then calibrate. `power_scale` records how
/// much the optical power product had to change.
DriveConfig calibrate_force(const BeamPair& beam, const CrystalSpec& spec,
                            const DriveConfig& drive, CalibrationOptions opt = {});

struct DeflectorPoint {
  double x = 0.0;
  double pop_tem00 = 0.0;
  double pop_tem10 = 0.0;
};

/// Ramsey populations while each beam alone is scanned across the chain.
std::vector<DeflectorPoint> deflector_scan(const BeamPair& beam, const EquilibriumPositions& eq,
                                           double ramsey_time, double sensitivity,
                                           int n_points = 801);

}  // namespace iongrad

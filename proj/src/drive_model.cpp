#include "iongrad/drive_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "iongrad/errors.hpp"
#include "iongrad/phase_engine.hpp"

namespace iongrad {

void BeamPair::validate() const {
  if (!(waist > 0)) throw ConfigError("beams.waist_m must be > 0");
  if (power00 < 0 || power10 < 0) throw ConfigError("beam powers must be >= 0");
}

namespace {

struct Profile {
  double u;   // field
  double du;  // d/dx
};

Profile profile(const BeamPair& beam, HgMode mode, double x) {
  const double w = beam.waist;
  if (mode == HgMode::tem00) {
    const double y = (x - beam.center00) / w;
    const double g = std::exp(-y * y);
    return {g, -2.0 * y / w * g};
  }
  const double y = (x - beam.center10) / w;
  const double g = std::exp(-y * y);
  return {2.0 * y * g, 2.0 / w * (1.0 - 2.0 * y * y) * g};
}

}  // namespace

double field_amplitude(const BeamPair& beam, HgMode mode, double x) {
  return profile(beam, mode, x).u;
}

double interference_intensity(const BeamPair& beam, double x, double t) {
  if (beam.polarization != Polarization::lin_parallel)
    throw PhysicsError(
        "lin_perp_lin beams produce a polarisation gradient, not an intensity gradient; "
        "use stark_gradient");
  const double a = std::sqrt(beam.power00) * profile(beam, HgMode::tem00, x).u;
  const double b = std::sqrt(beam.power10) * profile(beam, HgMode::tem10, x).u;
  const double theta = beam.rel_detuning * t + beam.rel_phase;
  return a * a + b * b + 2.0 * a * b * std::cos(theta);
}

double stark_gradient(const BeamPair& beam, double x, double t, double qubit_sensitivity) {
  const auto p0 = profile(beam, HgMode::tem00, x);
  const auto p1 = profile(beam, HgMode::tem10, x);
  const double s0 = std::sqrt(beam.power00), s1 = std::sqrt(beam.power10);
  const double theta = beam.rel_detuning * t + beam.rel_phase;
  const double cross = 2.0 * s0 * s1 * (p0.du * p1.u + p0.u * p1.du) * std::cos(theta);
  if (beam.polarization == Polarization::lin_perpendicular) return qubit_sensitivity * cross;
  const double static_part =
      2.0 * beam.power00 * p0.u * p0.du + 2.0 * beam.power10 * p1.u * p1.du;
  return qubit_sensitivity * (static_part + cross);
}

double oscillating_gradient_amplitude(const BeamPair& beam, double x, double qubit_sensitivity) {
  const auto p0 = profile(beam, HgMode::tem00, x);
  const auto p1 = profile(beam, HgMode::tem10, x);
  return qubit_sensitivity * 2.0 * std::sqrt(beam.power00 * beam.power10) *
         (p0.du * p1.u + p0.u * p1.du);
}

void DriveConfig::validate(int n_ions) const {
  for (int k : target_ions)
    if (k < 0 || k >= n_ions) throw ConfigError("drive.target_ions out of range [0, n_ions)");
  if (target_ions[0] == target_ions[1]) throw ConfigError("drive.target_ions must be distinct");
  if (!(detuning > 0)) throw ConfigError("drive.detuning_hz must be > 0");
  if (n_loops < 1) throw ConfigError("drive.n_loops must be >= 1");
  if (target_mode < 0 || target_mode >= n_ions) throw ConfigError("drive.target_mode out of range");
  if (!(k_eff > 0)) throw ConfigError("drive.k_eff must be > 0");
}

double raw_force_amplitude(const BeamPair& beam, double k_eff) {
  const double g = std::abs(oscillating_gradient_amplitude(beam, 0.0, beam.sensitivity));
  return constants::pi * g / (2.0 * k_eff);
}

DriveConfig calibrate_amplitudes(const CrystalSpec& spec, const ModeSpectrum& modes,
                                 const DriveConfig& drive, CalibrationOptions opt) {
  drive.validate(spec.n_ions);
  for (int k = 0; k < 2; ++k) {
    const int ion = drive.target_ions[k];
    if (std::abs(modes.participation(ion, drive.target_mode)) < 1e-9) {
      std::ostringstream msg;
      msg << "ion " << ion << " does not participate in " << to_string(modes.direction)
          << " mode " << drive.target_mode << "; the force cannot drive it";
      throw CalibrationError(msg.str());
    }
  }

  DriveConfig d = drive;
  double amp = 0.5 * (std::abs(d.force_amp[0]) + std::abs(d.force_amp[1]));
  if (!(amp > 0)) amp = 1.0;
  d.force_amp = {amp, amp};

  const int target[] = {d.target_mode};
  const double chi_single = gate_phases(spec, modes, d, std::nullopt, target).chi;
  if (!(std::abs(chi_single) > 1e-300)) {
    throw CalibrationError(
        "the force pattern produces no entangling phase on the target mode; check "
        "drive.force_phases_rad");
  }
  double scale = std::sqrt(constants::pi / std::abs(chi_single));

  if (opt.include_spectators) {
    // chi scales with amp^2
    DriveConfig trial = d;
    trial.force_amp = {amp * scale, amp * scale};
    const double chi_all = gate_phases(spec, modes, trial).chi;
    if (!(std::abs(chi_all) > 1e-300))
      throw CalibrationError("multi-mode entangling phase vanishes; cannot calibrate");
    scale *= std::sqrt(constants::pi / std::abs(chi_all));
  }
  d.force_amp = {amp * scale, amp * scale};
  return d;
}

DriveConfig calibrate_force(const BeamPair& beam, const CrystalSpec& spec, const DriveConfig& drive,
                            CalibrationOptions opt) {
  beam.validate();
  const double raw = raw_force_amplitude(beam, drive.k_eff);
  if (!(raw > 0))
    throw CalibrationError("beam pair produces no oscillating gradient at the ion");
  const auto modes = compute_modes(spec, drive.direction);
  DriveConfig d = drive;
  d.force_amp = {raw, raw};
  d = calibrate_amplitudes(spec, modes, d, opt);
  const double ratio = d.force_amp[0] / raw;
  d.power_scale = ratio * ratio;
  return d;
}

std::vector<DeflectorPoint> deflector_scan(const BeamPair& beam, const EquilibriumPositions& eq,
                                           double ramsey_time, double sensitivity, int n_points) {
  beam.validate();
  if (!(ramsey_time > 0)) throw ConfigError("deflector scan needs ramsey_time > 0");
  if (eq.positions.empty()) return {};
  if (n_points < 2) n_points = 2;
  const double lo = eq.positions.front() - 3.0 * beam.waist;
  const double hi = eq.positions.back() + 3.0 * beam.waist;

  // Each beam alone, centred at the scan position.
  BeamPair centred = beam;
  centred.center00 = 0.0;
  centred.center10 = 0.0;
  auto population = [&](double shift_hz) {
    return 0.5 * (1.0 - std::cos(constants::two_pi * shift_hz * ramsey_time));
  };

  std::vector<DeflectorPoint> out;
  out.reserve(n_points);
  for (int k = 0; k < n_points; ++k) {
    const double x = lo + (hi - lo) * k / (n_points - 1);
    const auto nearest = std::min_element(eq.positions.begin(), eq.positions.end(),
                                          [x](double a, double b) {
                                            return std::abs(a - x) < std::abs(b - x);
                                          });
    const double rel = *nearest - x;
    const double u0 = field_amplitude(centred, HgMode::tem00, rel);
    const double u1 = field_amplitude(centred, HgMode::tem10, rel);
    out.push_back({x, population(sensitivity * beam.power00 * u0 * u0),
                   population(sensitivity * beam.power10 * u1 * u1)});
  }
  return out;
}

}  // namespace iongrad

#include "iongrad/phase_engine.hpp"

#include <cmath>
#include <ostream>

#include "iongrad/csv.hpp"
#include "iongrad/errors.hpp"

namespace iongrad {

namespace {

// (x - sin x) / x^2, series below |x| = 1e-3.
double loop_area_factor(double x) {
  if (std::abs(x) < 1e-3) {
    const double x2 = x * x;
    return x / 6.0 - x * x2 / 120.0 + x * x2 * x2 / 5040.0;
  }
  return (x - std::sin(x)) / (x * x);
}

double sinc(double x) {
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

}  // namespace

ModeEvolution evolve_mode(cplx c, double detuning, double t) {
  const double x = detuning * t;
  // (c/delta)(1 - e^{ix}) written without the 1/delta cancellation
  const cplx alpha = cplx(0.0, -1.0) * c * t * sinc(0.5 * x) * std::polar(1.0, 0.5 * x);
  const double phi = std::norm(c) * t * t * loop_area_factor(x);
  return {alpha, phi};
}

std::array<cplx, 4> state_drives(const ModeSpectrum& modes, std::span<const double> eta,
                                 const DriveConfig& drive, int mode) {
  std::array<cplx, 4> c{};
  for (int i = 0; i < 4; ++i) {
    cplx sum = 0.0;
    for (int k = 0; k < 2; ++k)
      sum += modes.participation(drive.target_ions[k], mode) * drive.ion_drive(k) *
             static_cast<double>(kSpinZ[i][k]);
    c[i] = eta[mode] * sum;
  }
  return c;
}

GatePhases gate_phases(const CrystalSpec& spec, const ModeSpectrum& modes, const DriveConfig& drive,
                       std::optional<double> t, std::span<const int> mode_subset) {
  GatePhases g;
  g.time = t.value_or(drive.gate_time());
  if (mode_subset.empty()) {
    for (int m = 0; m < modes.size(); ++m) g.modes.push_back(m);
  } else {
    g.modes.assign(mode_subset.begin(), mode_subset.end());
  }
  const auto eta = lamb_dicke(spec, modes, drive.k_eff);
  const double drive_freq = drive.drive_frequency(modes);
  for (int m : g.modes) {
    const double det = modes.frequencies.at(m) - drive_freq;
    g.detunings.push_back(det);
    const auto c = state_drives(modes, eta, drive, m);
    for (int i = 0; i < 4; ++i) {
      const auto ev = evolve_mode(c[i], det, g.time);
      g.phi[i] += ev.phi;
      g.drives[i].push_back(c[i]);
      g.residual[i].push_back(ev.alpha);
    }
  }
  g.chi = g.phi[1] + g.phi[2] - g.phi[0] - g.phi[3];
  return g;
}

Eigen::Matrix4cd coherent_spin_state(const GatePhases& phases, std::span<const double> nbar) {
  if (nbar.size() != phases.modes.size())
    throw ConfigError("coherent_spin_state: need one thermal occupation per included mode");
  Eigen::Matrix4cd rho;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      double log_mag = 0.0;
      double phase = phases.phi[i] - phases.phi[j];
      for (std::size_t m = 0; m < nbar.size(); ++m) {
        const cplx ai = phases.residual[i][m];
        const cplx aj = phases.residual[j][m];
        phase -= std::imag(aj * std::conj(ai));
        log_mag -= std::norm(ai - aj) * (nbar[m] + 0.5);
      }
      rho(i, j) = 0.25 * std::polar(std::exp(log_mag), phase);
    }
  }
  return rho;
}

double coherent_fidelity(const GatePhases& phases, std::span<const double> nbar) {
  return bell_frame_fidelity(coherent_spin_state(phases, nbar)).fidelity;
}

SpectatorResult spectator_budget(const CrystalSpec& spec, const DriveConfig& drive,
                                 Direction direction, std::span<const double> nbar) {
  const auto modes = compute_modes(spec, direction);
  DriveConfig d = drive;
  d.direction = direction;
  if (nbar.size() != static_cast<std::size_t>(modes.size()))
    throw ConfigError("spectator_budget: need one thermal occupation per mode");

  SpectatorResult r;
  r.drive = calibrate_amplitudes(spec, modes, d, {.include_spectators = true});
  r.phases = gate_phases(spec, modes, r.drive);
  r.infidelity = std::max(0.0, 1.0 - coherent_fidelity(r.phases, nbar));
  return r;
}

std::vector<TrajectoryPoint> trajectory(cplx c, double detuning, double t_end, int n_points) {
  std::vector<TrajectoryPoint> pts;
  if (n_points < 2) n_points = 2;
  pts.reserve(n_points);
  for (int k = 0; k < n_points; ++k) {
    const double t = t_end * k / (n_points - 1);
    const auto ev = evolve_mode(c, detuning, t);
    pts.push_back({t, ev.alpha, ev.phi});
  }
  return pts;
}

void write_trajectory_csv(std::ostream& os, const std::vector<TrajectoryPoint>& pts) {
  write_csv_row(os, {"t_s", "re_alpha", "im_alpha", "phi"});
  for (const auto& p : pts)
    write_csv_row(os, {num(p.t), num(p.alpha.real()), num(p.alpha.imag()), num(p.phi)});
}

}  // namespace iongrad

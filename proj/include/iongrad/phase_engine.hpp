#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "iongrad/chain_modes.hpp"
#include "iongrad/drive_model.hpp"
#include "iongrad/two_qubit.hpp"

namespace iongrad {

/// Displacement and accumulated geometric phase of one driven mode.
struct ModeEvolution {
  cplx alpha;
  double phi = 0.0;
};

/// Exact solution of H = c a^dag e^{i delta t} + h.c. (units of hbar) from the
/// vacuum: alpha(t) = (c/delta)(1 - e^{i delta t}),
/// phi(t) = Im int alpha^* dalpha = (|c|/delta)^2 (delta t - sin delta t).
/// delta is mode frequency minus drive frequency.
ModeEvolution evolve_mode(cplx c, double detuning, double t);

/// c_{i,m} for the four spin states on mode m.
std::array<cplx, 4> state_drives(const ModeSpectrum& modes, std::span<const double> eta,
                                 const DriveConfig& drive, int mode);

struct GatePhases {
  double time = 0.0;
  std::array<double, 4> phi{};  // Phi_00, Phi_01, Phi_10, Phi_11
  /// chi = Phi_01 + Phi_10 - Phi_00 - Phi_11; +-pi for a maximally entangling gate.
  double chi = 0.0;
  std::vector<int> modes;                           // indices of included modes
  std::vector<double> detunings;                    // per included mode
  std::array<std::vector<cplx>, 4> drives;          // c_{i,m}
  std::array<std::vector<cplx>, 4> residual;        // alpha_{i,m}(time)
};

/// Phases at time t (default: the drive's gate time) summed over `mode_subset`
/// (default: every mode of the spectrum).
GatePhases gate_phases(const CrystalSpec& spec, const ModeSpectrum& modes, const DriveConfig& drive,
                       std::optional<double> t = std::nullopt,
                       std::span<const int> mode_subset = {});

/// Reduced spin state after the gate for input |++> and thermal modes:
/// rho_ij = 1/4 e^{i(Phi_i - Phi_j)} prod_m e^{-i Im(alpha_j alpha_i^*)}
///          exp(-|alpha_i - alpha_j|^2 (nbar_m + 1/2)).
/// `nbar` is indexed like GatePhases::modes.
Eigen::Matrix4cd coherent_spin_state(const GatePhases& phases, std::span<const double> nbar);

/// Bell-state fidelity (frame-optimised) of the coherent output.
double coherent_fidelity(const GatePhases& phases, std::span<const double> nbar);

struct SpectatorResult {
  double infidelity = 0.0;
  DriveConfig drive;  // recalibrated on the requested direction
  GatePhases phases;
};

/// Coherent error of the gate from all non-target modes of `direction`. The
/// drive keeps its pair, detuning, loop count and phases; its amplitude is
/// recalibrated with every mode of that direction included, so the target
/// loop closes and the entangling phase is exact. `nbar` is per mode.
SpectatorResult spectator_budget(const CrystalSpec& spec, const DriveConfig& drive,
                                 Direction direction, std::span<const double> nbar);

struct TrajectoryPoint {
  double t = 0.0;
  cplx alpha;
  double phi = 0.0;
};

std::vector<TrajectoryPoint> trajectory(cplx c, double detuning, double t_end, int n_points);

/// CSV with columns t_s,re_alpha,im_alpha,phi.
void write_trajectory_csv(std::ostream& os, const std::vector<TrajectoryPoint>& pts);

}  // namespace iongrad

#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <string_view>

namespace iongrad {

using cplx = std::complex<double>;

// Two-qubit basis index i = 2 q1 + q2; qubit value 0 has sigma_z = +1.
inline constexpr std::array<std::array<int, 2>, 4> kSpinZ{{{+1, +1}, {+1, -1}, {-1, +1}, {-1, -1}}};
inline constexpr std::array<std::string_view, 4> kSpinLabels{"00", "01", "10", "11"};

/// exp(-i theta/2 (cos(phi) X + sin(phi) Y)).
Eigen::Matrix2cd rotation(double theta, double phi);
/// The same rotation applied to both qubits.
Eigen::Matrix4cd collective_rotation(double theta, double phi);

/// Overlap with (|00> - i|11>)/sqrt(2).
double bell_target_fidelity(const Eigen::Matrix4cd& rho);

struct FrameFidelity {
  double fidelity = 0.0;
  double phase_q1 = 0.0;  // local z-phase of qubit 1 in the best frame
  double phase_q2 = 0.0;
  int chi_sign = 1;       // sign of the ideal entangling phase
};

/// Overlap of a spin density matrix with the ideal sigma_z x sigma_z gate output
/// exp(i(b z1 + c z2 - chi z1 z2 / 4)) |++>, chi = +-pi, maximised over the
/// single-qubit frame phases (b, c) and the sign of chi. Single-qubit z phases
/// are removed by the echo in the full sequence, so they do not count as error.
FrameFidelity bell_frame_fidelity(const Eigen::Matrix4cd& rho);

/// Density matrix of |++> (both qubits in (|0> + |1>)/sqrt(2)).
Eigen::Matrix4cd plus_plus_state();

}  // namespace iongrad

#pragma once

#include <Eigen/Dense>
#include <array>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "iongrad/chain_modes.hpp"
#include "iongrad/drive_model.hpp"
#include "iongrad/two_qubit.hpp"

namespace iongrad {

/// How T1 enters: `symmetric` relaxes both ways at 1/T1 each (sigma- and
/// sigma+); `decay` is sigma- only, towards qubit state 0.
enum class T1Model { symmetric, decay };
/// Pure dephasing as independent sigma_z per qubit, or one collective
/// (z1 + z2) channel.
enum class DephasingModel { independent, collective };

std::string_view to_string(T1Model m);
std::string_view to_string(DephasingModel m);

struct NoiseModel {
  static constexpr double kInf = std::numeric_limits<double>::infinity();

  double t1 = 7.0;
  double t2 = 0.2;
  double motional_coherence_axial = 0.040;
  double motional_coherence_radial = 0.040;
  double heating_rate_per_ion = 1.5;  // quanta/s on the axial COM mode
  /// COM heating of a mode at omega scales as (omega_ax / omega)^exponent.
  double heating_frequency_exponent = 1.0;
  /// Heating of non-COM target modes relative to the COM value.
  double noncom_heating_scale = 0.1;
  double scattering_rayleigh = 0.0;  // events/s per ion, bookkeeping only
  double scattering_raman = 0.0;
  double spam_error = 0.002;
  T1Model t1_model = T1Model::symmetric;
  DephasingModel dephasing = DephasingModel::independent;
  double nbar_axial = 0.12;
  double nbar_radial = 1.0;

  double motional_coherence(Direction d) const {
    return d == Direction::axial ? motional_coherence_axial : motional_coherence_radial;
  }
  double nbar(Direction d) const { return d == Direction::axial ? nbar_axial : nbar_radial; }
  /// sigma_z rate left for pure dephasing after the T1 part of 1/T2.
  double pure_dephasing_rate() const;
  void validate() const;
};

/// Heating rate (quanta/s) of one mode of the chain under `noise`.
double mode_heating_rate(const NoiseModel& noise, const CrystalSpec& spec,
                         const ModeSpectrum& modes, int mode);

enum class Channel { qubit_t1, qubit_t2, motional_dephasing, heating };
std::string_view to_string(Channel c);

enum class JumpKind { sigma_minus, sigma_plus, sigma_z, sigma_z_sum, number, annihilate, create };

struct JumpOperator {
  Channel channel;
  JumpKind kind;
  int qubit = 0;  // for single-qubit kinds
  double rate = 0.0;
};

/// Channels with nonzero rate. Heating uses equal a and a^dag rates.
std::vector<JumpOperator> build_jump_operators(const NoiseModel& noise, double motional_coherence,
                                               double nbar_dot);
/// Only the channels of one kind.
std::vector<JumpOperator> select_channel(const std::vector<JumpOperator>& ops, Channel c);

/// Single-mode gate: H = sum_i |i><i| (x) (c_i a^dag e^{i delta t} + h.c.) + sum_i s_i |i><i|.
struct GateHamiltonian {
  std::array<cplx, 4> drive{};
  double detuning = 0.0;
  std::array<double, 4> spin_shift{};  // rad/s
  double max_displacement() const;
};

/// Target-mode Hamiltonian of `drive` as configured (no recalibration).
GateHamiltonian target_hamiltonian(const CrystalSpec& spec, const ModeSpectrum& modes,
                                   const DriveConfig& drive);

/// Two qubits (x) Fock space 0..n_max; index = spin * (n_max + 1) + n.
struct OpenSystemState {
  int n_max = 0;
  Eigen::MatrixXcd rho;
  double time = 0.0;

  int fock_dim() const { return n_max + 1; }
  Eigen::Matrix4cd spin() const;  // motion traced out
  double trace() const { return rho.trace().real(); }
  double purity() const;
  double hermiticity_error() const;
  double min_eigenvalue() const;
  /// Population of the two highest Fock levels.
  double top_leakage() const;
};

int default_n_max(double nbar, double max_displacement);

OpenSystemState thermal_state(const Eigen::Matrix4cd& spin, double nbar, int n_max);

struct EvolveOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  double leakage_limit = 1e-6;
};

/// Integrate the master equation from state.time to t_end.
/// Throws TruncationError when the top two Fock levels hold more than
/// opts.leakage_limit.
OpenSystemState evolve(const GateHamiltonian& h, const std::vector<JumpOperator>& ops,
                       OpenSystemState state, double t_end, const EvolveOptions& opts = {});

/// (U (x) 1) rho (U (x) 1)^dag.
void apply_spin_unitary(OpenSystemState& state, const Eigen::Matrix4cd& u);
/// Independent single-qubit depolarising with probability p on each qubit.
void apply_depolarizing(OpenSystemState& state, double p);

/// Frame-optimised overlap with the ideal gate output, motion traced out.
double bell_fidelity(const OpenSystemState& state);

struct GateRun {
  OpenSystemState state;
  double fidelity = 0.0;
};

/// |++> (x) thermal(nbar) through one gate of duration t_gate.
GateRun run_gate(const GateHamiltonian& h, const std::vector<JumpOperator>& ops, double nbar,
                 double t_gate, std::optional<int> n_max = std::nullopt,
                 const EvolveOptions& opts = {});

/// F(no channels) - F(channels).
double infidelity_contribution(const GateHamiltonian& h, const std::vector<JumpOperator>& ops,
                               double nbar, double t_gate,
                               std::optional<int> n_max = std::nullopt);

/// {"trace","purity","fidelity","top_fock_leakage","min_eigenvalue","n_max","time_s"}.
std::string diagnostics_json(const OpenSystemState& state);
/// One row per line, `re,im` pairs separated by spaces; first line "dim D".
void write_matrix_text(std::ostream& os, const Eigen::MatrixXcd& m);

}  // namespace iongrad

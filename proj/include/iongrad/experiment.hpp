#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "iongrad/lindblad.hpp"

namespace iongrad {

struct SequenceSpec {
  int n_gates = 1;
  bool echo = true;
  std::optional<double> analysis_phase;  // extra R(pi/2, phi) after the closing pulse
  int n_shots = 200;
  std::uint64_t rng_seed = 1;
  double stark_shift = 0.0;     // rad/s, equal on both qubits, during the gate
  double rf_error = 0.0;        // depolarising probability per qubit per RF pulse

  void validate() const;
};

/// One gate on the target mode plus the noise it runs under.
struct GateSetup {
  GateHamiltonian hamiltonian;
  double t_gate = 0.0;
  int n_loops = 1;
  std::vector<JumpOperator> channels;
  double nbar = 0.0;
  std::optional<int> n_max;
};

struct SequenceResult {
  Eigen::Matrix4cd rho;          // two-qubit state, motion traced out
  double fidelity = 0.0;         // overlap with (|00> - i|11>)/sqrt(2)
  double closing_phase = 0.0;    // phase of the last pi/2 pulse
  OpenSystemState full;
};

/// R(pi/2, 0), then per gate [half gate, R(pi, 0), half gate] (no pi pulse
/// without echo), then R(pi/2, phi_close). phi_close in {0, pi} is picked from
/// the noiseless spin evolution so the ideal output is the target Bell state.
SequenceResult run_sequence(const GateSetup& gate, const SequenceSpec& seq);

/// 64-bit splitmix of (seed, stream): independent generator seeds per replication.
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream);

struct Sampling {
  int n_shots = 200;
  std::uint64_t seed = 1;
};

/// Multinomial counts of the four outcomes.
std::array<int, 4> sample_outcomes(const std::array<double, 4>& probs, int n_shots,
                                   std::uint64_t seed);

/// Parity z1 z2 of rho after R(pi/2, phi) on both qubits.
double parity(const Eigen::Matrix4cd& rho, double phi);

struct ParityScan {
  std::vector<double> phases;
  std::vector<double> parities;
  std::vector<double> errors;  // sqrt((1 - P^2) / N), zero for exact scans
  double amplitude = 0.0;      // |A| from P = c + a sin(2 phi) + b cos(2 phi)
  double amplitude_error = 0.0;
  double offset = 0.0;
  double populations = 0.0;    // P00 + P11 at closure
  double residual = 0.0;       // rms fit residual
};

/// Exact when `sampling` is empty. Throws FitError for fewer than 8 phases,
/// a span below one period (pi) or a singular design.
ParityScan parity_scan(const Eigen::Matrix4cd& rho, std::span<const double> phases,
                       std::optional<Sampling> sampling = std::nullopt);

std::vector<double> phase_grid(int n_points);

struct StateFidelity {
  double fidelity = 0.0;
  bool clamped = false;
};

/// F = (P00 + P11)/2 + |A|/2, clamped to [0, 1].
StateFidelity state_fidelity(double populations, double amplitude);

/// depolarizing: F(k) = A0 p^k + 1/4, eps = 3/4 (1 - p), spam = 1 - A0 / (3/4).
/// exponential:  F(k) = A0 p^k,        eps = -ln p,        spam = 1 - A0.
enum class DecayModel { depolarizing, exponential };

struct DecayPoint {
  int k = 1;
  double fidelity = 0.0;
  double sigma = 0.0;  // all zero means unweighted
  /// Shots behind the estimate. When every point has shots > 0 the weights are
  /// refitted from the model prediction instead of the sampled rate.
  int shots = 0;
};

struct DecayFit {
  DecayModel model = DecayModel::depolarizing;
  double epsilon = 0.0;
  double epsilon_error = 0.0;  // one standard error
  double epsilon_ci_low = 0.0;  // 95 %
  double epsilon_ci_high = 0.0;
  double amplitude = 0.0;
  double p = 0.0;
  double spam = 0.0;
  double chi2_red = 0.0;
  int iterations = 0;
  bool degenerate = false;

  std::string json() const;
};

DecayFit decay_fit(std::span<const DecayPoint> points, DecayModel model = DecayModel::depolarizing);

double decay_model_value(DecayModel model, double epsilon, double spam, int k);

/// Fidelity estimate from n_shots Bernoulli trials at the model value. The
/// error bar uses the succession-smoothed rate (x+1)/(N+2).
std::vector<DecayPoint> sample_decay(std::span<const int> ks, double epsilon, double spam,
                                     const Sampling& sampling,
                                     DecayModel model = DecayModel::depolarizing);

struct ResidualPoint {
  double t = 0.0;
  double infidelity = 0.0;
  double error = 0.0;  // sampled only; 1/(N+1) for zero failures
  int failures = 0;
};

/// Frame-optimised Bell infidelity of a single-mode gate stopped at each time
/// (thermal occupation nbar). Sampled with Bernoulli trials when asked.
std::vector<ResidualPoint> residual_spin_motion(const GateHamiltonian& h, double nbar,
                                                std::span<const double> times,
                                                std::optional<Sampling> sampling = std::nullopt);

}  // namespace iongrad

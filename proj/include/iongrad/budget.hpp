#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "iongrad/chain_modes.hpp"
#include "iongrad/drive_model.hpp"
#include "iongrad/lindblad.hpp"

namespace iongrad {

enum class Mechanism {
  spectator_modes,
  qubit_t2,
  motional_decoherence,
  rf_pulses,
  com_heating,
  qubit_t1,
  scattering
};
enum class Source { simulated, input_constant };

std::string_view to_string(Mechanism m);
std::string_view label(Mechanism m);  // Table-style row label
std::string_view to_string(Source s);

inline constexpr std::array<Mechanism, 7> kMechanisms{
    Mechanism::spectator_modes, Mechanism::qubit_t2,    Mechanism::motional_decoherence,
    Mechanism::rf_pulses,       Mechanism::com_heating, Mechanism::qubit_t1,
    Mechanism::scattering};

/// Measured rows passed through unchanged.
struct BudgetInputs {
  double rf_pulses = 2.4e-4;
  double scattering = 1.2e-4;
};

struct BudgetOptions {
  bool axial = true;
  std::optional<Direction> radial = Direction::radial_x;
  int threads = 0;  // 0: worker_count()
  std::optional<int> n_max;
};

struct BudgetRow {
  Mechanism mechanism;
  Source source = Source::simulated;
  double axial = 0.0;
  double radial = 0.0;
};

struct BudgetReport {
  std::vector<BudgetRow> rows;
  bool has_axial = false;
  bool has_radial = false;
  Direction radial_axis = Direction::radial_x;
  double total_axial = 0.0;
  double total_radial = 0.0;
  std::string parameters_json;  // snapshot of the inputs

  const BudgetRow& row(Mechanism m) const;
  void write_text(std::ostream& os) const;
  void write_csv(std::ostream& os) const;
  std::string json() const;
};

/// One simulated direction: spectator row from the closed form with every mode
/// of the direction, noise rows from the master equation on the target mode
/// with a target-only calibration, each channel on its own.
BudgetReport assemble_budget(const CrystalSpec& spec, const DriveConfig& drive,
                             const NoiseModel& noise, const BudgetInputs& inputs = {},
                             const BudgetOptions& opt = {});

struct SweepOptions {
  /// Axial frequency is lowered where needed so the softest radial mode stays
  /// above this multiple of it.
  double min_radial_ratio = 0.4;
  int threads = 0;
  std::optional<int> n_max;
};

struct PairResult {
  std::array<int, 2> ions{0, 1};
  std::string role;  // "single", "inner" or "outer"
  bool skipped = false;
  std::string warning;
  BudgetReport report;
};

struct ChainPoint {
  int n_ions = 0;
  double omega_ax = 0.0;
  std::vector<PairResult> pairs;
  double mean_total = 0.0;  // mean axial total over the pairs that ran
};

std::array<int, 2> innermost_pair(int n_ions);
std::array<int, 2> outermost_pair(int n_ions);

std::vector<ChainPoint> fidelity_vs_chain_length(const CrystalSpec& templ, const DriveConfig& drive,
                                                 const NoiseModel& noise, const BudgetInputs& inputs,
                                                 const std::vector<int>& n_list,
                                                 const SweepOptions& opt = {});

/// Columns n_ions,pair,total_infidelity,row_breakdown_json; one row per N.
void write_sweep_csv(std::ostream& os, const std::vector<ChainPoint>& points);

}  // namespace iongrad

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "iongrad/budget.hpp"
#include "iongrad/chain_modes.hpp"
#include "iongrad/drive_model.hpp"
#include "iongrad/experiment.hpp"
#include "iongrad/lindblad.hpp"

namespace iongrad {

struct ExperimentConfig {
  SequenceSpec sequence;
  std::vector<int> decay_gates{1, 3, 5, 7, 9};
  int parity_points = 32;
  int residual_points = 41;
  double residual_span = 0.25;  // fraction of one loop period on each side of closure
};

struct ScanConfig {
  double ramsey_time = 5e-6;
  int points = 801;
};

struct OutputConfig {
  std::string directory = "out";
  bool csv = true;
  bool json = true;
  bool plots = false;
};

struct RunConfig {
  int schema_version = 1;
  CrystalSpec crystal;
  BeamPair beams;
  DriveConfig drive;
  bool calibrate_spectators = true;
  NoiseModel noise;
  std::optional<int> n_max;
  BudgetInputs budget;
  std::optional<Direction> budget_radial = Direction::radial_x;
  std::vector<int> sweep_n{2, 4, 6, 8, 10, 12};
  double sweep_min_radial_ratio = 0.4;
  ExperimentConfig experiment;
  ScanConfig scan;
  OutputConfig outputs;
};

inline constexpr int kSchemaVersion = 1;

/// Parse JSON (comments allowed). Frequencies are read in Hz and stored as
/// rad/s. Unknown keys, wrong types and invalid values throw ConfigError
/// naming the key path.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace iongrad

#include "iongrad/budget.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "iongrad/csv.hpp"
#include "iongrad/errors.hpp"
#include "iongrad/parallel.hpp"
#include "iongrad/phase_engine.hpp"
#include "json.hpp"

namespace iongrad {

using json = nlohmann::ordered_json;

std::string_view to_string(Mechanism m) {
  switch (m) {
    case Mechanism::spectator_modes: return "spectator_modes";
    case Mechanism::qubit_t2: return "qubit_t2";
    case Mechanism::motional_decoherence: return "motional_decoherence";
    case Mechanism::rf_pulses: return "rf_pulses";
    case Mechanism::com_heating: return "com_heating";
    case Mechanism::qubit_t1: return "qubit_t1";
    case Mechanism::scattering: return "scattering";
  }
  return "?";
}

std::string_view label(Mechanism m) {
  switch (m) {
    case Mechanism::spectator_modes: return "Spectator modes";
    case Mechanism::qubit_t2: return "Qubit T2 decoherence";
    case Mechanism::motional_decoherence: return "Motional decoherence";
    case Mechanism::rf_pulses: return "RF pulses";
    case Mechanism::com_heating: return "COM mode heating";
    case Mechanism::qubit_t1: return "Qubit T1 decay";
    case Mechanism::scattering: return "Rayleigh & Raman scattering";
  }
  return "?";
}

std::string_view to_string(Source s) {
  return s == Source::simulated ? "simulated" : "input_constant";
}

const BudgetRow& BudgetReport::row(Mechanism m) const {
  for (const auto& r : rows)
    if (r.mechanism == m) return r;
  throw std::out_of_range("budget row missing");
}

void BudgetReport::write_text(std::ostream& os) const {
  char line[160];
  std::snprintf(line, sizeof line, "%-30s %14s %14s\n", "Error source (x1e-4)",
                has_axial ? "Axial" : "-", has_radial ? std::string(to_string(radial_axis)).c_str() : "-");
  os << line;
  auto cell = [](bool on, double v) {
    char b[32];
    if (on)
      std::snprintf(b, sizeof b, "%.1f", v * 1e4);
    else
      std::snprintf(b, sizeof b, "-");
    return std::string(b);
  };
  for (const auto& r : rows) {
    std::string name(label(r.mechanism));
    if (r.source == Source::input_constant) name += " *";
    std::snprintf(line, sizeof line, "%-30s %14s %14s\n", name.c_str(), cell(has_axial, r.axial).c_str(),
                  cell(has_radial, r.radial).c_str());
    os << line;
  }
  std::snprintf(line, sizeof line, "%-30s %14s %14s\n", "Total", cell(has_axial, total_axial).c_str(),
                cell(has_radial, total_radial).c_str());
  os << line << "* input constant, not simulated\n";
}

void BudgetReport::write_csv(std::ostream& os) const {
  write_csv_row(os, {"mechanism", "source", "infidelity_axial", "infidelity_radial"});
  auto val = [](bool on, double v) { return on ? num(v) : std::string(); };
  for (const auto& r : rows)
    write_csv_row(os, {std::string(to_string(r.mechanism)), std::string(to_string(r.source)),
                       val(has_axial, r.axial), val(has_radial, r.radial)});
  write_csv_row(os, {"total", "", val(has_axial, total_axial), val(has_radial, total_radial)});
}

std::string BudgetReport::json() const {
  iongrad::json j;
  j["radial_axis"] = std::string(to_string(radial_axis));
  auto& rs = j["rows"] = iongrad::json::array();
  for (const auto& r : rows) {
    iongrad::json o;
    o["mechanism"] = std::string(to_string(r.mechanism));
    o["source"] = std::string(to_string(r.source));
    if (has_axial) o["infidelity_axial"] = r.axial;
    if (has_radial) o["infidelity_radial"] = r.radial;
    rs.push_back(o);
  }
  if (has_axial) j["total_axial"] = total_axial;
  if (has_radial) j["total_radial"] = total_radial;
  j["parameters"] = iongrad::json::parse(parameters_json.empty() ? "{}" : parameters_json);
  return j.dump(2);
}

namespace {

std::string snapshot(const CrystalSpec& spec, const DriveConfig& drive, const NoiseModel& noise,
                     const BudgetInputs& inputs) {
  json j;
  j["crystal"] = {{"n_ions", spec.n_ions},
                  {"axial_hz", spec.omega_ax / constants::two_pi},
                  {"radial_x_hz", spec.omega_rad_x / constants::two_pi},
                  {"radial_y_hz", spec.omega_rad_y / constants::two_pi}};
  j["drive"] = {{"target_ions", drive.target_ions},
                {"target_mode", drive.target_mode},
                {"detuning_hz", drive.detuning / constants::two_pi},
                {"n_loops", drive.n_loops},
                {"gate_time_s", drive.gate_time()}};
  j["noise"] = {{"t1_s", noise.t1},
                {"t2_s", noise.t2},
                {"t1_model", std::string(to_string(noise.t1_model))},
                {"dephasing", std::string(to_string(noise.dephasing))},
                {"motional_coherence_axial_s", noise.motional_coherence_axial},
                {"motional_coherence_radial_s", noise.motional_coherence_radial},
                {"heating_rate_per_ion", noise.heating_rate_per_ion},
                {"nbar_axial", noise.nbar_axial},
                {"nbar_radial", noise.nbar_radial}};
  j["inputs"] = {{"rf_pulses", inputs.rf_pulses}, {"scattering", inputs.scattering}};
  return j.dump();
}

struct DirectionPlan {
  Direction dir;
  ModeSpectrum modes;
  GateHamiltonian h;
  double t_gate = 0.0;
  double nbar = 0.0;
  std::vector<JumpOperator> ops;
  std::vector<double> nbar_all;
};

DirectionPlan plan(const CrystalSpec& spec, const DriveConfig& drive, const NoiseModel& noise,
                   Direction dir) {
  DirectionPlan p;
  p.dir = dir;
  p.modes = compute_modes(spec, dir);
  DriveConfig d = drive;
  d.direction = dir;
  d = calibrate_amplitudes(spec, p.modes, d, {.include_spectators = false});
  p.h = target_hamiltonian(spec, p.modes, d);
  p.t_gate = d.gate_time();
  p.nbar = noise.nbar(dir);
  p.ops = build_jump_operators(noise, noise.motional_coherence(dir),
                               mode_heating_rate(noise, spec, p.modes, d.target_mode));
  p.nbar_all.assign(p.modes.size(), p.nbar);
  return p;
}

// Task slots per direction.
enum Slot { kSpectator, kBaseline, kT1, kT2, kMotional, kHeating, kSlots };

Channel slot_channel(int s) {
  switch (s) {
    case kT1: return Channel::qubit_t1;
    case kT2: return Channel::qubit_t2;
    case kMotional: return Channel::motional_dephasing;
    default: return Channel::heating;
  }
}

std::string slot_name(int s) {
  switch (s) {
    case kSpectator: return "spectator_modes";
    case kBaseline: return "noiseless reference";
    case kT1: return "qubit_t1";
    case kT2: return "qubit_t2";
    case kMotional: return "motional_decoherence";
    default: return "com_heating";
  }
}

}  // namespace

BudgetReport assemble_budget(const CrystalSpec& spec, const DriveConfig& drive, const NoiseModel& noise,
                             const BudgetInputs& inputs, const BudgetOptions& opt) {
  spec.validate();
  noise.validate();
  if (inputs.rf_pulses < 0 || inputs.scattering < 0)
    throw ConfigError("budget input rows must be >= 0");

  std::vector<DirectionPlan> plans;
  if (opt.axial) plans.push_back(plan(spec, drive, noise, Direction::axial));
  if (opt.radial) plans.push_back(plan(spec, drive, noise, *opt.radial));

  std::vector<double> value(plans.size() * kSlots, 0.0);
  parallel_for(
      static_cast<int>(value.size()),
      [&](int task) {
        const auto& p = plans[task / kSlots];
        const int slot = task % kSlots;
        try {
          if (slot == kSpectator) {
            value[task] = spectator_budget(spec, drive, p.dir, p.nbar_all).infidelity;
            return;
          }
          std::vector<JumpOperator> ops;
          if (slot != kBaseline) {
            ops = select_channel(p.ops, slot_channel(slot));
            if (ops.empty()) {
              value[task] = std::nan("");  // filled with the baseline below
              return;
            }
          }
          value[task] = run_gate(p.h, ops, p.nbar, p.t_gate, opt.n_max).fidelity;
        } catch (const ConfigError& e) {
          throw ConfigError("budget row " + slot_name(slot) + " (" + std::string(to_string(p.dir)) +
                            "): " + e.what());
        } catch (const PhysicsError& e) {
          throw PhysicsError("budget row " + slot_name(slot) + " (" + std::string(to_string(p.dir)) +
                             "): " + e.what());
        }
      },
      opt.threads);

  BudgetReport rep;
  rep.has_axial = opt.axial;
  rep.has_radial = opt.radial.has_value();
  if (opt.radial) rep.radial_axis = *opt.radial;
  rep.parameters_json = snapshot(spec, drive, noise, inputs);

  for (Mechanism m : kMechanisms) {
    BudgetRow row{m};
    if (m == Mechanism::rf_pulses || m == Mechanism::scattering) row.source = Source::input_constant;
    for (std::size_t k = 0; k < plans.size(); ++k) {
      const double* v = &value[k * kSlots];
      double x = 0.0;
      auto noise_row = [&](int slot) { return std::isnan(v[slot]) ? 0.0 : v[kBaseline] - v[slot]; };
      switch (m) {
        case Mechanism::spectator_modes: x = v[kSpectator]; break;
        case Mechanism::qubit_t2: x = noise_row(kT2); break;
        case Mechanism::motional_decoherence: x = noise_row(kMotional); break;
        case Mechanism::com_heating: x = noise_row(kHeating); break;
        case Mechanism::qubit_t1: x = noise_row(kT1); break;
        case Mechanism::rf_pulses: x = inputs.rf_pulses; break;
        case Mechanism::scattering: x = inputs.scattering; break;
      }
      (plans[k].dir == Direction::axial ? row.axial : row.radial) = x;
    }
    rep.rows.push_back(row);
  }
  for (const auto& r : rep.rows) {
    rep.total_axial += r.axial;
    rep.total_radial += r.radial;
  }
  return rep;
}

std::array<int, 2> innermost_pair(int n) {
  const int hi = (n + 1) / 2;  // ceil(n/2)
  return {hi - 1, hi};
}

std::array<int, 2> outermost_pair(int n) { return {0, n - 1}; }

std::vector<ChainPoint> fidelity_vs_chain_length(const CrystalSpec& templ, const DriveConfig& drive,
                                                 const NoiseModel& noise, const BudgetInputs& inputs,
                                                 const std::vector<int>& n_list, const SweepOptions& opt) {
  std::vector<ChainPoint> points;
  struct Task {
    int point;
    int pair;
  };
  std::vector<Task> tasks;
  for (int n : n_list) {
    if (n < 2) throw ConfigError("sweep n_ions must be >= 2 (a gate needs a pair)");
    ChainPoint cp;
    cp.n_ions = n;
    cp.omega_ax = std::min(templ.omega_ax, max_stable_axial_frequency(
                                               n, std::min(templ.omega_rad_x, templ.omega_rad_y),
                                               opt.min_radial_ratio));
    auto add = [&](std::array<int, 2> ions, const char* role) {
      PairResult pr;
      pr.ions = ions;
      pr.role = role;
      cp.pairs.push_back(std::move(pr));
    };
    if (n == 2) {
      add({0, 1}, "single");
    } else {
      add(innermost_pair(n), "inner");
      add(outermost_pair(n), "outer");
    }
    for (std::size_t k = 0; k < cp.pairs.size(); ++k)
      tasks.push_back({static_cast<int>(points.size()), static_cast<int>(k)});
    points.push_back(std::move(cp));
  }

  parallel_for(
      static_cast<int>(tasks.size()),
      [&](int t) {
        auto& cp = points[tasks[t].point];
        auto& pr = cp.pairs[tasks[t].pair];
        CrystalSpec spec = templ;
        spec.n_ions = cp.n_ions;
        spec.omega_ax = cp.omega_ax;
        DriveConfig d = drive;
        d.target_ions = pr.ions;
        d.direction = Direction::axial;
        d.target_mode = 0;
        BudgetOptions bo;
        bo.radial = std::nullopt;
        bo.threads = 1;
        bo.n_max = opt.n_max;
        try {
          pr.report = assemble_budget(spec, d, noise, inputs, bo);
        } catch (const CalibrationError& e) {
          pr.skipped = true;
          pr.warning = e.what();
        }
      },
      opt.threads);

  for (auto& cp : points) {
    int used = 0;
    for (const auto& pr : cp.pairs) {
      if (pr.skipped) continue;
      cp.mean_total += pr.report.total_axial;
      ++used;
    }
    cp.mean_total = used ? cp.mean_total / used : std::nan("");
  }
  return points;
}

void write_sweep_csv(std::ostream& os, const std::vector<ChainPoint>& points) {
  write_csv_row(os, {"n_ions", "pair", "total_infidelity", "row_breakdown_json"});
  for (const auto& cp : points) {
    std::string pair;
    json pairs = json::array();
    for (const auto& pr : cp.pairs) {
      if (!pair.empty()) pair += "+";
      pair += std::to_string(pr.ions[0]) + "-" + std::to_string(pr.ions[1]);
      json o;
      o["role"] = pr.role;
      o["ions"] = pr.ions;
      o["skipped"] = pr.skipped;
      if (pr.skipped) {
        o["warning"] = pr.warning;
      } else {
        for (const auto& r : pr.report.rows) o[std::string(to_string(r.mechanism))] = r.axial;
        o["total"] = pr.report.total_axial;
      }
      pairs.push_back(o);
    }
    json b;
    b["axial_hz"] = cp.omega_ax / constants::two_pi;
    b["pairs"] = pairs;
    write_csv_row(os, {std::to_string(cp.n_ions), pair, num(cp.mean_total), b.dump()});
  }
}

}  // namespace iongrad

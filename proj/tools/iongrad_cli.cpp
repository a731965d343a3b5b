// iongrad: command-line driver for the light-shift gate simulator.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "iongrad/budget.hpp"
#include "iongrad/config.hpp"
#include "iongrad/csv.hpp"
#include "iongrad/errors.hpp"
#include "iongrad/experiment.hpp"
#include "iongrad/phase_engine.hpp"
#include "iongrad/svg_plot.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace iongrad;
using json = nlohmann::ordered_json;

namespace {

struct Globals {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string format;
  bool plots = false;
};

struct Output {
  fs::path dir;
  bool want_csv = true;
  bool want_json = true;
  bool want_plots = false;

  void write(const std::string& name, const std::string& content) const {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    write_text_file(dir / name, content);
  }
  void csv_file(const std::string& name, const std::string& content) const {
    if (want_csv) write(name, content);
  }
  void json_file(const std::string& name, const json& j) const {
    if (want_json) write(name, j.dump(2) + "\n");
  }
  void plot(const std::string& name, const Plot& p) const {
    if (want_plots) write(name, render_svg(p));
  }
};

RunConfig load(const Globals& g) {
  RunConfig cfg;
  if (!g.config.empty()) cfg = load_config(g.config);
  if (g.seed) cfg.experiment.sequence.rng_seed = *g.seed;
  if (!g.out.empty()) cfg.outputs.directory = g.out;
  if (!g.format.empty()) {
    cfg.outputs.csv = g.format != "json";
    cfg.outputs.json = g.format != "csv";
  }
  if (g.plots) cfg.outputs.plots = true;
  return cfg;
}

Output output(const RunConfig& cfg) {
  return {cfg.outputs.directory, cfg.outputs.csv, cfg.outputs.json, cfg.outputs.plots};
}

double hz(double w) { return w / constants::two_pi; }

// ---------------------------------------------------------------- modes

void cmd_modes(const RunConfig& cfg) {
  const Output out = output(cfg);
  const auto eq = solve_equilibrium(cfg.crystal);
  std::ostringstream csv;
  bool header = true;
  json spectra = json::array();
  for (Direction d : {Direction::axial, Direction::radial_x, Direction::radial_y}) {
    const auto modes = d == Direction::axial ? axial_modes(cfg.crystal, eq)
                                             : radial_modes(cfg.crystal, eq, d);
    const int n = modes.size();
    const double ortho =
        (modes.vectors.transpose() * modes.vectors - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
    std::fprintf(stderr, "%-8s %2d modes, orthonormality error %.2e %s\n",
                 std::string(to_string(d)).c_str(), n, ortho, ortho < 1e-10 ? "ok" : "FAILED");
    write_spectrum_csv(csv, modes, header);
    header = false;
    json freqs = json::array();
    for (double w : modes.frequencies) freqs.push_back(hz(w));
    spectra.push_back({{"direction", std::string(to_string(d))}, {"freq_hz", freqs}});
  }
  const auto rep = mode_spacing_report(cfg.crystal, cfg.drive.detuning);
  json j;
  j["n_ions"] = cfg.crystal.n_ions;
  j["delta_hz"] = hz(rep.delta);
  j["breathing_ratio"] = rep.breathing_ratio;
  j["nearest_mode_separation_in_delta"] = {
      {"axial", rep.axial}, {"radial_x", rep.radial_x}, {"radial_y", rep.radial_y}};
  j["length_scale_m"] = eq.length_scale;
  j["positions_m"] = eq.positions;
  j["spectra"] = spectra;
  out.csv_file("spectra.csv", csv.str());
  out.json_file("spacing.json", j);
  std::printf("breathing/COM ratio %.12f\n", rep.breathing_ratio);
  std::printf("nearest-mode separation / delta: axial %.3f  radial_x %.3f  radial_y %.3f\n", rep.axial,
              rep.radial_x, rep.radial_y);
}

// ---------------------------------------------------------------- gate

void cmd_gate(const RunConfig& cfg, const std::string& direction_override) {
  const Output out = output(cfg);
  DriveConfig drive = cfg.drive;
  if (!direction_override.empty()) drive.direction = direction_from_string(direction_override);
  const auto modes = compute_modes(cfg.crystal, drive.direction);
  drive = calibrate_force(cfg.beams, cfg.crystal, drive, {.include_spectators = cfg.calibrate_spectators});
  const double nbar = cfg.noise.nbar(drive.direction);

  const auto all = gate_phases(cfg.crystal, modes, drive);
  const int target[] = {drive.target_mode};
  const auto single = gate_phases(cfg.crystal, modes, drive, std::nullopt, target);
  const std::vector<double> nb_all(modes.size(), nbar);
  const double nb1[] = {nbar};
  const double f_closed_all = coherent_fidelity(all, nb_all);
  const double f_closed_single = coherent_fidelity(single, nb1);

  const auto h = target_hamiltonian(cfg.crystal, modes, drive);
  const auto run = run_gate(h, {}, nbar, drive.gate_time(), cfg.n_max);

  if (out.want_csv) {
    for (int i = 0; i < 4; ++i) {
      std::ostringstream os;
      write_trajectory_csv(os, trajectory(single.drives[i][0], single.detunings[0], single.time, 401));
      out.write("trajectory_" + std::string(kSpinLabels[i]) + ".csv", os.str());
    }
  }
  if (out.want_plots) {
    Plot p{"Phase space, target mode", "Re alpha", "Im alpha", {}, false};
    for (int i = 0; i < 4; ++i) {
      PlotSeries s{std::string(kSpinLabels[i]), {}, {}, {}, false};
      for (const auto& pt : trajectory(single.drives[i][0], single.detunings[0], single.time, 401)) {
        s.x.push_back(pt.alpha.real());
        s.y.push_back(pt.alpha.imag());
      }
      p.series.push_back(s);
    }
    out.plot("phase_space.svg", p);
  }

  json j;
  j["direction"] = std::string(to_string(drive.direction));
  j["target_ions"] = drive.target_ions;
  j["target_mode"] = drive.target_mode;
  j["gate_time_s"] = drive.gate_time();
  j["calibration"] = {{"force_amp_per_s", drive.force_amp},
                      {"force_phase_rad", drive.force_phase},
                      {"power_scale", drive.power_scale},
                      {"include_spectators", cfg.calibrate_spectators}};
  auto phases = [](const GatePhases& g) {
    json p;
    for (int i = 0; i < 4; ++i) p["phi_" + std::string(kSpinLabels[i])] = g.phi[i];
    p["chi"] = g.chi;
    double worst = 0.0;
    for (int i = 0; i < 4; ++i)
      for (const auto& a : g.residual[i]) worst = std::max(worst, std::abs(a));
    p["max_residual_displacement"] = worst;
    return p;
  };
  j["phases_all_modes"] = phases(all);
  j["phases_target_mode"] = phases(single);
  j["nbar"] = nbar;
  j["fidelity"] = {{"closed_form_all_modes", f_closed_all},
                   {"closed_form_target_mode", f_closed_single},
                   {"lindblad_target_mode", run.fidelity}};
  j["lindblad"] = json::parse(diagnostics_json(run.state));
  out.json_file("gate.json", j);
  std::printf("gate time %.6g s, chi %.12f rad\n", drive.gate_time(), all.chi);
  std::printf("fidelity closed form (all modes) %.9f\n", f_closed_all);
  std::printf("fidelity closed form (target)    %.9f\n", f_closed_single);
  std::printf("fidelity master equation (target) %.9f\n", run.fidelity);
}

// ---------------------------------------------------------------- budget

void cmd_budget(const RunConfig& cfg) {
  const Output out = output(cfg);
  BudgetOptions bo;
  bo.radial = cfg.budget_radial;
  bo.n_max = cfg.n_max;
  const auto rep = assemble_budget(cfg.crystal, cfg.drive, cfg.noise, cfg.budget, bo);
  std::ostringstream text, csv;
  rep.write_text(text);
  rep.write_csv(csv);
  out.write("budget.txt", text.str());
  out.csv_file("budget.csv", csv.str());
  if (out.want_json) out.write("budget.json", rep.json() + "\n");
  std::cout << text.str();
}

// ---------------------------------------------------------------- sweep

void cmd_sweep(const RunConfig& cfg, const std::vector<int>& n_override) {
  const Output out = output(cfg);
  SweepOptions so;
  so.min_radial_ratio = cfg.sweep_min_radial_ratio;
  so.n_max = cfg.n_max;
  const auto pts = fidelity_vs_chain_length(cfg.crystal, cfg.drive, cfg.noise, cfg.budget,
                                            n_override.empty() ? cfg.sweep_n : n_override, so);
  std::ostringstream csv;
  write_sweep_csv(csv, pts);
  out.csv_file("sweep.csv", csv.str());
  json j = json::array();
  for (const auto& cp : pts) {
    for (const auto& pr : cp.pairs)
      if (pr.skipped)
        std::fprintf(stderr, "warning: N=%d pair %d-%d skipped: %s\n", cp.n_ions, pr.ions[0], pr.ions[1],
                     pr.warning.c_str());
    j.push_back({{"n_ions", cp.n_ions}, {"axial_hz", hz(cp.omega_ax)}, {"mean_total", cp.mean_total}});
    std::printf("N=%2d  axial %.1f kHz  mean infidelity %.3e\n", cp.n_ions, hz(cp.omega_ax) / 1e3,
                cp.mean_total);
  }
  out.json_file("sweep.json", j);
  PlotSeries s{"axial total", {}, {}, {}, true};
  for (const auto& cp : pts) {
    s.x.push_back(cp.n_ions);
    s.y.push_back(cp.mean_total);
  }
  out.plot("sweep.svg", Plot{"Gate infidelity vs chain length", "N ions", "infidelity", {s}, true});
}

// ---------------------------------------------------------------- parity

GateSetup gate_setup(const RunConfig& cfg) {
  const auto modes = compute_modes(cfg.crystal, cfg.drive.direction);
  const DriveConfig d = calibrate_amplitudes(cfg.crystal, modes, cfg.drive, {.include_spectators = false});
  GateSetup g;
  g.hamiltonian = target_hamiltonian(cfg.crystal, modes, d);
  g.t_gate = d.gate_time();
  g.n_loops = d.n_loops;
  g.nbar = cfg.noise.nbar(d.direction);
  g.channels = build_jump_operators(cfg.noise, cfg.noise.motional_coherence(d.direction),
                                    mode_heating_rate(cfg.noise, cfg.crystal, modes, d.target_mode));
  g.n_max = cfg.n_max;
  return g;
}

void cmd_parity(const RunConfig& cfg) {
  const Output out = output(cfg);
  const auto& seq = cfg.experiment.sequence;
  const GateSetup gate = gate_setup(cfg);
  const Sampling sampling{seq.n_shots, seq.rng_seed};

  // parity oscillation of one gate
  SequenceSpec one = seq;
  one.n_gates = 1;
  one.analysis_phase.reset();
  const auto res = run_sequence(gate, one);
  const auto grid = phase_grid(cfg.experiment.parity_points);
  const auto exact = parity_scan(res.rho, grid);
  const auto sampled = parity_scan(res.rho, grid, Sampling{seq.n_shots, split_seed(seq.rng_seed, 1)});
  CsvTable pt{{"phase_rad", "parity_exact", "parity_sampled", "error"}, {}};
  for (std::size_t k = 0; k < grid.size(); ++k)
    pt.add({num(grid[k]), num(exact.parities[k]), num(sampled.parities[k]), num(sampled.errors[k])});
  std::ostringstream pcsv;
  pt.write(pcsv);
  out.csv_file("parity.csv", pcsv.str());

  // residual spin-motion entanglement around closure
  const double loop = constants::two_pi / gate.hamiltonian.detuning;
  std::vector<double> times;
  const int nr = cfg.experiment.residual_points;
  for (int k = 0; k < nr; ++k)
    times.push_back(gate.t_gate + loop * cfg.experiment.residual_span * (2.0 * k / (nr - 1) - 1.0));
  const auto rexact = residual_spin_motion(gate.hamiltonian, gate.nbar, times);
  const auto rsamp = residual_spin_motion(gate.hamiltonian, gate.nbar, times,
                                          Sampling{seq.n_shots, split_seed(seq.rng_seed, 2)});
  CsvTable rt{{"t_s", "infidelity_exact", "infidelity_sampled", "error", "failures"}, {}};
  for (std::size_t k = 0; k < times.size(); ++k)
    rt.add({num(times[k]), num(rexact[k].infidelity), num(rsamp[k].infidelity), num(rsamp[k].error),
            std::to_string(rsamp[k].failures)});
  std::ostringstream rcsv;
  rt.write(rcsv);
  out.csv_file("residual.csv", rcsv.str());

  // concatenated gates and decay fit
  std::vector<DecayPoint> points;
  CsvTable dt{{"n_gates", "fidelity_exact", "fidelity_sampled", "sigma"}, {}};
  for (std::size_t i = 0; i < cfg.experiment.decay_gates.size(); ++i) {
    SequenceSpec s = seq;
    s.n_gates = cfg.experiment.decay_gates[i];
    s.analysis_phase.reset();
    const double f = run_sequence(gate, s).fidelity;
    const int ks[] = {s.n_gates};
    // Bernoulli estimate of the fidelity at the simulated value
    auto sp = sample_decay(ks, 0.0, 1.0 - f, Sampling{seq.n_shots, split_seed(seq.rng_seed, 10 + i)},
                           DecayModel::exponential);
    sp[0].k = s.n_gates;
    points.push_back(sp[0]);
    dt.add({std::to_string(s.n_gates), num(f), num(sp[0].fidelity), num(sp[0].sigma)});
  }
  std::ostringstream dcsv;
  dt.write(dcsv);
  out.csv_file("decay.csv", dcsv.str());

  json j;
  const auto fexact = state_fidelity(exact.populations, exact.amplitude);
  const auto fsamp = state_fidelity(sampled.populations, sampled.amplitude);
  j["parity_exact"] = {{"amplitude", exact.amplitude},
                       {"populations", exact.populations},
                       {"fidelity_formula", fexact.fidelity},
                       {"fidelity_density_matrix", res.fidelity}};
  j["parity_sampled"] = {{"n_shots", seq.n_shots},
                         {"amplitude", sampled.amplitude},
                         {"amplitude_error", sampled.amplitude_error},
                         {"populations", sampled.populations},
                         {"fidelity_formula", fsamp.fidelity},
                         {"clamped", fsamp.clamped}};
  try {
    const auto fit = decay_fit(points);
    j["decay_fit"] = json::parse(fit.json());
  } catch (const FitError& e) {
    j["decay_fit"] = {{"error", e.what()}, {"residual", e.residual()}};
  }
  out.json_file("parity.json", j);
  std::printf("parity amplitude exact %.6f sampled %.4f +- %.4f\n", exact.amplitude, sampled.amplitude,
              sampled.amplitude_error);
  std::printf("Bell fidelity %.6f (formula %.6f)\n", res.fidelity, fexact.fidelity);

  if (out.want_plots) {
    PlotSeries se{"exact", grid, exact.parities, {}, false};
    PlotSeries ss{"sampled", grid, sampled.parities, sampled.errors, true};
    out.plot("parity.svg", Plot{"Parity oscillation", "analysis phase (rad)", "parity", {se, ss}, false});
    PlotSeries re{"exact", times, {}, {}, false}, rs{"sampled", times, {}, {}, true};
    for (std::size_t k = 0; k < times.size(); ++k) {
      re.y.push_back(rexact[k].infidelity);
      rs.y.push_back(rsamp[k].infidelity);
      rs.err.push_back(rsamp[k].error);
    }
    out.plot("residual.svg", Plot{"Residual spin-motion entanglement", "t (s)", "Bell infidelity", {re, rs}, false});
  }
}

// ---------------------------------------------------------------- scan

void cmd_scan(const RunConfig& cfg) {
  const Output out = output(cfg);
  const auto eq = solve_equilibrium(cfg.crystal);
  const auto pts = deflector_scan(cfg.beams, eq, cfg.scan.ramsey_time, cfg.beams.sensitivity, cfg.scan.points);
  CsvTable t{{"x_m", "pop_tem00", "pop_tem10"}, {}};
  PlotSeries a{"TEM00", {}, {}, {}, false}, b{"TEM10", {}, {}, {}, false};
  for (const auto& p : pts) {
    t.add({num(p.x), num(p.pop_tem00), num(p.pop_tem10)});
    a.x.push_back(p.x * 1e6);
    a.y.push_back(p.pop_tem00);
    b.x.push_back(p.x * 1e6);
    b.y.push_back(p.pop_tem10);
  }
  std::ostringstream os;
  t.write(os);
  out.csv_file("deflector_scan.csv", os.str());
  out.plot("deflector_scan.svg", Plot{"Deflector scan", "x (um)", "excited population", {a, b}, false});
  std::printf("deflector scan: %zu points over %d ions\n", pts.size(), cfg.crystal.n_ions);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"iongrad: light-shift gate simulator for trapped-ion chains"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "JSON config file (comments allowed)");
  app.add_option("--out", g.out, "output directory");
  app.add_option("--seed", g.seed, "random seed for sampled outputs");
  app.add_option("--format", g.format, "csv, json or both")->check(CLI::IsMember({"csv", "json", "both"}));
  app.add_flag("--plots", g.plots, "also write SVG plots");

  auto* modes = app.add_subcommand("modes", "normal-mode spectra and spacing report");
  auto* gate = app.add_subcommand("gate", "calibrate and simulate one gate");
  std::string direction;
  gate->add_option("--direction", direction, "axial, radial, radial_x or radial_y");
  auto* budget = app.add_subcommand("budget", "error budget, axial and radial");
  auto* sweep = app.add_subcommand("sweep", "infidelity vs chain length");
  std::vector<int> n_list;
  sweep->add_option("--n-list", n_list, "ion numbers (default from config)");
  auto* parity = app.add_subcommand("parity", "parity scan, residual entanglement and decay fit");
  auto* scan = app.add_subcommand("scan", "deflector scan");
  for (auto* sub : {modes, gate, budget, sweep, parity, scan}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const RunConfig cfg = load(g);
    if (*modes) cmd_modes(cfg);
    if (*gate) cmd_gate(cfg, direction);
    if (*budget) cmd_budget(cfg);
    if (*sweep) cmd_sweep(cfg, n_list);
    if (*parity) cmd_parity(cfg);
    if (*scan) cmd_scan(cfg);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return 4;
  } catch (const TruncationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const CalibrationError& e) {
    std::fprintf(stderr, "calibration error: %s\n", e.what());
    return 3;
  } catch (const PhysicsError& e) {
    std::fprintf(stderr, "physics error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}

#include "iongrad/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "iongrad/errors.hpp"
#include "json.hpp"

namespace iongrad {

namespace {

using json = nlohmann::json;

class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + ": expected an object");
  }

  std::string where(const std::string& key = "") const {
    if (key.empty()) return path_.empty() ? "<root>" : path_;
    return path_.empty() ? key : path_ + "." + key;
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(where(key) + ": expected a number");
    return v.get<double>();
  }

  /// null means "never" (infinite time).
  double time_or_inf(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    if (j_.at(key).is_null()) return NoiseModel::kInf;
    return number(key, fallback);
  }

  int integer(const std::string& key, int fallback) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(where(key) + ": expected an integer");
    return v.get<int>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(where(key) + ": expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(where(key) + ": expected a string");
    return v.get<std::string>();
  }

  std::vector<int> int_list(const std::string& key, const std::vector<int>& fallback) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(where(key) + ": expected a list of integers");
    std::vector<int> out;
    for (const auto& e : v) {
      if (!e.is_number_integer()) throw ConfigError(where(key) + ": expected a list of integers");
      out.push_back(e.get<int>());
    }
    return out;
  }

  std::vector<double> number_list(const std::string& key, std::size_t size,
                                  const std::vector<double>& fallback) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_array() || v.size() != size)
      throw ConfigError(where(key) + ": expected a list of " + std::to_string(size) + " numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError(where(key) + ": expected numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::optional<Section> child(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return Section(j_.at(key), where(key));
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(where(it.key()) + ": unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

double hz(double f) { return constants::two_pi * f; }

template <class E>
E choice(Section& s, const std::string& key, E fallback,
         std::initializer_list<std::pair<const char*, E>> options) {
  if (!s.has(key)) return fallback;
  const std::string v = s.string(key, "");
  std::string allowed;
  for (const auto& [name, value] : options) {
    if (v == name) return value;
    allowed += std::string(allowed.empty() ? "" : ", ") + name;
  }
  throw ConfigError(s.where(key) + ": '" + v + "' is not one of " + allowed);
}

Direction direction(Section& s, const std::string& key, Direction fallback) {
  if (!s.has(key)) return fallback;
  const std::string v = s.string(key, "");
  try {
    return direction_from_string(v);
  } catch (const ConfigError&) {
    throw ConfigError(s.where(key) + ": '" + v + "' is not one of axial, radial, radial_x, radial_y");
  }
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig cfg;
  Section top(root, "");
  if (!top.has("schema_version")) throw ConfigError("schema_version: required");
  cfg.schema_version = top.integer("schema_version", 0);
  if (cfg.schema_version != kSchemaVersion)
    throw ConfigError("schema_version: expected " + std::to_string(kSchemaVersion) + ", got " +
                      std::to_string(cfg.schema_version));

  if (auto s = top.child("crystal")) {
    auto& c = cfg.crystal;
    c.n_ions = s->integer("n_ions", c.n_ions);
    c.omega_ax = hz(s->number("axial_hz", c.omega_ax / constants::two_pi));
    c.omega_rad_x = hz(s->number("radial_x_hz", c.omega_rad_x / constants::two_pi));
    c.omega_rad_y = hz(s->number("radial_y_hz", c.omega_rad_y / constants::two_pi));
    c.ion_mass = s->number("ion_mass_amu", c.ion_mass / constants::atomic_mass_unit) *
                 constants::atomic_mass_unit;
    s->finish();
  }

  if (auto s = top.child("beams")) {
    auto& b = cfg.beams;
    b.waist = s->number("waist_m", b.waist);
    b.power00 = s->number("power00", b.power00);
    b.power10 = s->number("power10", b.power10);
    b.center00 = s->number("center00_m", b.center00);
    b.center10 = s->number("center10_m", b.center10);
    b.rel_detuning = hz(s->number("rel_detuning_hz", b.rel_detuning / constants::two_pi));
    b.rel_phase = s->number("rel_phase_rad", b.rel_phase);
    b.polarization = choice(*s, "polarization", b.polarization,
                            {{"lin_parallel", Polarization::lin_parallel},
                             {"lin_perpendicular", Polarization::lin_perpendicular}});
    b.sensitivity = s->number("sensitivity_hz", b.sensitivity);
    s->finish();
  }

  if (auto s = top.child("drive")) {
    auto& d = cfg.drive;
    const auto ions = s->int_list("target_ions", {d.target_ions[0], d.target_ions[1]});
    if (ions.size() != 2) throw ConfigError("drive.target_ions: expected two indices");
    d.target_ions = {ions[0], ions[1]};
    d.direction = direction(*s, "direction", d.direction);
    d.target_mode = s->integer("target_mode", d.target_mode);
    d.detuning = hz(s->number("detuning_hz", d.detuning / constants::two_pi));
    d.n_loops = s->integer("n_loops", d.n_loops);
    const auto ph = s->number_list("force_phases_rad", 2, {d.force_phase[0], d.force_phase[1]});
    d.force_phase = {ph[0], ph[1]};
    if (s->has("wavelength_m")) {
      const double lambda = s->number("wavelength_m", 0.0);
      if (!(lambda > 0)) throw ConfigError("drive.wavelength_m: must be > 0");
      d.k_eff = constants::two_pi / lambda;
    }
    cfg.calibrate_spectators = s->boolean("calibrate_spectators", cfg.calibrate_spectators);
    s->finish();
  }

  if (auto s = top.child("noise")) {
    auto& n = cfg.noise;
    n.t1 = s->time_or_inf("t1_s", n.t1);
    n.t2 = s->time_or_inf("t2_s", n.t2);
    n.motional_coherence_axial = s->time_or_inf("motional_coherence_axial_s", n.motional_coherence_axial);
    n.motional_coherence_radial =
        s->time_or_inf("motional_coherence_radial_s", n.motional_coherence_radial);
    n.heating_rate_per_ion = s->number("heating_rate_per_ion", n.heating_rate_per_ion);
    n.heating_frequency_exponent = s->number("heating_frequency_exponent", n.heating_frequency_exponent);
    n.noncom_heating_scale = s->number("noncom_heating_scale", n.noncom_heating_scale);
    n.scattering_rayleigh = s->number("scattering_rayleigh_per_s", n.scattering_rayleigh);
    n.scattering_raman = s->number("scattering_raman_per_s", n.scattering_raman);
    n.spam_error = s->number("spam_error", n.spam_error);
    n.t1_model = choice(*s, "t1_model", n.t1_model,
                        {{"symmetric", T1Model::symmetric}, {"decay", T1Model::decay}});
    n.dephasing = choice(*s, "dephasing", n.dephasing,
                         {{"independent", DephasingModel::independent},
                          {"collective", DephasingModel::collective}});
    n.nbar_axial = s->number("nbar_axial", n.nbar_axial);
    n.nbar_radial = s->number("nbar_radial", n.nbar_radial);
    if (s->has("n_max") && !root.at("noise").at("n_max").is_null()) cfg.n_max = s->integer("n_max", 0);
    s->finish();
  }

  if (auto s = top.child("budget")) {
    cfg.budget.rf_pulses = s->number("rf_pulses", cfg.budget.rf_pulses);
    cfg.budget.scattering = s->number("scattering", cfg.budget.scattering);
    if (s->has("radial_axis")) {
      const std::string v = s->string("radial_axis", "");
      if (v == "none")
        cfg.budget_radial = std::nullopt;
      else
        cfg.budget_radial = direction(*s, "radial_axis", Direction::radial_x);
      if (cfg.budget_radial == Direction::axial)
        throw ConfigError("budget.radial_axis: must be radial_x, radial_y or none");
    }
    s->finish();
  }

  if (auto s = top.child("sweep")) {
    cfg.sweep_n = s->int_list("n_ions", cfg.sweep_n);
    cfg.sweep_min_radial_ratio = s->number("min_radial_ratio", cfg.sweep_min_radial_ratio);
    s->finish();
  }

  if (auto s = top.child("experiment")) {
    auto& e = cfg.experiment;
    auto& q = e.sequence;
    q.n_gates = s->integer("n_gates", q.n_gates);
    q.echo = s->boolean("echo", q.echo);
    if (s->has("analysis_phase_rad")) q.analysis_phase = s->number("analysis_phase_rad", 0.0);
    q.n_shots = s->integer("n_shots", q.n_shots);
    if (s->has("rng_seed")) {
      const auto& v = root.at("experiment").at("rng_seed");
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
        throw ConfigError("experiment.rng_seed: expected a non-negative integer");
      q.rng_seed = v.get<std::uint64_t>();
    }
    q.stark_shift = hz(s->number("stark_shift_hz", q.stark_shift / constants::two_pi));
    q.rf_error = s->number("rf_error_per_pulse", q.rf_error);
    e.decay_gates = s->int_list("decay_gates", e.decay_gates);
    e.parity_points = s->integer("parity_points", e.parity_points);
    e.residual_points = s->integer("residual_points", e.residual_points);
    e.residual_span = s->number("residual_span_loops", e.residual_span);
    s->finish();
  }

  if (auto s = top.child("scan")) {
    cfg.scan.ramsey_time = s->number("ramsey_time_s", cfg.scan.ramsey_time);
    cfg.scan.points = s->integer("points", cfg.scan.points);
    s->finish();
  }

  if (auto s = top.child("outputs")) {
    cfg.outputs.directory = s->string("directory", cfg.outputs.directory);
    const std::string fmt = s->string("format", "both");
    if (fmt != "csv" && fmt != "json" && fmt != "both")
      throw ConfigError("outputs.format: expected csv, json or both");
    cfg.outputs.csv = fmt != "json";
    cfg.outputs.json = fmt != "csv";
    cfg.outputs.plots = s->boolean("plots", cfg.outputs.plots);
    s->finish();
  }
  top.finish();

  // value checks
  cfg.crystal.validate();
  cfg.beams.validate();
  cfg.drive.validate(cfg.crystal.n_ions);
  cfg.noise.validate();
  cfg.experiment.sequence.validate();
  if (cfg.n_max && *cfg.n_max < 2) throw ConfigError("noise.n_max: must be >= 2");
  if (cfg.experiment.parity_points < 8) throw ConfigError("experiment.parity_points: must be >= 8");
  if (cfg.experiment.residual_points < 2) throw ConfigError("experiment.residual_points: must be >= 2");
  if (cfg.experiment.decay_gates.empty()) throw ConfigError("experiment.decay_gates: empty");
  for (int k : cfg.experiment.decay_gates)
    if (k < 1) throw ConfigError("experiment.decay_gates: entries must be >= 1");
  if (!(cfg.scan.ramsey_time > 0)) throw ConfigError("scan.ramsey_time_s: must be > 0");
  if (cfg.scan.points < 2) throw ConfigError("scan.points: must be >= 2");
  if (!(cfg.sweep_min_radial_ratio > 0)) throw ConfigError("sweep.min_radial_ratio: must be > 0");
  for (int n : cfg.sweep_n)
    if (n < 2) throw ConfigError("sweep.n_ions: entries must be >= 2");
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace iongrad

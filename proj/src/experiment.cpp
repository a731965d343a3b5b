#include "iongrad/experiment.hpp"

#include <algorithm>
#include <boost/random/binomial_distribution.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <cmath>

#include "iongrad/csv.hpp"
#include "iongrad/errors.hpp"
#include "iongrad/phase_engine.hpp"
#include "json.hpp"

namespace iongrad {

void SequenceSpec::validate() const {
  if (n_gates < 1) throw ConfigError("experiment.n_gates must be >= 1");
  if (n_shots < 1) throw ConfigError("experiment.n_shots must be >= 1");
  if (!(rf_error >= 0 && rf_error <= 1)) throw ConfigError("experiment.rf_error must be in [0,1]");
}

namespace {

std::array<double, 4> stark_shift(double s) {
  std::array<double, 4> out{};
  for (int i = 0; i < 4; ++i) out[i] = 0.5 * s * (kSpinZ[i][0] + kSpinZ[i][1]);
  return out;
}

Eigen::Matrix4cd ket00() {
  Eigen::Matrix4cd r = Eigen::Matrix4cd::Zero();
  r(0, 0) = 1.0;
  return r;
}

// Noiseless spin-only evolution over one half gate (loops closed).
Eigen::Matrix4cd ideal_half(const GateHamiltonian& h, double t) {
  Eigen::Matrix4cd u = Eigen::Matrix4cd::Zero();
  for (int i = 0; i < 4; ++i) {
    const double phi = evolve_mode(h.drive[i], h.detuning, t).phi - h.spin_shift[i] * t;
    u(i, i) = std::polar(1.0, phi);
  }
  return u;
}

}  // namespace

SequenceResult run_sequence(const GateSetup& gate, const SequenceSpec& seq) {
  seq.validate();
  if (seq.echo && gate.n_loops % 2 != 0)
    throw ConfigError("echo sequence splits the gate into two halves; drive.n_loops must be even");

  GateHamiltonian h = gate.hamiltonian;
  const auto shift = stark_shift(seq.stark_shift);
  for (int i = 0; i < 4; ++i) h.spin_shift[i] += shift[i];
  const int halves = seq.echo ? 2 : 1;
  const double t_part = gate.t_gate / halves;

  const Eigen::Matrix4cd r90 = collective_rotation(constants::pi / 2, 0.0);
  const Eigen::Matrix4cd r180 = collective_rotation(constants::pi, 0.0);

  // closing phase from the ideal spin sequence
  const Eigen::Matrix4cd g = ideal_half(h, t_part);
  Eigen::Matrix4cd body = Eigen::Matrix4cd::Identity();
  for (int k = 0; k < seq.n_gates; ++k) body = (seq.echo ? Eigen::Matrix4cd(g * r180 * g) : g) * body;
  double best = -1.0;
  SequenceResult res;
  for (double phi : {0.0, constants::pi}) {
    const Eigen::Matrix4cd u = collective_rotation(constants::pi / 2, phi) * body * r90;
    const double f = bell_target_fidelity(u * ket00() * u.adjoint());
    if (f > best + 1e-12) best = f, res.closing_phase = phi;
  }

  const int n_max = gate.n_max.value_or(default_n_max(gate.nbar, h.max_displacement()));
  OpenSystemState st = thermal_state(ket00(), gate.nbar, n_max);
  auto pulse = [&](const Eigen::Matrix4cd& r) {
    apply_spin_unitary(st, r);
    apply_depolarizing(st, seq.rf_error);
  };
  pulse(r90);
  for (int k = 0; k < seq.n_gates; ++k) {
    double t_next = st.time + t_part;
    st = evolve(h, gate.channels, std::move(st), t_next);
    if (seq.echo) {
      pulse(r180);
      t_next = st.time + t_part;
      st = evolve(h, gate.channels, std::move(st), t_next);
    }
  }
  pulse(collective_rotation(constants::pi / 2, res.closing_phase));
  if (seq.analysis_phase) pulse(collective_rotation(constants::pi / 2, *seq.analysis_phase));

  res.rho = st.spin();
  res.fidelity = bell_target_fidelity(res.rho);
  res.full = std::move(st);
  return res;
}

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + (stream + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::array<int, 4> sample_outcomes(const std::array<double, 4>& probs, int n_shots,
                                   std::uint64_t seed) {
  boost::random::mt19937_64 rng(seed);
  std::array<int, 4> counts{};
  int left = n_shots;
  double mass = 1.0;
  for (int i = 0; i < 3 && left > 0; ++i) {
    const double p = mass > 0 ? std::clamp(std::max(probs[i], 0.0) / mass, 0.0, 1.0) : 0.0;
    boost::random::binomial_distribution<int> dist(left, p);
    counts[i] = dist(rng);
    left -= counts[i];
    mass -= std::max(probs[i], 0.0);
  }
  counts[3] = left;
  return counts;
}

double parity(const Eigen::Matrix4cd& rho, double phi) {
  const Eigen::Matrix4cd u = collective_rotation(constants::pi / 2, phi);
  const Eigen::Matrix4cd r = u * rho * u.adjoint();
  double p = 0.0;
  for (int i = 0; i < 4; ++i) p += kSpinZ[i][0] * kSpinZ[i][1] * r(i, i).real();
  return p;
}

std::vector<double> phase_grid(int n_points) {
  std::vector<double> out(n_points);
  for (int k = 0; k < n_points; ++k) out[k] = constants::two_pi * k / n_points;
  return out;
}

ParityScan parity_scan(const Eigen::Matrix4cd& rho, std::span<const double> phases,
                       std::optional<Sampling> sampling) {
  const int n = static_cast<int>(phases.size());
  if (n < 8) throw FitError("parity scan needs at least 8 phase points", 0.0);
  const auto [lo, hi] = std::minmax_element(phases.begin(), phases.end());
  if (*hi - *lo < constants::pi * (1.0 - 2.0 / n) - 1e-12)
    throw FitError("parity scan must span at least one period of P(phi) (pi)", *hi - *lo);

  ParityScan scan;
  scan.phases.assign(phases.begin(), phases.end());
  auto diag_probs = [](const Eigen::Matrix4cd& r) {
    std::array<double, 4> p{};
    for (int i = 0; i < 4; ++i) p[i] = std::max(0.0, r(i, i).real());
    return p;
  };
  if (sampling) {
    const auto c = sample_outcomes(diag_probs(rho), sampling->n_shots, split_seed(sampling->seed, 0));
    scan.populations = double(c[0] + c[3]) / sampling->n_shots;
  } else {
    scan.populations = rho(0, 0).real() + rho(3, 3).real();
  }
  for (int k = 0; k < n; ++k) {
    if (!sampling) {
      scan.parities.push_back(parity(rho, phases[k]));
      scan.errors.push_back(0.0);
      continue;
    }
    const Eigen::Matrix4cd u = collective_rotation(constants::pi / 2, phases[k]);
    const auto c = sample_outcomes(diag_probs(u * rho * u.adjoint()), sampling->n_shots,
                                   split_seed(sampling->seed, k + 1));
    const double p = double(c[0] + c[3] - c[1] - c[2]) / sampling->n_shots;
    scan.parities.push_back(p);
    scan.errors.push_back(std::sqrt(std::max(0.0, 1.0 - p * p) / sampling->n_shots));
  }

  Eigen::MatrixXd x(n, 3);
  Eigen::VectorXd y(n);
  for (int k = 0; k < n; ++k) {
    x(k, 0) = std::sin(2 * phases[k]);
    x(k, 1) = std::cos(2 * phases[k]);
    x(k, 2) = 1.0;
    y[k] = scan.parities[k];
  }
  const Eigen::Matrix3d xtx = x.transpose() * x;
  const Eigen::FullPivLU<Eigen::Matrix3d> lu(xtx);
  if (lu.rank() < 3) throw FitError("parity fit design is singular", 0.0);
  const Eigen::Matrix3d inv = lu.inverse();
  const Eigen::Vector3d beta = inv * x.transpose() * y;
  scan.amplitude = std::hypot(beta[0], beta[1]);
  scan.offset = beta[2];
  scan.residual = std::sqrt((x * beta - y).squaredNorm() / n);
  Eigen::VectorXd var(n);
  for (int k = 0; k < n; ++k) var[k] = scan.errors[k] * scan.errors[k];
  const Eigen::Matrix3d cov = inv * x.transpose() * var.asDiagonal() * x * inv;
  if (scan.amplitude > 0) {
    const double a = beta[0], b = beta[1];
    scan.amplitude_error =
        std::sqrt(std::max(0.0, a * a * cov(0, 0) + b * b * cov(1, 1) + 2 * a * b * cov(0, 1))) /
        scan.amplitude;
  }
  return scan;
}

StateFidelity state_fidelity(double populations, double amplitude) {
  const double f = 0.5 * populations + 0.5 * amplitude;
  return {std::clamp(f, 0.0, 1.0), f < 0.0 || f > 1.0};
}

double decay_model_value(DecayModel model, double epsilon, double spam, int k) {
  if (model == DecayModel::depolarizing)
    return 0.75 * (1.0 - spam) * std::pow(1.0 - epsilon / 0.75, k) + 0.25;
  return (1.0 - spam) * std::exp(-epsilon * k);
}

DecayFit decay_fit(std::span<const DecayPoint> points, DecayModel model) {
  std::vector<int> ks;
  for (const auto& p : points) ks.push_back(p.k);
  std::sort(ks.begin(), ks.end());
  if (std::unique(ks.begin(), ks.end()) - ks.begin() < 3)
    throw FitError("decay fit needs at least 3 distinct gate counts", 0.0);

  const int n = static_cast<int>(points.size());
  const double floor = model == DecayModel::depolarizing ? 0.25 : 0.0;
  const bool weighted = std::any_of(points.begin(), points.end(), [](auto& p) { return p.sigma > 0; });
  if (weighted && std::any_of(points.begin(), points.end(), [](auto& p) { return !(p.sigma > 0); }))
    throw ConfigError("decay fit: either every point or no point carries a sigma");
  std::vector<double> weight(n, 1.0);
  if (weighted)
    for (int i = 0; i < n; ++i) weight[i] = 1.0 / points[i].sigma;
  auto w = [&](int i) { return weight[i]; };
  const bool reweight =
      weighted && std::all_of(points.begin(), points.end(), [](auto& p) { return p.shots > 0; });

  // start from a log-linear fit of F - floor
  double a0 = 0.0, p = 0.99;
  {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (const auto& pt : points) {
      if (pt.fidelity - floor <= 0) continue;
      const double yv = std::log(pt.fidelity - floor);
      sx += pt.k, sy += yv, sxx += double(pt.k) * pt.k, sxy += pt.k * yv, ++m;
    }
    const double den = m * sxx - sx * sx;
    if (m >= 2 && den > 0) {
      const double slope = (m * sxy - sx * sy) / den;
      p = std::exp(slope);
      a0 = std::exp((sy - slope * sx) / m);
    } else {
      a0 = 1.0 - floor;
    }
  }

  auto chi2 = [&](double A, double P) {
    double s = 0;
    for (int i = 0; i < n; ++i) {
      const double r = (points[i].fidelity - (A * std::pow(P, points[i].k) + floor)) * w(i);
      s += r * r;
    }
    return s;
  };

  DecayFit fit;
  fit.model = model;
  bool converged = false;
  double c2 = 0.0;
  Eigen::Matrix2d jtj;
  for (int pass = 0; pass < (reweight ? 8 : 1); ++pass) {
    if (pass > 0) {
      // projection noise at the model prediction, succession-smoothed
      for (int i = 0; i < n; ++i) {
        const double nshots = points[i].shots;
        const double f = std::clamp(a0 * std::pow(p, points[i].k) + floor, 0.0, 1.0);
        const double q = (f * nshots + 1.0) / (nshots + 2.0);
        weight[i] = 1.0 / std::sqrt(q * (1.0 - q) / nshots);
      }
    }
    converged = false;
    double lambda = 1e-3;
    c2 = chi2(a0, p);
    for (int it = 0; it < 500; ++it) {
      fit.iterations = it + 1;
      jtj.setZero();
      Eigen::Vector2d jtr = Eigen::Vector2d::Zero();
      for (int i = 0; i < n; ++i) {
        const int k = points[i].k;
        const Eigen::Vector2d j(std::pow(p, k) * w(i), a0 * k * std::pow(p, k - 1) * w(i));
        const double r = (points[i].fidelity - (a0 * std::pow(p, k) + floor)) * w(i);
        jtj += j * j.transpose();
        jtr += j * r;
      }
      Eigen::Matrix2d damped = jtj;
      damped.diagonal() *= 1.0 + lambda;
      const Eigen::Vector2d step = damped.ldlt().solve(jtr);
      const double na = a0 + step[0], np = p + step[1];
      const double c2n = chi2(na, np);
      if (std::isfinite(c2n) && c2n <= c2) {
        const bool small = std::abs(step[0]) <= 1e-13 * (std::abs(a0) + 1e-13) &&
                           std::abs(step[1]) <= 1e-13 * (std::abs(p) + 1e-13);
        a0 = na, p = np;
        const double drop = c2 - c2n;
        c2 = c2n;
        lambda = std::max(lambda * 0.3, 1e-12);
        if (small || drop <= 1e-15 * (c2 + 1e-300)) {
          converged = true;
          break;
        }
      } else {
        lambda *= 10;
        if (lambda > 1e12) {
          converged = true;  // no further descent available
          break;
        }
      }
    }
  }

  const int dof = std::max(1, n - 2);
  fit.chi2_red = c2 / dof;
  Eigen::Matrix2d cov = jtj.inverse();
  if (!weighted) cov *= fit.chi2_red;
  const double sp = std::sqrt(std::max(0.0, cov(1, 1)));
  fit.amplitude = a0;
  fit.p = p;
  if (model == DecayModel::depolarizing) {
    fit.epsilon = 0.75 * (1.0 - p);
    fit.epsilon_error = 0.75 * sp;
    fit.spam = 1.0 - a0 / 0.75;
  } else {
    fit.epsilon = p > 0 ? -std::log(p) : std::numeric_limits<double>::infinity();
    fit.epsilon_error = p > 0 ? sp / p : std::numeric_limits<double>::infinity();
    fit.spam = 1.0 - a0;
  }
  fit.epsilon_ci_low = fit.epsilon - 1.959964 * fit.epsilon_error;
  fit.epsilon_ci_high = fit.epsilon + 1.959964 * fit.epsilon_error;
  fit.degenerate = !converged || !std::isfinite(fit.epsilon) || fit.epsilon_ci_low < 0;
  return fit;
}

std::string DecayFit::json() const {
  nlohmann::ordered_json j;
  j["model"] = model == DecayModel::depolarizing ? "depolarizing" : "exponential";
  j["epsilon"] = epsilon;
  j["epsilon_ci_low"] = epsilon_ci_low;
  j["epsilon_ci_high"] = epsilon_ci_high;
  j["epsilon_stderr"] = epsilon_error;
  j["spam"] = spam;
  j["chi2_red"] = chi2_red;
  j["degenerate"] = degenerate;
  return j.dump(2);
}

std::vector<DecayPoint> sample_decay(std::span<const int> ks, double epsilon, double spam,
                                     const Sampling& sampling, DecayModel model) {
  std::vector<DecayPoint> out;
  const int n = sampling.n_shots;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const double f = std::clamp(decay_model_value(model, epsilon, spam, ks[i]), 0.0, 1.0);
    boost::random::mt19937_64 rng(split_seed(sampling.seed, i));
    boost::random::binomial_distribution<int> dist(n, f);
    const int x = dist(rng);
    const double smooth = (x + 1.0) / (n + 2.0);
    out.push_back({ks[i], double(x) / n, std::sqrt(smooth * (1 - smooth) / n), n});
  }
  return out;
}

std::vector<ResidualPoint> residual_spin_motion(const GateHamiltonian& h, double nbar,
                                                std::span<const double> times,
                                                std::optional<Sampling> sampling) {
  std::vector<ResidualPoint> out;
  const double nb[] = {nbar};
  for (std::size_t k = 0; k < times.size(); ++k) {
    GatePhases g;
    g.time = times[k];
    g.modes = {0};
    g.detunings = {h.detuning};
    for (int i = 0; i < 4; ++i) {
      const auto ev = evolve_mode(h.drive[i], h.detuning, times[k]);
      g.phi[i] = ev.phi;
      g.drives[i] = {h.drive[i]};
      g.residual[i] = {ev.alpha};
    }
    g.chi = g.phi[1] + g.phi[2] - g.phi[0] - g.phi[3];
    ResidualPoint pt;
    pt.t = times[k];
    pt.infidelity = std::clamp(1.0 - coherent_fidelity(g, nb), 0.0, 1.0);
    if (sampling) {
      boost::random::mt19937_64 rng(split_seed(sampling->seed, k));
      boost::random::binomial_distribution<int> dist(sampling->n_shots, pt.infidelity);
      pt.failures = dist(rng);
      const double q = double(pt.failures) / sampling->n_shots;
      pt.infidelity = q;
      pt.error = pt.failures == 0 ? 1.0 / (sampling->n_shots + 1)
                                  : std::sqrt(q * (1 - q) / sampling->n_shots);
    }
    out.push_back(pt);
  }
  return out;
}

}  // namespace iongrad

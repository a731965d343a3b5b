#include "iongrad/chain_modes.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "iongrad/csv.hpp"
#include "iongrad/errors.hpp"

namespace iongrad {

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::axial:
      return "axial";
    case Direction::radial_x:
      return "radial_x";
    case Direction::radial_y:
      return "radial_y";
  }
  return "?";
}

Direction direction_from_string(std::string_view s) {
  if (s == "axial") return Direction::axial;
  if (s == "radial_x" || s == "radial") return Direction::radial_x;
  if (s == "radial_y") return Direction::radial_y;
  throw ConfigError("unknown direction '" + std::string(s) + "'");
}

double CrystalSpec::omega_rad(Direction d) const {
  switch (d) {
    case Direction::radial_x:
      return omega_rad_x;
    case Direction::radial_y:
      return omega_rad_y;
    case Direction::axial:
      break;
  }
  return omega_ax;
}

double CrystalSpec::length_scale() const {
  const double k = charge * charge / (4.0 * constants::pi * constants::epsilon0);
  return std::cbrt(k / (ion_mass * omega_ax * omega_ax));
}

void CrystalSpec::validate() const {
  if (n_ions < 1) throw ConfigError("crystal.n_ions must be >= 1");
  if (!(omega_ax > 0)) throw ConfigError("crystal axial frequency must be > 0");
  if (!(omega_rad_x > omega_ax) || !(omega_rad_y > omega_ax))
    throw ConfigError("radial frequencies must exceed the axial frequency");
  if (!(ion_mass > 0) || !(charge > 0)) throw ConfigError("ion mass and charge must be > 0");
}

namespace {

constexpr double kEquilibriumTol = 1e-12;
constexpr int kMaxNewtonIterations = 200;

Eigen::VectorXd force_residual(const Eigen::VectorXd& u) {
  const auto n = u.size();
  Eigen::VectorXd f(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double r = u[i];
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = u[i] - u[j];
      r -= (d > 0 ? 1.0 : -1.0) / (d * d);
    }
    f[i] = r;
  }
  return f;
}

bool strictly_ascending(const Eigen::VectorXd& u) {
  for (Eigen::Index i = 1; i < u.size(); ++i)
    if (!(u[i] > u[i - 1])) return false;
  return true;
}

void fix_signs(Eigen::MatrixXd& v) {
  for (Eigen::Index m = 0; m < v.cols(); ++m) {
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      if (std::abs(v(i, m)) > 1e-9) {
        if (v(i, m) < 0) v.col(m) *= -1.0;
        break;
      }
    }
  }
}

}  // namespace

EquilibriumPositions solve_equilibrium(const CrystalSpec& spec) {
  spec.validate();
  const int n = spec.n_ions;
  EquilibriumPositions eq;
  eq.length_scale = spec.length_scale();

  Eigen::VectorXd u(n);
  const double spacing = 2.018 / std::pow(static_cast<double>(n), 0.559);
  for (int i = 0; i < n; ++i) u[i] = ((i + 1) - (n + 1) / 2.0) * spacing;

  Eigen::VectorXd f = force_residual(u);
  double res = n ? f.cwiseAbs().maxCoeff() : 0.0;
  int it = 0;
  while (res >= kEquilibriumTol && it < kMaxNewtonIterations) {
    std::vector<double> uv(u.data(), u.data() + n);
    const Eigen::VectorXd step = axial_hessian(uv).ldlt().solve(f);
    double damping = 1.0;
    bool accepted = false;
    for (int k = 0; k < 40; ++k, damping *= 0.5) {
      Eigen::VectorXd trial = u - damping * step;
      if (!strictly_ascending(trial)) continue;
      Eigen::VectorXd ft = force_residual(trial);
      const double rt = ft.cwiseAbs().maxCoeff();
      if (rt < res || rt < kEquilibriumTol) {
        u = trial;
        f = ft;
        res = rt;
        accepted = true;
        break;
      }
    }
    ++it;
    if (!accepted) break;
  }
  if (!(res < kEquilibriumTol)) {
    std::ostringstream msg;
    msg << "equilibrium solver did not converge for " << n << " ions after " << it
        << " iterations (max residual " << res << ")";
    throw SolverError(msg.str(), res);
  }

  eq.iterations = it;
  eq.residual = res;
  eq.dimensionless.assign(u.data(), u.data() + n);
  eq.positions.resize(n);
  for (int i = 0; i < n; ++i) eq.positions[i] = u[i] * eq.length_scale;
  return eq;
}

Eigen::MatrixXd axial_hessian(const std::vector<double>& u) {
  const auto n = static_cast<Eigen::Index>(u.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double diag = 1.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double inv3 = 1.0 / std::pow(std::abs(u[i] - u[j]), 3);
      diag += 2.0 * inv3;
      a(i, j) = -2.0 * inv3;
    }
    a(i, i) = diag;
  }
  return a;
}

Eigen::MatrixXd radial_hessian(const std::vector<double>& u, double beta) {
  const auto n = static_cast<Eigen::Index>(u.size());
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double diag = beta * beta;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double inv3 = 1.0 / std::pow(std::abs(u[i] - u[j]), 3);
      diag -= inv3;
      b(i, j) = inv3;
    }
    b(i, i) = diag;
  }
  return b;
}

ModeSpectrum axial_modes(const CrystalSpec& spec, const EquilibriumPositions& eq) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(axial_hessian(eq.dimensionless));
  ModeSpectrum ms;
  ms.direction = Direction::axial;
  ms.vectors = es.eigenvectors();
  fix_signs(ms.vectors);
  const auto& lam = es.eigenvalues();
  ms.frequencies.resize(lam.size());
  for (Eigen::Index m = 0; m < lam.size(); ++m)
    ms.frequencies[m] = spec.omega_ax * std::sqrt(lam[m]);
  return ms;
}

ModeSpectrum radial_modes(const CrystalSpec& spec, const EquilibriumPositions& eq,
                          Direction axis) {
  if (axis == Direction::axial) throw ConfigError("radial_modes needs a radial axis");
  const double beta = spec.omega_rad(axis) / spec.omega_ax;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(radial_hessian(eq.dimensionless, beta));
  const auto n = es.eigenvalues().size();

  ModeSpectrum ms;
  ms.direction = axis;
  ms.vectors.resize(n, n);
  ms.frequencies.resize(n);
  for (Eigen::Index m = 0; m < n; ++m) {
    // descending order: COM (largest eigenvalue) first
    const Eigen::Index src = n - 1 - m;
    const double mu = es.eigenvalues()[src];
    if (!(mu > 0)) {
      std::ostringstream msg;
      msg << to_string(axis) << " mode " << m << " of " << n
          << " ions is unstable (squared frequency ratio " << mu
          << " <= 0); the linear chain buckles into a zig-zag";
      throw InstabilityError(msg.str(), static_cast<int>(m));
    }
    ms.frequencies[m] = spec.omega_ax * std::sqrt(mu);
    ms.vectors.col(m) = es.eigenvectors().col(src);
  }
  fix_signs(ms.vectors);
  return ms;
}

ModeSpectrum compute_modes(const CrystalSpec& spec, Direction direction) {
  const auto eq = solve_equilibrium(spec);
  return direction == Direction::axial ? axial_modes(spec, eq) : radial_modes(spec, eq, direction);
}

SpacingReport mode_spacing_report(const CrystalSpec& spec, double delta) {
  SpacingReport r;
  r.delta = delta;
  const auto eq = solve_equilibrium(spec);
  if (spec.n_ions < 2) return r;
  const auto ax = axial_modes(spec, eq);
  r.axial = std::abs(ax.frequencies[1] - ax.frequencies[0]) / delta;
  r.breathing_ratio = ax.frequencies[1] / ax.frequencies[0];
  const auto rx = radial_modes(spec, eq, Direction::radial_x);
  r.radial_x = std::abs(rx.frequencies[0] - rx.frequencies[1]) / delta;
  const auto ry = radial_modes(spec, eq, Direction::radial_y);
  r.radial_y = std::abs(ry.frequencies[0] - ry.frequencies[1]) / delta;
  return r;
}

std::vector<double> lamb_dicke(const CrystalSpec& spec, const ModeSpectrum& modes, double k_eff) {
  if (!(k_eff > 0)) throw ConfigError("k_eff must be > 0");
  std::vector<double> eta(modes.frequencies.size());
  for (std::size_t m = 0; m < eta.size(); ++m)
    eta[m] = k_eff * std::sqrt(constants::hbar / (2.0 * spec.ion_mass * modes.frequencies[m]));
  return eta;
}

void write_spectrum_csv(std::ostream& os, const ModeSpectrum& modes, bool header) {
  const int n = modes.size();
  if (header) {
    std::vector<std::string> h{"direction", "mode_index", "freq_hz"};
    for (int j = 1; j <= n; ++j) h.push_back("b_" + std::to_string(j));
    write_csv_row(os, h);
  }
  for (int m = 0; m < n; ++m) {
    std::vector<std::string> row{std::string(to_string(modes.direction)), std::to_string(m),
                                 num(modes.frequencies[m] / constants::two_pi)};
    for (int j = 0; j < n; ++j) row.push_back(num(modes.vectors(j, m)));
    write_csv_row(os, row);
  }
}

double max_stable_axial_frequency(int n_ions, double omega_rad_min, double min_radial_ratio) {
  if (n_ions < 2) return omega_rad_min;
  CrystalSpec probe;
  probe.n_ions = n_ions;
  probe.omega_ax = 1.0;
  probe.omega_rad_x = probe.omega_rad_y = 1e6;
  const auto eq = solve_equilibrium(probe);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(axial_hessian(eq.dimensionless),
                                                          Eigen::EigenvaluesOnly);
  const double lam_max = es.eigenvalues().maxCoeff();
  // softest radial mode: beta^2 - (lam_max - 1)/2 = r^2
  const double beta2 = min_radial_ratio * min_radial_ratio + 0.5 * (lam_max - 1.0);
  return omega_rad_min / std::sqrt(beta2);
}

}  // namespace iongrad

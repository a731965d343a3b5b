#include <cmath>
#include <sstream>

#include "doctest.h"
#include "iongrad/chain_modes.hpp"
#include "iongrad/errors.hpp"
#include "oracles.hpp"

using namespace iongrad;

namespace {

CrystalSpec crystal(int n) {
  CrystalSpec s;
  s.n_ions = n;
  return s;
}

}  // namespace

TEST_CASE("single ion sits at the trap centre") {
  const auto eq = solve_equilibrium(crystal(1));
  REQUIRE(eq.positions.size() == 1);
  CHECK(eq.positions[0] == 0.0);
  const auto ax = compute_modes(crystal(1), Direction::axial);
  CHECK(ax.frequencies[0] == doctest::Approx(crystal(1).omega_ax).epsilon(1e-14));
}

TEST_CASE("two-ion equilibrium matches force balance") {
  // u = (1/4)^(1/3) from u = 1/(2u)^2
  const auto eq = solve_equilibrium(crystal(2));
  const double u = std::cbrt(0.25);
  CHECK(eq.dimensionless[0] == doctest::Approx(-u).epsilon(1e-12));
  CHECK(eq.dimensionless[1] == doctest::Approx(u).epsilon(1e-12));
  CHECK(eq.positions[1] == doctest::Approx(u * crystal(2).length_scale()).epsilon(1e-12));
}

TEST_CASE("equilibrium agrees with a brute-force energy minimiser") {
  for (int n = 2; n <= 10; ++n) {
    CAPTURE(n);
    const auto eq = solve_equilibrium(crystal(n));
    const auto ref = oracle::brute_equilibrium(n);
    for (int i = 0; i < n; ++i) CHECK(eq.dimensionless[i] == doctest::Approx(ref[i]).epsilon(1e-8));
    for (int i = 0; i < n; ++i) CHECK(eq.dimensionless[i] == doctest::Approx(-eq.dimensionless[n - 1 - i]).epsilon(1e-12));
  }
}

TEST_CASE("axial hessian matches finite differences of the potential") {
  for (int n : {2, 3, 5, 9}) {
    CAPTURE(n);
    const auto eq = solve_equilibrium(crystal(n));
    const auto a = axial_hessian(eq.dimensionless);
    const auto fd = oracle::fd_hessian(eq.dimensionless);
    CHECK((a - fd).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("three-ion axial spectrum") {
  const auto spec = crystal(3);
  const auto m = compute_modes(spec, Direction::axial);
  const double w = spec.omega_ax;
  CHECK(m.frequencies[0] / w == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(m.frequencies[1] / w == doctest::Approx(std::sqrt(3.0)).epsilon(1e-10));
  CHECK(m.frequencies[2] / w == doctest::Approx(std::sqrt(29.0 / 5.0)).epsilon(1e-10));
  // stretch mode leaves the middle ion at rest
  CHECK(std::abs(m.participation(1, 1)) < 1e-12);
}

TEST_CASE("axial COM frequency and vector") {
  for (int n = 1; n <= 16; ++n) {
    CAPTURE(n);
    const auto spec = crystal(n);
    const auto m = compute_modes(spec, Direction::axial);
    CHECK(std::abs(m.frequencies[0] / spec.omega_ax - 1.0) < 1e-12);
    for (int i = 0; i < n; ++i) CHECK(m.participation(i, 0) == doctest::Approx(1.0 / std::sqrt(n)).epsilon(1e-10));
  }
}

TEST_CASE("mode vectors are orthonormal and ordered") {
  for (Direction d : {Direction::axial, Direction::radial_x, Direction::radial_y}) {
    const auto m = compute_modes(crystal(7), d);
    const Eigen::MatrixXd g = m.vectors.transpose() * m.vectors;
    CHECK((g - Eigen::MatrixXd::Identity(7, 7)).cwiseAbs().maxCoeff() < 1e-12);
    for (int k = 1; k < 7; ++k) {
      if (d == Direction::axial)
        CHECK(m.frequencies[k] > m.frequencies[k - 1]);
      else
        CHECK(m.frequencies[k] < m.frequencies[k - 1]);
    }
    // first non-negligible component positive
    for (int k = 0; k < 7; ++k) {
      int i = 0;
      while (std::abs(m.vectors(i, k)) < 1e-9) ++i;
      CHECK(m.vectors(i, k) > 0);
    }
  }
}

TEST_CASE("radial eigenvalues follow from the axial hessian") {
  for (int n : {2, 4, 8}) {
    const auto spec = crystal(n);
    const auto ax = compute_modes(spec, Direction::axial);
    const auto rx = compute_modes(spec, Direction::radial_x);
    const double beta = spec.omega_rad_x / spec.omega_ax;
    for (int m = 0; m < n; ++m) {
      const double lam = std::pow(ax.frequencies[m] / spec.omega_ax, 2);
      const double expect = spec.omega_ax * std::sqrt(beta * beta - (lam - 1) / 2);
      CHECK(rx.frequencies[m] == doctest::Approx(expect).epsilon(1e-10));
    }
  }
}

TEST_CASE("soft radial confinement buckles the chain") {
  auto spec = crystal(12);
  spec.omega_rad_x = 1.2 * spec.omega_ax;
  CHECK_THROWS_AS(compute_modes(spec, Direction::radial_x), InstabilityError);
}

TEST_CASE("stable axial frequency keeps the softest radial mode at the requested ratio") {
  const auto spec = crystal(12);
  const double wr = std::min(spec.omega_rad_x, spec.omega_rad_y);
  const double w = max_stable_axial_frequency(12, wr, 0.4);
  auto s = spec;
  s.omega_ax = w;
  const auto rx = compute_modes(s, Direction::radial_x);
  CHECK(rx.frequencies.back() / w == doctest::Approx(0.4).epsilon(1e-6));
}

TEST_CASE("spacing report") {
  const auto r2 = mode_spacing_report(crystal(2), constants::two_pi * 20e3);
  CHECK(r2.breathing_ratio == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
  const auto r1 = mode_spacing_report(crystal(1), constants::two_pi * 20e3);
  CHECK(r1.axial == 0.0);
  CHECK(r1.breathing_ratio == 0.0);
}

TEST_CASE("Lamb-Dicke parameters") {
  const auto spec = crystal(3);
  const auto m = compute_modes(spec, Direction::axial);
  const double k = constants::two_pi / 532e-9;
  const auto eta = lamb_dicke(spec, m, k);
  for (int i = 0; i < 3; ++i)
    CHECK(eta[i] == doctest::Approx(k * std::sqrt(constants::hbar / (2 * spec.ion_mass * m.frequencies[i]))));
  CHECK(eta[0] > eta[1]);
}

TEST_CASE("spectrum csv") {
  std::ostringstream os;
  write_spectrum_csv(os, compute_modes(crystal(2), Direction::axial), true);
  std::istringstream is(os.str());
  std::string line;
  int lines = 0;
  while (std::getline(is, line)) ++lines;
  CHECK(lines == 3);
  CHECK(os.str().rfind("direction,mode_index,freq_hz", 0) == 0);
}

TEST_CASE("invalid crystals are rejected") {
  auto s = crystal(0);
  CHECK_THROWS_AS(solve_equilibrium(s), ConfigError);
  s = crystal(2);
  s.omega_rad_x = 0.5 * s.omega_ax;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  CHECK_THROWS_AS(direction_from_string("diagonal"), ConfigError);
}

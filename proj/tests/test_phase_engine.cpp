#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "iongrad/phase_engine.hpp"
#include "oracles.hpp"

using namespace iongrad;

TEST_CASE("evolve_mode agrees with quadrature") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 40; ++k) {
    const cplx c(3e4 * u(rng), 3e4 * u(rng));
    const double d = constants::two_pi * (5e3 + 3e4 * std::abs(u(rng)));
    const double t = 3e-4 * std::abs(u(rng));
    const auto ev = evolve_mode(c, d, t);
    const auto ref = oracle::forced_oscillator(c, d, t);
    const double scale = std::abs(c) / d;
    CHECK(std::abs(ev.alpha - ref.alpha) < 1e-9 * std::max(1.0, scale));
    CHECK(std::abs(ev.phi - ref.phi) < 1e-9 * std::max(1.0, scale * scale * d * t));
  }
}

TEST_CASE("loops close after an integer number of periods") {
  const cplx c(1.7e4, -0.4e4);
  const double d = constants::two_pi * 20e3;
  for (int k = 1; k <= 6; ++k) {
    const auto ev = evolve_mode(c, d, k * constants::two_pi / d);
    CHECK(std::abs(ev.alpha) < 1e-12 * std::abs(c) / d * 10);
    CHECK(ev.phi == doctest::Approx(std::norm(c / d) * constants::two_pi * k).epsilon(1e-12));
  }
}

TEST_CASE("calibrated single-mode gate is ideal at any temperature") {
  CrystalSpec spec;
  DriveConfig d;
  const auto modes = compute_modes(spec, Direction::axial);
  d = calibrate_amplitudes(spec, modes, d, {.include_spectators = false});
  const int target[] = {0};
  const auto ph = gate_phases(spec, modes, d, std::nullopt, target);
  CHECK(std::abs(ph.chi) == doctest::Approx(constants::pi).epsilon(1e-12));
  // opposite forces leave 00 and 11 unmoved on the COM mode
  CHECK(std::abs(ph.drives[0][0]) < 1e-12 * std::abs(ph.drives[1][0]));
  for (double nb : {0.0, 0.12, 5.0}) {
    const double n1[] = {nb};
    CHECK(coherent_fidelity(ph, n1) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("coherent spin state is a density matrix") {
  CrystalSpec spec;
  spec.n_ions = 5;
  DriveConfig d;
  d.target_ions = {1, 4};
  const auto modes = compute_modes(spec, Direction::radial_x);
  d.direction = Direction::radial_x;
  d = calibrate_amplitudes(spec, modes, d, {.include_spectators = false});
  const auto ph = gate_phases(spec, modes, d, 0.93 * d.gate_time());
  const std::vector<double> nb(5, 1.0);
  const Eigen::Matrix4cd rho = coherent_spin_state(ph, nb);
  CHECK(std::abs(rho.trace() - 1.0) < 1e-12);
  CHECK((rho - rho.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(rho);
  CHECK(es.eigenvalues().minCoeff() > -1e-12);
  CHECK(coherent_fidelity(ph, nb) < 0.99);
  const std::vector<double> wrong(3, 1.0);
  CHECK_THROWS(coherent_spin_state(ph, wrong));
}

TEST_CASE("phase is antisymmetric in the drive sign and quadratic in amplitude") {
  const cplx c(2e4, 1e4);
  const double d = constants::two_pi * 15e3, t = 70e-6;
  CHECK(evolve_mode(-c, d, t).phi == doctest::Approx(evolve_mode(c, d, t).phi).epsilon(1e-14));
  CHECK(evolve_mode(2.0 * c, d, t).phi == doctest::Approx(4.0 * evolve_mode(c, d, t).phi).epsilon(1e-14));
}

TEST_CASE("spectator coupling is much stronger radially") {
  CrystalSpec spec;
  spec.n_ions = 8;
  DriveConfig d;
  d.target_ions = {0, 7};
  const std::vector<double> nax(8, 0.12), nrad(8, 1.0);
  const auto ax = spectator_budget(spec, d, Direction::axial, nax);
  const auto rx = spectator_budget(spec, d, Direction::radial_x, nrad);
  CHECK(ax.infidelity > 0.0);
  CHECK(rx.infidelity / ax.infidelity > 100.0);
  CHECK(std::abs(rx.phases.chi) == doctest::Approx(constants::pi).epsilon(1e-10));
}

TEST_CASE("trajectory csv") {
  const double d = constants::two_pi * 20e3;
  const auto pts = trajectory(cplx(1e4, 0), d, constants::two_pi / d, 11);
  REQUIRE(pts.size() == 11);
  CHECK(std::abs(pts.back().alpha) < 1e-12);
  CHECK(pts.front().t == 0.0);
  std::ostringstream os;
  write_trajectory_csv(os, pts);
  CHECK(os.str().rfind("t_s,re_alpha,im_alpha,phi\n", 0) == 0);
}

#include <cmath>
#include <vector>

#include "doctest.h"
#include "iongrad/drive_model.hpp"
#include "iongrad/errors.hpp"
#include "iongrad/phase_engine.hpp"

using namespace iongrad;

namespace {

BeamPair beam() {
  BeamPair b;
  b.waist = 1.2e-6;
  b.power00 = 0.7;
  b.power10 = 1.3;
  b.rel_detuning = constants::two_pi * 330e3;
  return b;
}

int count_peaks(const std::vector<double>& p, double floor) {
  int n = 0;
  for (std::size_t i = 1; i + 1 < p.size(); ++i)
    if (p[i] > p[i - 1] && p[i] >= p[i + 1] && p[i] > floor) ++n;
  return n;
}

}  // namespace

TEST_CASE("mode profiles") {
  const auto b = beam();
  CHECK(field_amplitude(b, HgMode::tem00, b.center00) == 1.0);
  CHECK(field_amplitude(b, HgMode::tem10, b.center10) == 0.0);
  CHECK(field_amplitude(b, HgMode::tem10, 0.3e-6) == -field_amplitude(b, HgMode::tem10, -0.3e-6));
}

TEST_CASE("intensity maxima flip side with the relative phase") {
  auto b = beam();
  b.power00 = b.power10 = 1.0;
  auto bpi = b;
  bpi.rel_phase = constants::pi;
  for (double x : {-2.1e-6, -0.4e-6, 0.0, 0.25e-6, 1.7e-6}) {
    CHECK(interference_intensity(b, x, 0.0) == doctest::Approx(interference_intensity(bpi, -x, 0.0)).epsilon(1e-15));
  }
  CHECK(interference_intensity(b, 0.3e-6, 0.0) > interference_intensity(b, -0.3e-6, 0.0));
  CHECK(interference_intensity(bpi, 0.3e-6, 0.0) < interference_intensity(bpi, -0.3e-6, 0.0));
}

TEST_CASE("stark gradient matches central differences") {
  const auto b = beam();
  const double sens = 2.0e5;
  const double h = 1e-6 * b.waist;
  for (double t : {0.0, 0.37e-6, 1.1e-6}) {
    for (double x : {-1.9e-6, -0.5e-6, 0.0, 0.2e-6, 0.8e-6, 2.5e-6}) {
      const double fd = sens * (interference_intensity(b, x + h, t) - interference_intensity(b, x - h, t)) / (2 * h);
      const double an = stark_gradient(b, x, t, sens);
      CHECK(std::abs(an - fd) <= 1e-6 * std::abs(fd) + 1e-9 * sens / b.waist);
    }
  }
}

TEST_CASE("oscillating gradient amplitude") {
  auto b = beam();
  const double sens = 1.0e5;
  const double period = constants::two_pi / b.rel_detuning;
  // half the peak-to-peak swing over one beat period
  const double x = 0.0;
  const double swing = 0.5 * (stark_gradient(b, x, 0.0, sens) - stark_gradient(b, x, 0.5 * period, sens));
  CHECK(oscillating_gradient_amplitude(b, x, sens) == doctest::Approx(swing).epsilon(1e-12));
  const double a0 = oscillating_gradient_amplitude(b, x, sens);
  b.power00 *= 4.0;
  b.power10 *= 9.0;
  CHECK(oscillating_gradient_amplitude(b, x, sens) == doctest::Approx(6.0 * a0).epsilon(1e-14));
  // TEM10 null: the static part of the gradient vanishes at a symmetric centre
  b.power00 = 0.0;
  CHECK(stark_gradient(b, 0.0, 0.0, sens) == 0.0);
}

TEST_CASE("polarisation gradient has no intensity representation") {
  auto b = beam();
  b.polarization = Polarization::lin_perpendicular;
  CHECK_THROWS_AS(interference_intensity(b, 0.0, 0.0), PhysicsError);
  CHECK(stark_gradient(b, 0.0, 0.0, 1.0) == doctest::Approx(oscillating_gradient_amplitude(b, 0.0, 1.0)));
}

TEST_CASE("calibration makes the gate maximally entangling") {
  CrystalSpec spec;
  spec.n_ions = 4;
  DriveConfig d;
  d.target_ions = {0, 3};
  const auto modes = compute_modes(spec, Direction::axial);
  const int target[] = {0};
  const auto single = calibrate_amplitudes(spec, modes, d, {.include_spectators = false});
  CHECK(std::abs(gate_phases(spec, modes, single, std::nullopt, target).chi) ==
        doctest::Approx(constants::pi).epsilon(1e-12));
  const auto all = calibrate_amplitudes(spec, modes, d, {.include_spectators = true});
  CHECK(std::abs(gate_phases(spec, modes, all).chi) == doctest::Approx(constants::pi).epsilon(1e-12));
  CHECK(all.force_amp[0] == all.force_amp[1]);
}

TEST_CASE("power trade-off leaves the calibrated gate unchanged") {
  CrystalSpec spec;
  spec.n_ions = 3;
  DriveConfig d;
  d.target_ions = {0, 2};
  BeamPair a = beam(), b = beam();
  b.power00 = a.power00 * 5.0;
  b.power10 = a.power10 / 5.0;
  const auto ca = calibrate_force(a, spec, d);
  const auto cb = calibrate_force(b, spec, d);
  const auto modes = compute_modes(spec, Direction::axial);
  CHECK(gate_phases(spec, modes, ca).chi == doctest::Approx(gate_phases(spec, modes, cb).chi).epsilon(1e-10));
  CHECK(ca.force_amp[0] == doctest::Approx(cb.force_amp[0]).epsilon(1e-10));
  CHECK(ca.power_scale == doctest::Approx(cb.power_scale).epsilon(1e-10));
}

TEST_CASE("non-participating ion cannot be calibrated") {
  CrystalSpec spec;
  spec.n_ions = 3;
  DriveConfig d;
  d.target_ions = {0, 1};
  d.target_mode = 1;
  CHECK_THROWS_AS(calibrate_amplitudes(spec, compute_modes(spec, Direction::axial), d), CalibrationError);
  d.target_ions = {0, 0};
  CHECK_THROWS_AS(d.validate(3), ConfigError);
}

TEST_CASE("deflector scan over two ions") {
  CrystalSpec spec;
  const auto eq = solve_equilibrium(spec);
  BeamPair b;
  b.waist = 1.0e-6;
  const auto pts = deflector_scan(b, eq, 5e-6, 1.0e5, 2001);
  std::vector<double> p0, p1;
  for (const auto& p : pts) {
    p0.push_back(p.pop_tem00);
    p1.push_back(p.pop_tem10);
  }
  CHECK(count_peaks(p0, 0.05) == 2);
  CHECK(count_peaks(p1, 0.05) == 4);
  // beam on an ion: TEM10 null, TEM00 phase pi
  const auto on = deflector_scan(b, eq, 5e-6, 1.0e5, 3);
  CHECK(on[0].x < eq.positions[0]);
  BeamPair c = b;
  c.center10 = eq.positions[0];
  CHECK(field_amplitude(c, HgMode::tem10, eq.positions[0]) == 0.0);
  double best = 0.0;
  for (const auto& p : pts) best = std::max(best, p.pop_tem00);
  CHECK(best == doctest::Approx(1.0).epsilon(1e-4));
}

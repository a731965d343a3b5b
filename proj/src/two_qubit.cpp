#include "iongrad/two_qubit.hpp"

#include <cmath>
#include <numbers>

namespace iongrad {

Eigen::Matrix2cd rotation(double theta, double phi) {
  const cplx i(0.0, 1.0);
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  Eigen::Matrix2cd r;
  r(0, 0) = c;
  r(1, 1) = c;
  r(0, 1) = -i * s * std::exp(-i * phi);
  r(1, 0) = -i * s * std::exp(i * phi);
  return r;
}

Eigen::Matrix4cd collective_rotation(double theta, double phi) {
  const Eigen::Matrix2cd r = rotation(theta, phi);
  Eigen::Matrix4cd out;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) out(2 * a + c, 2 * b + d) = r(a, b) * r(c, d);
  return out;
}

double bell_target_fidelity(const Eigen::Matrix4cd& rho) {
  Eigen::Vector4cd psi = Eigen::Vector4cd::Zero();
  psi[0] = 1.0 / std::sqrt(2.0);
  psi[3] = cplx(0.0, -1.0 / std::sqrt(2.0));
  return (psi.adjoint() * rho * psi)(0, 0).real();
}

namespace {

struct FrameEval {
  double f;
  Eigen::Vector2d grad;
  Eigen::Matrix2d hess;
};

FrameEval eval_frame(const Eigen::Matrix4cd& rho, double b, double c, int sign) {
  const double d = -sign * std::numbers::pi / 4.0;
  std::array<double, 4> theta{};
  for (int k = 0; k < 4; ++k)
    theta[k] = b * kSpinZ[k][0] + c * kSpinZ[k][1] + d * kSpinZ[k][0] * kSpinZ[k][1];
  FrameEval e{0.0, Eigen::Vector2d::Zero(), Eigen::Matrix2d::Zero()};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const cplx t = rho(i, j) * std::polar(1.0, theta[j] - theta[i]);
      const double d1 = kSpinZ[j][0] - kSpinZ[i][0];
      const double d2 = kSpinZ[j][1] - kSpinZ[i][1];
      e.f += t.real();
      e.grad[0] -= d1 * t.imag();
      e.grad[1] -= d2 * t.imag();
      e.hess(0, 0) -= d1 * d1 * t.real();
      e.hess(1, 1) -= d2 * d2 * t.real();
      e.hess(0, 1) -= d1 * d2 * t.real();
    }
  }
  e.hess(1, 0) = e.hess(0, 1);
  e.f *= 0.25;
  e.grad *= 0.25;
  e.hess *= 0.25;
  return e;
}

}  // namespace

FrameFidelity bell_frame_fidelity(const Eigen::Matrix4cd& rho) {
  FrameFidelity best;
  best.fidelity = -1.0;
  constexpr int kGrid = 12;
  const double step = std::numbers::pi / kGrid;
  for (int sign : {1, -1}) {
    double gb = 0, gc = 0, gf = -1;
    for (int p = 0; p < kGrid; ++p)
      for (int q = 0; q < kGrid; ++q) {
        const double f = eval_frame(rho, p * step, q * step, sign).f;
        if (f > gf) gf = f, gb = p * step, gc = q * step;
      }
    Eigen::Vector2d x(gb, gc);
    FrameEval e = eval_frame(rho, x[0], x[1], sign);
    for (int it = 0; it < 60 && e.grad.norm() > 1e-14; ++it) {
      Eigen::Vector2d dir;
      const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(e.hess);
      if (es.eigenvalues().maxCoeff() < -1e-12)
        dir = -e.hess.ldlt().solve(e.grad);
      else
        dir = e.grad;
      double t = 1.0;
      bool moved = false;
      for (int k = 0; k < 50; ++k, t *= 0.5) {
        const FrameEval trial = eval_frame(rho, x[0] + t * dir[0], x[1] + t * dir[1], sign);
        if (trial.f >= e.f) {
          x += t * dir;
          e = trial;
          moved = true;
          break;
        }
      }
      if (!moved) break;
    }
    if (e.f > best.fidelity) {
      best.fidelity = e.f;
      best.phase_q1 = x[0];
      best.phase_q2 = x[1];
      best.chi_sign = sign;
    }
  }
  return best;
}

Eigen::Matrix4cd plus_plus_state() {
  return Eigen::Matrix4cd::Constant(cplx(0.25, 0.0));
}

}  // namespace iongrad

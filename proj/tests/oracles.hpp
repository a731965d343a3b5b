#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library's solvers.

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <complex>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

// Dimensionless potential sum u^2/2 + sum_{i<j} 1/|u_i - u_j|.
inline double coulomb_energy(const std::vector<double>& u) {
  double e = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    e += 0.5 * u[i] * u[i];
    for (std::size_t j = i + 1; j < u.size(); ++j) e += 1.0 / std::abs(u[i] - u[j]);
  }
  return e;
}

inline std::vector<double> coulomb_gradient(const std::vector<double>& u) {
  std::vector<double> g(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    g[i] = u[i];
    for (std::size_t j = 0; j < u.size(); ++j) {
      if (i == j) continue;
      const double d = u[i] - u[j];
      g[i] -= (d > 0 ? 1.0 : -1.0) / (d * d);
    }
  }
  return g;
}

inline Eigen::MatrixXd fd_hessian(const std::vector<double>& u, double h = 1e-5);

// Steepest descent with backtracking from an evenly spaced start, then Newton
// steps on a finite-difference hessian.
inline std::vector<double> brute_equilibrium(int n) {
  std::vector<double> u(n);
  for (int i = 0; i < n; ++i) u[i] = (i - 0.5 * (n - 1)) * 1.5 * std::pow(n, -0.4);
  double step = 0.1;
  for (int it = 0; it < 5000; ++it) {
    const auto g = coulomb_gradient(u);
    const double e0 = coulomb_energy(u);
    for (;;) {
      std::vector<double> trial(u);
      for (int i = 0; i < n; ++i) trial[i] -= step * g[i];
      bool ordered = true;
      for (int i = 1; i < n; ++i) ordered = ordered && trial[i] > trial[i - 1];
      if (ordered && coulomb_energy(trial) <= e0) {
        u = trial;
        step *= 1.5;
        break;
      }
      step *= 0.5;
      if (step < 1e-18) break;
    }
  }
  for (int it = 0; it < 20; ++it) {
    const auto g = coulomb_gradient(u);
    const Eigen::VectorXd dx = fd_hessian(u).ldlt().solve(Eigen::Map<const Eigen::VectorXd>(g.data(), n));
    for (int i = 0; i < n; ++i) u[i] -= dx[i];
    if (dx.cwiseAbs().maxCoeff() < 1e-15) break;
  }
  return u;
}

// Central differences of the gradient; symmetrised.
inline Eigen::MatrixXd fd_hessian(const std::vector<double>& u, double h) {
  const int n = u.size();
  Eigen::MatrixXd m(n, n);
  for (int j = 0; j < n; ++j) {
    auto up = u, dn = u;
    up[j] += h;
    dn[j] -= h;
    const auto gp = coulomb_gradient(up), gm = coulomb_gradient(dn);
    for (int i = 0; i < n; ++i) m(i, j) = (gp[i] - gm[i]) / (2 * h);
  }
  return 0.5 * (m + m.transpose());
}

inline Eigen::VectorXd sorted_eigenvalues(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  return es.eigenvalues();
}

// Adaptive Gauss-Kronrod of a complex integrand.
template <class F>
cplx integrate(F f, double a, double b, double tol = 1e-12) {
  using boost::math::quadrature::gauss_kronrod;
  const double re = gauss_kronrod<double, 31>::integrate([&](double s) { return f(s).real(); }, a, b, 10, tol);
  const double im = gauss_kronrod<double, 31>::integrate([&](double s) { return f(s).imag(); }, a, b, 10, tol);
  return {re, im};
}

// Forced oscillator H = c a^dag e^{i d t} + h.c. by quadrature:
// alpha(t) = -i int_0^t c e^{i d s} ds,
// phi(t) = Im int_0^t int_0^s alpha'(s')^* alpha'(s) ds' ds = |c|^2 int_0^t (t - u) sin(d u) du.
struct Forced {
  cplx alpha;
  double phi;
};

inline Forced forced_oscillator(cplx c, double d, double t) {
  const cplx i(0, 1);
  const cplx alpha = integrate([&](double s) { return -i * c * std::exp(i * d * s); }, 0.0, t);
  using boost::math::quadrature::gauss_kronrod;
  const double phi = std::norm(c) * gauss_kronrod<double, 31>::integrate(
                                        [&](double u) { return (t - u) * std::sin(d * u); }, 0.0, t, 10, 1e-12);
  return {alpha, phi};
}

}  // namespace oracle

#include "iongrad/lindblad.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <ostream>

#include "iongrad/csv.hpp"
#include "iongrad/errors.hpp"
#include "iongrad/phase_engine.hpp"
#include "json.hpp"

namespace iongrad {

std::string_view to_string(T1Model m) {
  return m == T1Model::symmetric ? "symmetric" : "decay";
}

std::string_view to_string(DephasingModel m) {
  return m == DephasingModel::independent ? "independent" : "collective";
}

std::string_view to_string(Channel c) {
  switch (c) {
    case Channel::qubit_t1:
      return "qubit_t1";
    case Channel::qubit_t2:
      return "qubit_t2";
    case Channel::motional_dephasing:
      return "motional_decoherence";
    case Channel::heating:
      return "com_heating";
  }
  return "?";
}

double NoiseModel::pure_dephasing_rate() const {
  const double g1 = 1.0 / t1;
  // coherence decay from T1 alone: g1 (symmetric) or g1/2 (decay only)
  const double from_t1 = t1_model == T1Model::symmetric ? g1 : 0.5 * g1;
  return 0.5 * (1.0 / t2 - from_t1);
}

void NoiseModel::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0)) throw ConfigError(std::string("noise.") + name + " must be > 0");
  };
  positive(t1, "t1_s");
  positive(t2, "t2_s");
  positive(motional_coherence_axial, "motional_coherence_axial_s");
  positive(motional_coherence_radial, "motional_coherence_radial_s");
  auto nonneg = [](double v, const char* name) {
    if (!(v >= 0)) throw ConfigError(std::string("noise.") + name + " must be >= 0");
  };
  nonneg(heating_rate_per_ion, "heating_rate_per_ion");
  nonneg(noncom_heating_scale, "noncom_heating_scale");
  nonneg(scattering_rayleigh, "scattering_rayleigh_per_s");
  nonneg(scattering_raman, "scattering_raman_per_s");
  nonneg(nbar_axial, "nbar_axial");
  nonneg(nbar_radial, "nbar_radial");
  if (!(spam_error >= 0 && spam_error < 1)) throw ConfigError("noise.spam_error must be in [0,1)");
  if (pure_dephasing_rate() < -1e-15) {
    throw ConfigError(std::string("noise: t2_s is longer than the ") + std::string(to_string(t1_model)) +
                      " T1 model allows (t2 <= " + (t1_model == T1Model::symmetric ? "t1" : "2 t1") +
                      "); pure dephasing rate would be negative");
  }
}

double mode_heating_rate(const NoiseModel& noise, const CrystalSpec& spec, const ModeSpectrum& modes,
                         int mode) {
  const double com = noise.heating_rate_per_ion * spec.n_ions *
                     std::pow(spec.omega_ax / modes.frequencies.at(0),
                              noise.heating_frequency_exponent);
  if (mode == 0) return com;
  return com * noise.noncom_heating_scale;
}

std::vector<JumpOperator> build_jump_operators(const NoiseModel& noise, double motional_coherence,
                                               double nbar_dot) {
  noise.validate();
  std::vector<JumpOperator> ops;
  const double g1 = 1.0 / noise.t1;
  if (g1 > 0) {
    for (int q = 0; q < 2; ++q) {
      ops.push_back({Channel::qubit_t1, JumpKind::sigma_minus, q, g1});
      if (noise.t1_model == T1Model::symmetric)
        ops.push_back({Channel::qubit_t1, JumpKind::sigma_plus, q, g1});
    }
  }
  const double gphi = std::max(0.0, noise.pure_dephasing_rate());
  if (gphi > 0) {
    if (noise.dephasing == DephasingModel::independent) {
      for (int q = 0; q < 2; ++q) ops.push_back({Channel::qubit_t2, JumpKind::sigma_z, q, gphi});
    } else {
      ops.push_back({Channel::qubit_t2, JumpKind::sigma_z_sum, 0, gphi});
    }
  }
  // Ramsey coherence of |0>+|1> decays as exp(-gamma t / 2) under a^dag a.
  const double gm = 2.0 / motional_coherence;
  if (gm > 0) ops.push_back({Channel::motional_dephasing, JumpKind::number, 0, gm});
  if (nbar_dot > 0) {
    ops.push_back({Channel::heating, JumpKind::annihilate, 0, nbar_dot});
    ops.push_back({Channel::heating, JumpKind::create, 0, nbar_dot});
  }
  return ops;
}

std::vector<JumpOperator> select_channel(const std::vector<JumpOperator>& ops, Channel c) {
  std::vector<JumpOperator> out;
  for (const auto& op : ops)
    if (op.channel == c) out.push_back(op);
  return out;
}

double GateHamiltonian::max_displacement() const {
  double m = 0.0;
  for (const auto& c : drive) m = std::max(m, 2.0 * std::abs(c) / detuning);
  return m;
}

GateHamiltonian target_hamiltonian(const CrystalSpec& spec, const ModeSpectrum& modes,
                                   const DriveConfig& drive) {
  const auto eta = lamb_dicke(spec, modes, drive.k_eff);
  GateHamiltonian h;
  h.drive = state_drives(modes, eta, drive, drive.target_mode);
  h.detuning = drive.detuning;
  return h;
}

// ---------------------------------------------------------------------------

namespace {

using SpMat = Eigen::SparseMatrix<cplx>;
using Triplets = std::vector<Eigen::Triplet<cplx>>;

// Single-qubit operators in the basis {0 (z=+1), 1 (z=-1)}.
Eigen::Matrix2cd qubit_op(JumpKind k) {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  switch (k) {
    case JumpKind::sigma_minus:  // |1> -> |0>
      m(0, 1) = 1.0;
      break;
    case JumpKind::sigma_plus:
      m(1, 0) = 1.0;
      break;
    case JumpKind::sigma_z:
      m(0, 0) = 1.0;
      m(1, 1) = -1.0;
      break;
    default:
      break;
  }
  return m;
}

Eigen::Matrix4cd embed(const Eigen::Matrix2cd& op, int qubit) {
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  const Eigen::Matrix2cd& a = qubit == 0 ? op : id;
  const Eigen::Matrix2cd& b = qubit == 0 ? id : op;
  Eigen::Matrix4cd out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) out(2 * i + k, 2 * j + l) = a(i, j) * b(k, l);
  return out;
}

// spin (x) identity_fock
SpMat spin_operator(const Eigen::Matrix4cd& s, int d) {
  Triplets t;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (std::abs(s(i, j)) > 0)
        for (int n = 0; n < d; ++n) t.emplace_back(i * d + n, j * d + n, s(i, j));
  SpMat m(4 * d, 4 * d);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

// diag(weights) (x) {a, a^dag, a^dag a}
SpMat motion_operator(const std::array<cplx, 4>& weights, int d, JumpKind k) {
  Triplets t;
  for (int s = 0; s < 4; ++s) {
    if (weights[s] == cplx(0.0)) continue;
    for (int n = 0; n < d; ++n) {
      if (k == JumpKind::number) {
        if (n > 0) t.emplace_back(s * d + n, s * d + n, weights[s] * double(n));
      } else if (k == JumpKind::annihilate) {
        if (n + 1 < d) t.emplace_back(s * d + n, s * d + n + 1, weights[s] * std::sqrt(n + 1.0));
      } else if (k == JumpKind::create) {
        if (n + 1 < d) t.emplace_back(s * d + n + 1, s * d + n, weights[s] * std::sqrt(n + 1.0));
      }
    }
  }
  SpMat m(4 * d, 4 * d);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SpMat jump_matrix(const JumpOperator& op, int d) {
  const std::array<cplx, 4> ones{1.0, 1.0, 1.0, 1.0};
  switch (op.kind) {
    case JumpKind::sigma_minus:
    case JumpKind::sigma_plus:
    case JumpKind::sigma_z:
      return spin_operator(embed(qubit_op(op.kind), op.qubit), d);
    case JumpKind::sigma_z_sum: {
      Eigen::Matrix4cd s = Eigen::Matrix4cd::Zero();
      for (int i = 0; i < 4; ++i) s(i, i) = double(kSpinZ[i][0] + kSpinZ[i][1]);
      return spin_operator(s, d);
    }
    case JumpKind::number:
    case JumpKind::annihilate:
    case JumpKind::create:
      return motion_operator(ones, d, op.kind);
  }
  return SpMat(4 * d, 4 * d);
}

// vec(A X B) = (B^T (x) A) vec(X), column-major vec.
SpMat kron(const SpMat& a, const SpMat& b) {
  Triplets t;
  t.reserve(static_cast<std::size_t>(a.nonZeros()) * b.nonZeros());
  for (int ka = 0; ka < a.outerSize(); ++ka)
    for (SpMat::InnerIterator ia(a, ka); ia; ++ia)
      for (int kb = 0; kb < b.outerSize(); ++kb)
        for (SpMat::InnerIterator ib(b, kb); ib; ++ib)
          t.emplace_back(ia.row() * b.rows() + ib.row(), ia.col() * b.cols() + ib.col(),
                         ia.value() * ib.value());
  SpMat m(a.rows() * b.rows(), a.cols() * b.cols());
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SpMat identity(int n) {
  SpMat m(n, n);
  m.setIdentity();
  return m;
}

// d vec(rho)/dt = (L0 + e^{i delta t} Lp + e^{-i delta t} Lm) vec(rho)
struct MasterEquation {
  double detuning = 0.0;
  SpMat l0, lp, lm;

  void operator()(const std::vector<cplx>& x, std::vector<cplx>& dxdt, double t) const {
    const Eigen::Map<const Eigen::VectorXcd> v(x.data(), x.size());
    Eigen::Map<Eigen::VectorXcd> out(dxdt.data(), dxdt.size());
    const cplx ph = std::polar(1.0, detuning * t);
    out.noalias() = l0 * v;
    out.noalias() += ph * (lp * v);
    out.noalias() += std::conj(ph) * (lm * v);
  }
};

MasterEquation build_equation(const GateHamiltonian& h, const std::vector<JumpOperator>& ops, int d) {
  const int dim = 4 * d;
  const SpMat id = identity(dim);
  const cplx mi(0.0, -1.0);
  MasterEquation eq;
  eq.detuning = h.detuning;

  const SpMat b = motion_operator(h.drive, d, JumpKind::create);  // sum_i c_i |i><i| (x) a^dag
  const SpMat bd = b.adjoint();
  eq.lp = mi * (kron(id, b) - kron(SpMat(b.transpose()), id));
  eq.lm = mi * (kron(id, bd) - kron(SpMat(bd.transpose()), id));

  Eigen::Matrix4cd shift = Eigen::Matrix4cd::Zero();
  for (int i = 0; i < 4; ++i) shift(i, i) = h.spin_shift[i];
  SpMat heff = spin_operator(shift, d);
  SpMat dissipator(dim * dim, dim * dim);
  for (const auto& op : ops) {
    if (!(op.rate > 0)) continue;
    const SpMat l = jump_matrix(op, d) * std::sqrt(op.rate);
    heff += cplx(0.0, -0.5) * SpMat(l.adjoint() * l);
    dissipator += kron(SpMat(l.conjugate()), l);
  }
  // -i Heff rho + i rho Heff^dag + sum L rho L^dag
  eq.l0 = mi * kron(id, heff) - mi * kron(SpMat(heff.adjoint().transpose()), id) + dissipator;
  eq.l0.prune(cplx(0.0));
  return eq;
}

}  // namespace

// ---------------------------------------------------------------------------

Eigen::Matrix4cd OpenSystemState::spin() const {
  const int d = fock_dim();
  Eigen::Matrix4cd s = Eigen::Matrix4cd::Zero();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int n = 0; n < d; ++n) s(i, j) += rho(i * d + n, j * d + n);
  return s;
}

double OpenSystemState::purity() const {
  return (rho * rho).trace().real();
}

double OpenSystemState::hermiticity_error() const {
  return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

double OpenSystemState::min_eigenvalue() const {
  const Eigen::MatrixXcd herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double OpenSystemState::top_leakage() const {
  const int d = fock_dim();
  double p = 0.0;
  for (int s = 0; s < 4; ++s)
    for (int n = std::max(0, d - 2); n < d; ++n) p += rho(s * d + n, s * d + n).real();
  return p;
}

int default_n_max(double nbar, double max_displacement) {
  const int by_formula =
      static_cast<int>(std::ceil(nbar + 6.0 * std::sqrt(nbar + 1.0) + 4.0 * max_displacement + 4.0));
  // Also keep the thermal tail of the top two levels below 1e-10.
  int by_tail = 1;
  if (nbar > 0) {
    const double r = nbar / (nbar + 1.0);
    while (std::pow(r, by_tail - 1) * (1.0 + r) / (nbar + 1.0) > 1e-10) ++by_tail;
  }
  return std::max(by_formula, by_tail);
}

OpenSystemState thermal_state(const Eigen::Matrix4cd& spin, double nbar, int n_max) {
  if (n_max < 1) throw ConfigError("n_max must be >= 1");
  const int d = n_max + 1;
  std::vector<double> p(d);
  const double r = nbar / (nbar + 1.0);
  double sum = 0.0;
  for (int n = 0; n < d; ++n) sum += p[n] = std::pow(r, n) / (nbar + 1.0);
  for (double& v : p) v /= sum;
  OpenSystemState st;
  st.n_max = n_max;
  st.rho = Eigen::MatrixXcd::Zero(4 * d, 4 * d);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int n = 0; n < d; ++n) st.rho(i * d + n, j * d + n) = spin(i, j) * p[n];
  return st;
}

OpenSystemState evolve(const GateHamiltonian& h, const std::vector<JumpOperator>& ops,
                       OpenSystemState state, double t_end, const EvolveOptions& opts) {
  if (t_end < state.time) throw ConfigError("evolve: t_end before the current time");
  if (t_end == state.time) return state;
  const int d = state.fock_dim();
  const auto eq = build_equation(h, ops, d);

  namespace ode = boost::numeric::odeint;
  std::vector<cplx> x(state.rho.data(), state.rho.data() + state.rho.size());
  using Stepper = ode::runge_kutta_dopri5<std::vector<cplx>>;
  const double period = h.detuning > 0 ? constants::two_pi / h.detuning : t_end - state.time;
  ode::integrate_adaptive(ode::make_controlled<Stepper>(opts.abs_tol, opts.rel_tol), std::cref(eq), x,
                          state.time, t_end, 1e-3 * period);
  state.rho = Eigen::Map<Eigen::MatrixXcd>(x.data(), 4 * d, 4 * d);
  state.time = t_end;

  const double leak = state.top_leakage();
  if (leak > opts.leakage_limit) {
    throw TruncationError("Fock space too small: top two levels hold " + num(leak, 3) +
                              " (limit " + num(opts.leakage_limit, 3) + "); rerun with n_max > " +
                              std::to_string(state.n_max),
                          leak);
  }
  return state;
}

void apply_spin_unitary(OpenSystemState& state, const Eigen::Matrix4cd& u) {
  const SpMat U = spin_operator(u, state.fock_dim());
  state.rho = U * (state.rho * SpMat(U.adjoint()));
}

void apply_depolarizing(OpenSystemState& state, double p) {
  if (!(p > 0)) return;
  const int d = state.fock_dim();
  const cplx i(0.0, 1.0);
  Eigen::Matrix2cd x, y, z;
  x << 0, 1, 1, 0;
  y << 0, -i, i, 0;
  z << 1, 0, 0, -1;
  for (int q = 0; q < 2; ++q) {
    Eigen::MatrixXcd acc = (1.0 - 0.75 * p) * state.rho;
    for (const auto* pauli : {&x, &y, &z}) {
      const SpMat P = spin_operator(embed(*pauli, q), d);
      acc += 0.25 * p * (P * (state.rho * P));
    }
    state.rho = acc;
  }
}

double bell_fidelity(const OpenSystemState& state) {
  return bell_frame_fidelity(state.spin()).fidelity;
}

GateRun run_gate(const GateHamiltonian& h, const std::vector<JumpOperator>& ops, double nbar,
                 double t_gate, std::optional<int> n_max, const EvolveOptions& opts) {
  const int nm = n_max.value_or(default_n_max(nbar, h.max_displacement()));
  GateRun r;
  r.state = evolve(h, ops, thermal_state(plus_plus_state(), nbar, nm), t_gate, opts);
  r.fidelity = bell_fidelity(r.state);
  return r;
}

double infidelity_contribution(const GateHamiltonian& h, const std::vector<JumpOperator>& ops,
                               double nbar, double t_gate, std::optional<int> n_max) {
  if (ops.empty()) return 0.0;
  const double f0 = run_gate(h, {}, nbar, t_gate, n_max).fidelity;
  const double f1 = run_gate(h, ops, nbar, t_gate, n_max).fidelity;
  return f0 - f1;
}

std::string diagnostics_json(const OpenSystemState& state) {
  nlohmann::ordered_json j;
  j["time_s"] = state.time;
  j["n_max"] = state.n_max;
  j["trace"] = state.trace();
  j["purity"] = state.purity();
  j["fidelity"] = bell_fidelity(state);
  j["top_fock_leakage"] = state.top_leakage();
  j["min_eigenvalue"] = state.min_eigenvalue();
  return j.dump(2);
}

void write_matrix_text(std::ostream& os, const Eigen::MatrixXcd& m) {
  os << "dim " << m.rows() << '\n';
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      if (c) os << ' ';
      os << num(m(r, c).real(), 17) << ',' << num(m(r, c).imag(), 17);
    }
    os << '\n';
  }
}

}  // namespace iongrad

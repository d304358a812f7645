#include "hamsim/ham.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hamsim::ham {

using numerics::Complex;
using numerics::kI;

namespace {

inline double simpson_weight(int j, int n) {
  if (j == 0 || j == n) return 1.0;
  return (j % 2 == 1) ? 4.0 : 2.0;
}

void check_quad(int quad_points) {
  if (quad_points < 2 || quad_points % 2 != 0)
    throw std::invalid_argument("quad_points must be even and >= 2");
}

// exp(-i theta H) for Hermitian H via eigendecomposition.
CMatrix unitary_exp(const CMatrix& h, double theta) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  const auto& v = es.eigenvectors();
  CVector phases(h.rows());
  for (Eigen::Index k = 0; k < h.rows(); ++k)
    phases[k] = std::exp(-kI * theta * es.eigenvalues()[k]);
  return v * phases.asDiagonal() * v.adjoint();
}

// kron(u, I_{n1}) for a 2x2 system operator.
CMatrix lift_system(const Eigen::Matrix2cd& u, int n1) {
  CMatrix out = CMatrix::Zero(2 * n1, 2 * n1);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      out.block(a * n1, b * n1, n1, n1) =
          u(a, b) * CMatrix::Identity(n1, n1);
  return out;
}

}  // namespace

ObservableSet make_observable_set(std::vector<CMatrix> ops) {
  if (ops.empty())
    throw std::invalid_argument("make_observable_set: needs at least one operator");
  const auto d = ops.front().rows();
  for (const auto& p : ops)
    if (p.rows() != d || p.cols() != d)
      throw std::invalid_argument("make_observable_set: operators must be square, equal size");
  ObservableSet set;
  const int k = static_cast<int>(ops.size());
  set.gram.resize(k, k);
  for (int m = 0; m < k; ++m)
    for (int n = 0; n < k; ++n)
      set.gram(m, n) = (ops[m] * ops[n]).trace();
  set.ops = std::move(ops);
  return set;
}

CMatrix EffectiveState::assemble(const ObservableSet& set) const {
  if (coeffs.size() != static_cast<Eigen::Index>(set.ops.size()))
    throw std::invalid_argument("EffectiveState::assemble: coefficient count mismatch");
  CMatrix alpha = CMatrix::Zero(set.ops.front().rows(), set.ops.front().cols());
  for (Eigen::Index n = 0; n < coeffs.size(); ++n)
    alpha += coeffs[n] * set.ops[n];
  return alpha;
}

EffectiveState fit_effective_state(const ObservableSet& set, const CVector& targets) {
  const auto k = static_cast<Eigen::Index>(set.ops.size());
  if (targets.size() != k)
    throw std::invalid_argument("fit_effective_state: target count mismatch");
  Eigen::FullPivLU<CMatrix> lu(set.gram);
  if (!lu.isInvertible())
    throw std::invalid_argument("fit_effective_state: singular Gram matrix");
  EffectiveState st;
  st.coeffs = lu.solve(targets);
  const double scale = std::max(1.0, targets.cwiseAbs().maxCoeff());
  if ((set.gram * st.coeffs - targets).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw std::runtime_error("fit_effective_state: Gram system solved poorly (ill-conditioned)");
  Complex tr = 0.0;
  for (Eigen::Index n = 0; n < k; ++n) tr += st.coeffs[n] * set.ops[n].trace();
  if (std::abs(tr - Complex(1.0)) > 1e-10)
    throw std::invalid_argument(
        "fit_effective_state: fitted state is not unit trace (trace-inconsistent targets)");
  st.trace = tr.real();
  return st;
}

double linear_entropy(const CMatrix& rho) {
  if (rho.rows() != rho.cols())
    throw std::invalid_argument("linear_entropy: matrix must be square");
  return 1.0 - (rho * rho).trace().real();
}

CMatrix second_order_delta_alpha(const CMatrix& alpha, double t, double tau,
                                 const VSampler& sampler, int quad_points) {
  if (alpha.rows() != alpha.cols())
    throw std::invalid_argument("second_order_delta_alpha: alpha must be square");
  if (!(tau > 0.0) || !std::isfinite(tau))
    throw std::invalid_argument("second_order_delta_alpha: tau must be positive");
  check_quad(quad_points);

  const int n = quad_points;
  const double h = tau / n;
  const auto d = alpha.rows();

  CMatrix v(d, d), inner(d, d);
  CMatrix w = CMatrix::Zero(d, d);
  CMatrix v_int = CMatrix::Zero(d, d);     // int_t^{t+tau} V(s) ds
  CMatrix delta2 = CMatrix::Zero(d, d);    // int [V(s), [W(s), alpha]] ds
  CMatrix comm1(d, d), comm2(d, d);

  for (int j = 0; j <= n; ++j) {
    const double sj = t + j * h;
    sampler(sj, v);
    v_int += (h / 3.0 * simpson_weight(j, n)) * v;
    if (j == 0) continue;  // W(t) = 0, no second-order contribution
    // W(s_j) = int_t^{s_j} V, fresh Simpson grid on [t, s_j]
    const double hj = (sj - t) / n;
    w.setZero();
    for (int q = 0; q <= n; ++q) {
      sampler(t + q * hj, inner);
      w += (hj / 3.0 * simpson_weight(q, n)) * inner;
    }
    comm1.noalias() = w * alpha;
    comm1.noalias() -= alpha * w;
    comm2.noalias() = v * comm1;
    comm2.noalias() -= comm1 * v;
    delta2 += (h / 3.0 * simpson_weight(j, n)) * comm2;
  }

  comm1.noalias() = v_int * alpha;
  comm1.noalias() -= alpha * v_int;
  return (-kI * comm1 - delta2).eval();
}

CMatrix suzuki_step_with(const CMatrix& alpha, double t, double tau,
                         const CMatrix& u_pre, const CMatrix& u_post,
                         const VSampler& sampler, int quad_points) {
  const auto d = alpha.rows();
  if (alpha.cols() != d || u_pre.rows() != d || u_pre.cols() != d ||
      u_post.rows() != d || u_post.cols() != d)
    throw std::invalid_argument("suzuki_step_with: dimension mismatch");
  CMatrix a = u_pre * alpha * u_pre.adjoint();
  a += second_order_delta_alpha(a, t, tau, sampler, quad_points);
  return u_post * a * u_post.adjoint();
}

CMatrix suzuki_step(const CMatrix& alpha, double t, double tau,
                    const CMatrix& h_sys, const VSampler& sampler, int quad_points) {
  if (h_sys.rows() != alpha.rows() || h_sys.cols() != alpha.cols())
    throw std::invalid_argument("suzuki_step: H dimension mismatch");
  if (!numerics::is_hermitian(h_sys, 1e-10))
    throw std::invalid_argument("suzuki_step: H must be Hermitian");
  const CMatrix u = unitary_exp(h_sys, tau / 2.0);
  return suzuki_step_with(alpha, t, tau, u, u, sampler, quad_points);
}

namespace {

// Interaction-picture coupling for one bath realization:
// V(s) = sigma_z (x) C(s), C(s)_{n1 n2} = C_{n1 n2} e^{-i s omega(n1, n2)}.
struct InteractionSampler {
  const bath::BathRealization* r;
  Eigen::MatrixXcd c0;            // static C
  mutable std::vector<Complex> phase;  // e^{-i s (de/N1) k}, k = 0 .. N1-1

  explicit InteractionSampler(const bath::BathRealization& br)
      : r(&br), c0(bath::reduced_bath_operator(br)),
        phase(static_cast<std::size_t>(br.params.n_levels)) {}

  void operator()(double s, CMatrix& out) const {
    const int n1 = r->params.n_levels;
    const double dw = r->params.band_width / n1;
    for (int k = 0; k < n1; ++k)
      phase[k] = std::exp(-kI * (s * dw * k));
    out.setZero(2 * n1, 2 * n1);
    for (int i = 0; i < n1 - 1; ++i) {
      for (int j = i + 1; j < n1; ++j) {
        const Complex v = c0(i, j) * phase[j - i];
        out(i, j) = v;
        out(j, i) = std::conj(v);
        out(n1 + i, n1 + j) = -v;
        out(n1 + j, n1 + i) = -std::conj(v);
      }
    }
  }
};

// Ordered product of midpoint exponentials of H_S(s(t)) over [t0, t1],
// approximating the system-only propagator when H_S varies within a step.
Eigen::Matrix2cd system_half_propagator(const schedule::SearchModel& model,
                                        double t0, double t1, int substeps,
                                        const std::optional<double>& freeze_s) {
  Eigen::Matrix2cd u = Eigen::Matrix2cd::Identity();
  if (freeze_s) {
    const CMatrix e = unitary_exp(schedule::system_hamiltonian(*freeze_s, model), t1 - t0);
    return e;
  }
  const double h = (t1 - t0) / substeps;
  for (int k = 0; k < substeps; ++k) {
    const double mid = std::min(t0 + (k + 0.5) * h, model.t_total);
    const CMatrix e =
        unitary_exp(schedule::system_hamiltonian(schedule::s_of_t(mid, model), model), h);
    u = Eigen::Matrix2cd(e) * u;  // later times act on the left
  }
  return u;
}

}  // namespace

observables::Trajectory ham_propagate(const schedule::SearchModel& model,
                                      const bath::BathRealization& bath_r,
                                      const HamOptions& opts) {
  const bath::BathParams& params = bath_r.params;
  bath::validate(params);
  if (params.n_levels > 256)
    throw std::invalid_argument(
        "ham_propagate: n_levels > 256 (this path is a toy-scale validation oracle)");
  if (opts.hs_substeps < 1)
    throw std::invalid_argument("ham_propagate: hs_substeps must be >= 1");
  check_quad(opts.quad_points);

  if (opts.t_end < 0.0 || opts.tau < 0.0)
    throw std::invalid_argument("ham_propagate: t_end and tau must be >= 0 (0 = default)");
  const double t_end = opts.t_end > 0.0 ? opts.t_end : model.t_total;
  if (!opts.freeze_s && t_end > model.t_total * (1.0 + 1e-12))
    throw std::invalid_argument("ham_propagate: t_end beyond t_total requires freeze_s");
  const double tau = opts.tau > 0.0 ? opts.tau : 2.0 / params.band_width;

  const int n1 = params.n_levels;
  const int d = 2 * n1;
  const bool coupled = params.coupling != 0.0;
  InteractionSampler sampler(bath_r);
  VSampler vs = [&sampler](double s, CMatrix& out) { sampler(s, out); };

  Eigen::Matrix2cd rho;
  if (opts.initial_rho) {
    rho = *opts.initial_rho;
  } else {
    const Eigen::Vector2cd psi = schedule::initial_system_state(model);
    rho = psi * psi.adjoint();
  }

  observables::Trajectory traj;
  traj.meta.solver = "ham";
  traj.meta.seed = params.seed;
  traj.meta.n_qubits = model.n_qubits;
  traj.meta.epsilon = model.epsilon;
  traj.meta.n_levels = params.n_levels;
  traj.meta.band_width = params.band_width;
  traj.meta.coupling = params.coupling;
  traj.meta.dt = tau;

  CMatrix alpha(d, d);

  auto record = [&](double t) {
    observables::validate_density(rho, 1e-8, 1e-8, "ham_propagate");
    traj.times.push_back(t);
    traj.p_success.push_back(observables::success_probability(rho));
    traj.coherence.push_back(observables::coherence_measure(rho));
    traj.purity.push_back(observables::purity(rho));
    traj.drift.push_back(std::abs(rho.trace().real() - 1.0) +
                         std::abs(rho.trace().imag()));
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(rho);
    traj.min_eigenvalue = std::min(traj.min_eigenvalue, es.eigenvalues().minCoeff());
  };

  record(0.0);
  const int full_steps = static_cast<int>(std::floor(t_end / tau + 1e-9));
  double tail = t_end - full_steps * tau;
  if (tail < 1e-9 * t_end) tail = 0.0;
  const int total_steps = full_steps + (tail > 0.0 ? 1 : 0);

  for (int k = 0; k < total_steps; ++k) {
    const double t0 = k * tau;
    const double step = (k < full_steps) ? tau : tail;
    // Re-factorize: alpha = rho_S (x) I/N1 (the Hilbert-space average ansatz).
    alpha.setZero();
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        alpha.block(a * n1, b * n1, n1, n1) =
            (rho(a, b) / double(n1)) * CMatrix::Identity(n1, n1);

    const Eigen::Matrix2cd u1 =
        system_half_propagator(model, t0, t0 + step / 2.0, opts.hs_substeps, opts.freeze_s);
    const Eigen::Matrix2cd u2 = system_half_propagator(model, t0 + step / 2.0, t0 + step,
                                                       opts.hs_substeps, opts.freeze_s);
    if (coupled) {
      alpha = suzuki_step_with(alpha, t0, step, lift_system(u1, n1), lift_system(u2, n1),
                               vs, opts.quad_points);
    } else {
      // V = 0: delta_alpha vanishes identically, only the rotations act.
      const CMatrix l1 = lift_system(u1, n1), l2 = lift_system(u2, n1);
      alpha = l2 * (l1 * alpha * l1.adjoint()).eval() * l2.adjoint();
    }

    // Trace out the bath.
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        rho(a, b) = alpha.block(a * n1, b * n1, n1, n1).trace();
    record(k < full_steps ? (k + 1) * tau : t_end);
  }
  return traj;
}

}  // namespace hamsim::ham

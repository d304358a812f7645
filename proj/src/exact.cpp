#include "hamsim/exact.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "sampling.hpp"

namespace hamsim::exact {

using numerics::kI;

FullState initial_full_state(const schedule::SearchModel& model,
                             const bath::BathParams& params) {
  bath::validate(params);
  const int n1 = params.n_levels;
  const Eigen::Vector2cd sys = schedule::initial_system_state(model);
  FullState st;
  st.n_levels = n1;
  st.amps.resize(2 * n1);
  const double b = 1.0 / std::sqrt(double(n1));
  st.amps.head(n1).setConstant(sys[0] * b);
  st.amps.tail(n1).setConstant(sys[1] * b);
  return st;
}

double coupling_norm_bound(const bath::BathParams& params) {
  return params.lambda_eff() * 2.0 * std::sqrt(2.0 * params.n_levels);
}

double max_dt(const bath::BathParams& params) {
  return 0.05 / (1.0 + params.band_width + coupling_norm_bound(params));
}

double default_dt(const bath::BathParams& params) {
  return std::min(0.02, max_dt(params));
}

namespace {

// Hot inner loop shared by apply_hamiltonian and the propagation derivative.
// out = -i * H(s) * psi  (the -i makes it the Schrodinger RHS; the public
// apply_hamiltonian multiplies it away again).
struct Deriv {
  const schedule::SearchModel* model;
  const CVector* h_e;                 // bath diagonal (stored complex)
  const Eigen::MatrixXcd* c;          // nullptr when lambda == 0
  std::optional<double> freeze_s;
  int n1 = 0;

  void operator()(const CVector& psi, double t, CVector& out) const {
    const double s = freeze_s ? *freeze_s
                              : schedule::s_of_t(std::min(t, model->t_total), *model);
    const double n = model->n_states;
    const double h00 = (1.0 - s) * (1.0 - 1.0 / n);
    const double h01 = -(1.0 - s) * std::sqrt(n - 1.0) / n;
    const double h11 = (1.0 - s) / n + s;

    const auto pm = psi.head(n1);
    const auto pp = psi.tail(n1);
    auto om = out.head(n1);
    auto op = out.tail(n1);
    om = h00 * pm + h01 * pp + h_e->cwiseProduct(pm);
    op = h01 * pm + h11 * pp + h_e->cwiseProduct(pp);
    if (c != nullptr) {
      om.noalias() += (*c) * pm;   // sigma_z (x) C: +C on the m-block,
      op.noalias() -= (*c) * pp;   //               -C on the p-block
    }
    out *= -kI;
  }
};

}  // namespace

CVector apply_hamiltonian(const CVector& psi, double t,
                          const schedule::SearchModel& model,
                          const bath::BathParams& params,
                          const Eigen::MatrixXcd& coupling_op) {
  const int n1 = params.n_levels;
  if (psi.size() != 2 * n1)
    throw std::invalid_argument("apply_hamiltonian: state length must be 2*n_levels");
  if (coupling_op.rows() != n1 || coupling_op.cols() != n1)
    throw std::invalid_argument("apply_hamiltonian: coupling operator must be N1 x N1");
  const CVector he = bath_hamiltonian_diagonal(params).cast<numerics::Complex>();
  const bool coupled = params.coupling != 0.0;
  Deriv d{&model, &he, coupled ? &coupling_op : nullptr, std::nullopt, n1};
  CVector out(psi.size());
  d(psi, t, out);
  return out * kI;  // undo the -i of the RHS form
}

observables::ReducedDensity reduced_density(const FullState& state) {
  const auto pm = state.m_block();
  const auto pp = state.p_block();
  observables::ReducedDensity rho;
  rho(0, 0) = pm.squaredNorm();
  rho(1, 1) = pp.squaredNorm();
  rho(0, 1) = pp.dot(pm);  // sum_n psi_m[n] conj(psi_p[n])
  rho(1, 0) = std::conj(rho(0, 1));
  return rho;
}

observables::Trajectory propagate_exact(const schedule::SearchModel& model,
                                        const bath::BathRealization& bath_r,
                                        const ExactOptions& opts) {
  const bath::BathParams& params = bath_r.params;
  bath::validate(params);
  const double dt_cap = max_dt(params);
  const double dt_req = opts.dt > 0.0 ? opts.dt : default_dt(params);
  if (dt_req > dt_cap * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "propagate_exact: dt = " << dt_req << " exceeds 0.05/(1 + delta_eps + ||C||) = "
       << dt_cap;
    throw std::invalid_argument(os.str());
  }
  const double t_end = opts.t_end > 0.0 ? opts.t_end : model.t_total;
  if (!opts.freeze_s && t_end > model.t_total * (1.0 + 1e-12))
    throw std::invalid_argument("propagate_exact: t_end beyond t_total requires freeze_s");

  const int n1 = params.n_levels;
  FullState st = initial_full_state(model, params);
  if (opts.initial_system) {
    const Eigen::Vector2cd sys = *opts.initial_system;
    if (std::abs(sys.squaredNorm() - 1.0) > 1e-12)
      throw std::invalid_argument("propagate_exact: initial_system must be normalized");
    const double b = 1.0 / std::sqrt(double(n1));
    st.amps.head(n1).setConstant(sys[0] * b);
    st.amps.tail(n1).setConstant(sys[1] * b);
  }

  const CVector he = bath_hamiltonian_diagonal(params).cast<numerics::Complex>();
  const bool coupled = params.coupling != 0.0;
  const Eigen::MatrixXcd c =
      coupled ? bath::reduced_bath_operator(bath_r) : Eigen::MatrixXcd();
  Deriv deriv{&model, &he, coupled ? &c : nullptr, opts.freeze_s, n1};

  observables::Trajectory traj;
  traj.meta.solver = "exact";
  traj.meta.seed = params.seed;
  traj.meta.n_qubits = model.n_qubits;
  traj.meta.epsilon = model.epsilon;
  traj.meta.n_levels = params.n_levels;
  traj.meta.band_width = params.band_width;
  traj.meta.coupling = params.coupling;
  traj.meta.dt = dt_req;

  const auto grid = detail::plan_samples(t_end, opts.sample_dt);
  numerics::Rk4Workspace<CVector> ws;

  auto record = [&](double t) {
    const double drift = std::abs(st.amps.squaredNorm() - 1.0);
    if (drift > 1e-6) {
      std::ostringstream os;
      os << "propagate_exact: norm drift " << drift << " at t = " << t
         << " exceeds 1e-6; reduce dt (current " << dt_req << ", cap " << dt_cap << ")";
      throw std::runtime_error(os.str());
    }
    st.time = t;
    const auto rho = reduced_density(st);
    traj.times.push_back(t);
    traj.p_success.push_back(observables::success_probability(rho));
    traj.coherence.push_back(observables::coherence_measure(rho));
    traj.purity.push_back(observables::purity(rho));
    traj.drift.push_back(drift);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(rho);
    traj.min_eigenvalue = std::min(traj.min_eigenvalue, es.eigenvalues().minCoeff());
  };

  record(0.0);
  const int total_segments = grid.full_segments + (grid.tail > 0.0 ? 1 : 0);
  for (int seg = 0; seg < total_segments; ++seg) {
    const double seg_start = seg * grid.sample_dt;
    const double seg_len = (seg < grid.full_segments) ? grid.sample_dt : grid.tail;
    const int n_sub = detail::substeps_for(seg_len, dt_req);
    const double dt = seg_len / n_sub;
    for (int j = 0; j < n_sub; ++j)
      numerics::rk4_step(deriv, st.amps, seg_start + j * dt, dt, ws);
    record(seg < grid.full_segments ? (seg + 1) * grid.sample_dt : t_end);
  }
  return traj;
}

}  // namespace hamsim::exact

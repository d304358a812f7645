#include "hamsim/master.hpp"

#include <cmath>
#include <stdexcept>

#include "sampling.hpp"

namespace hamsim::master {

using numerics::kI;

namespace {

void check_spec_shapes(const std::vector<CMatrix>& ops, int rate_dim) {
  if (ops.empty())
    throw std::invalid_argument("DissipatorSpec: needs at least one operator");
  const auto d = ops.front().rows();
  for (const auto& a : ops)
    if (a.rows() != d || a.cols() != d)
      throw std::invalid_argument("DissipatorSpec: operators must be square, equal size");
  if (rate_dim != static_cast<int>(ops.size()))
    throw std::invalid_argument("DissipatorSpec: rate matrix must be K x K for K operators");
}

}  // namespace

bool DissipatorSpec::rates_psd(double t, double tol) const {
  const CMatrix g = rates_at(t);
  if (!numerics::is_hermitian(g, 1e-12)) return false;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(g);
  return es.eigenvalues().minCoeff() >= -tol * std::max(1.0, g.cwiseAbs().maxCoeff());
}

DissipatorSpec make_dissipator(std::vector<CMatrix> ops, CMatrix rates) {
  if (rates.rows() != rates.cols())
    throw std::invalid_argument("make_dissipator: rate matrix must be square");
  check_spec_shapes(ops, static_cast<int>(rates.rows()));
  DissipatorSpec d;
  d.ops = std::move(ops);
  d.rates = std::move(rates);
  return d;
}

DissipatorSpec make_dissipator(std::vector<CMatrix> ops,
                               std::function<CMatrix(double)> rates_fn, int dim) {
  check_spec_shapes(ops, dim);
  if (!rates_fn)
    throw std::invalid_argument("make_dissipator: empty rate callback");
  DissipatorSpec d;
  d.ops = std::move(ops);
  d.rates = CMatrix::Zero(dim, dim);
  d.rates_fn = std::move(rates_fn);
  return d;
}

DissipatorSpec dephasing_spec(const bath::BathParams& p) {
  CMatrix sz(2, 2);
  sz << 1.0, 0.0, 0.0, -1.0;
  CMatrix g(1, 1);
  g(0, 0) = bath::gamma_rate(p);
  return make_dissipator({sz}, g);
}

CMatrix master_rhs(const CMatrix& rho, double t, const CMatrix& h,
                   const DissipatorSpec& d) {
  const auto n = rho.rows();
  if (rho.cols() != n || h.rows() != n || h.cols() != n)
    throw std::invalid_argument("master_rhs: dimension mismatch");
  if (!d.ops.empty() && d.ops.front().rows() != n)
    throw std::invalid_argument("master_rhs: operator dimension mismatch");
  const CMatrix g = d.rates_at(t);
  CMatrix s = CMatrix::Zero(n, n);
  const auto k_ops = d.ops.size();
  for (std::size_t l = 0; l < k_ops; ++l) {
    for (std::size_t k = 0; k < k_ops; ++k) {
      const numerics::Complex glk = g(l, k);
      if (glk == 0.0) continue;
      s.noalias() += glk * (d.ops[k] * rho * d.ops[l] - d.ops[l] * d.ops[k] * rho);
    }
  }
  return -kI * (h * rho - rho * h) + 0.5 * (s + s.adjoint().eval());
}

observables::Trajectory propagate_master(const schedule::SearchModel& model,
                                         const DissipatorSpec& dissipator,
                                         const MasterOptions& opts) {
  if (!(opts.dt > 0.0) || opts.dt > 0.05)
    throw std::invalid_argument("propagate_master: dt must satisfy 0 < dt <= 0.05");
  const double t_end = opts.t_end > 0.0 ? opts.t_end : model.t_total;
  if (!opts.freeze_s && t_end > model.t_total * (1.0 + 1e-12))
    throw std::invalid_argument("propagate_master: t_end beyond t_total requires freeze_s");

  CMatrix rho;
  if (opts.initial_rho) {
    rho = *opts.initial_rho;
    if (std::abs(rho.trace().real() - 1.0) > 1e-12)
      throw std::invalid_argument("propagate_master: initial_rho must have unit trace");
  } else {
    const Eigen::Vector2cd psi = schedule::initial_system_state(model);
    rho = psi * psi.adjoint();
  }

  auto deriv = [&](const CMatrix& r, double t, CMatrix& out) {
    const double s = opts.freeze_s ? *opts.freeze_s
                                   : schedule::s_of_t(std::min(t, model.t_total), model);
    out = master_rhs(r, t, schedule::system_hamiltonian(s, model), dissipator);
  };

  observables::Trajectory traj;
  traj.meta.solver = "master";
  traj.meta.n_qubits = model.n_qubits;
  traj.meta.epsilon = model.epsilon;
  traj.meta.dt = opts.dt;

  const auto grid = detail::plan_samples(t_end, opts.sample_dt);
  numerics::Rk4Workspace<CMatrix> ws;

  auto record = [&](double t) {
    const Eigen::Matrix2cd r2 = rho;
    observables::validate_density(r2, 1e-8, 1e-8, "propagate_master");
    traj.times.push_back(t);
    traj.p_success.push_back(observables::success_probability(r2));
    traj.coherence.push_back(observables::coherence_measure(r2));
    traj.purity.push_back(observables::purity(r2));
    traj.drift.push_back(std::abs(rho.trace().real() - 1.0) +
                         std::abs(rho.trace().imag()));
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(r2);
    traj.min_eigenvalue = std::min(traj.min_eigenvalue, es.eigenvalues().minCoeff());
  };

  record(0.0);
  const int total_segments = grid.full_segments + (grid.tail > 0.0 ? 1 : 0);
  for (int seg = 0; seg < total_segments; ++seg) {
    const double seg_start = seg * grid.sample_dt;
    const double seg_len = (seg < grid.full_segments) ? grid.sample_dt : grid.tail;
    const int n_sub = detail::substeps_for(seg_len, opts.dt);
    const double dt = seg_len / n_sub;
    for (int j = 0; j < n_sub; ++j)
      numerics::rk4_step(deriv, rho, seg_start + j * dt, dt, ws);
    record(seg < grid.full_segments ? (seg + 1) * grid.sample_dt : t_end);
  }
  return traj;
}

}  // namespace hamsim::master

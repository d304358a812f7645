#pragma once

// Exact Schrodinger evolution of the coupled system: a 2*N1 state vector
// ordered (system block) x (bath level), m-block first, propagated under
//   H(t) = H_S(s(t)) (x) I  +  I (x) H_E  +  sigma_z (x) C
// with sigma_z = diag(+1, -1) in {|m>, |p>}. H(t) is never materialized:
// H_S mixes the two blocks by scalars, H_E is diagonal, and C multiplies each
// block densely (the only O(N1^2) work). Everything is done in the
// Schrodinger picture; the recorded observables are picture-invariant.

#include <cstdint>
#include <optional>

#include <Eigen/Dense>

#include "hamsim/bath.hpp"
#include "hamsim/numerics.hpp"
#include "hamsim/observables.hpp"
#include "hamsim/schedule.hpp"

namespace hamsim::exact {

using numerics::CVector;

struct FullState {
  CVector amps;       // length 2*N1: [psi_m; psi_p]
  int n_levels = 0;   // N1
  double time = 0;

  auto m_block() const { return amps.head(n_levels); }
  auto p_block() const { return amps.tail(n_levels); }
};

// |psi_S(0)> (x) uniform bath superposition (all levels at 1/sqrt(N1)).
FullState initial_full_state(const schedule::SearchModel& model,
                             const bath::BathParams& params);

// Spectral-norm bound for C used in the step-size rule:
// ||C|| <= lambda_eff * 2 sqrt(2 N1).
double coupling_norm_bound(const bath::BathParams& params);

// Largest admissible RK4 step, 0.05 / (1 + delta_eps + ||C||_bound),
// and the default dt = min(0.02, that bound).
double max_dt(const bath::BathParams& params);
double default_dt(const bath::BathParams& params);

// y = H(t) psi, blockwise as described above.
CVector apply_hamiltonian(const CVector& psi, double t,
                          const schedule::SearchModel& model,
                          const bath::BathParams& params,
                          const Eigen::MatrixXcd& coupling_op);

// rho_S = Tr_E |psi><psi| as a 2x2 matrix.
observables::ReducedDensity reduced_density(const FullState& state);

struct ExactOptions {
  double dt = 0;                    // 0 -> default_dt(params)
  double sample_dt = 0;             // 0 -> ceil(t_end / 500), at least 1
  double t_end = 0;                 // 0 -> model.t_total
  std::optional<double> freeze_s;   // propagate with H_S frozen at this s
  std::optional<Eigen::Vector2cd> initial_system;  // default: ground state at s=0
};

// Full run; records ~500 samples of the reduced observables and the norm
// drift |  ||psi||^2 - 1 |. Norm drift beyond 1e-6 aborts with a step-size
// diagnostic.
observables::Trajectory propagate_exact(const schedule::SearchModel& model,
                                        const bath::BathRealization& bath_r,
                                        const ExactOptions& opts);

}  // namespace hamsim::exact

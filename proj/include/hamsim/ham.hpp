#pragma once

// Hilbert-space-average machinery: represent the full-system state by the
// maximum-linear-entropy operator alpha = sum_n b_n P_n compatible with a set
// of observable expectations, and propagate it with a second-order split
// step: a half rotation under the system Hamiltonian, the second-order
// interaction update
//   delta_alpha = -i int [V(s), alpha] ds
//                 - int int_{s' <= s} [V(s), [V(s'), alpha]] ds' ds,
// then the second half rotation. This path is a validation oracle for the
// master equation at toy bath sizes, not the production solver.

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "hamsim/bath.hpp"
#include "hamsim/numerics.hpp"
#include "hamsim/observables.hpp"
#include "hamsim/schedule.hpp"

namespace hamsim::ham {

using numerics::CMatrix;
using numerics::CVector;

// V(s) writer; implementations fill `out` with the interaction operator at
// absolute time s (buffer reuse keeps the quadrature loops allocation-free).
using VSampler = std::function<void(double s, CMatrix& out)>;

struct ObservableSet {
  std::vector<CMatrix> ops;   // P_n, all D x D
  CMatrix gram;               // gram(m, n) = Tr[P_m P_n]
};

// Builds the set and its Gram matrix; operators must be square and same size.
ObservableSet make_observable_set(std::vector<CMatrix> ops);

struct EffectiveState {
  CVector coeffs;   // b_n
  double trace = 0; // Tr[alpha], checked to equal 1

  CMatrix assemble(const ObservableSet& set) const;
};

// Solves Tr[P_m P_n] b = p for the expansion coefficients. Errors: singular
// (or numerically unusable) Gram matrix; fitted state without unit trace
// (targets must be trace-consistent and the identity reachable in the span).
EffectiveState fit_effective_state(const ObservableSet& set, const CVector& targets);

// S_lin = 1 - Tr[rho^2]; the fit above maximizes this among all operators
// with the same target expectations.
double linear_entropy(const CMatrix& rho);

// Second-order interaction update defined above. Both integrals use
// composite Simpson with quad_points subintervals (even, >= 2); the inner
// integral gets a fresh Simpson grid on [t, s] for each outer node.
CMatrix second_order_delta_alpha(const CMatrix& alpha, double t, double tau,
                                 const VSampler& sampler, int quad_points);

// One split step alpha -> U alpha' U... with explicit half-propagators:
// alpha <- u_post * (u_pre alpha u_pre^+  +  delta_alpha) * u_post^+.
CMatrix suzuki_step_with(const CMatrix& alpha, double t, double tau,
                         const CMatrix& u_pre, const CMatrix& u_post,
                         const VSampler& sampler, int quad_points);

// Same with u_pre = u_post = exp(-i tau/2 H_sys) for a frozen Hermitian
// system Hamiltonian (any dimension).
CMatrix suzuki_step(const CMatrix& alpha, double t, double tau,
                    const CMatrix& h_sys, const VSampler& sampler, int quad_points);

struct HamOptions {
  double tau = 0;        // step size; 0 -> 2 / band_width
  int quad_points = 32;  // Simpson subintervals per integral dimension
  int hs_substeps = 16;  // half-rotation substeps resolving H_S(t) over tau/2
  double t_end = 0;      // 0 -> model.t_total
  std::optional<double> freeze_s;
  std::optional<Eigen::Matrix2cd> initial_rho;
};

// Steps alpha = rho_S (x) I/N1 with the split step above, re-factorizing
// after every step (rho_S <- Tr_E[alpha], alpha <- rho_S (x) I/N1), using the
// interaction-picture coupling V(s) = sigma_z (x) C(s) with
// C(s)_{n1,n2} = C_{n1,n2} e^{-i s omega}, omega = (de/N1)(n2 - n1).
// Guarded to toy bath sizes (n_levels <= 256).
observables::Trajectory ham_propagate(const schedule::SearchModel& model,
                                      const bath::BathRealization& bath_r,
                                      const HamOptions& opts);

}  // namespace hamsim::ham

#pragma once

// Generic second-order master equation in the form
//   d rho/dt = -i[H(t), rho] + 1/2 sum_{l,k} Gamma_lk(t) { A_k rho A_l - A_l A_k rho } + h.c.
// (the Hermitian conjugate applies to the summation only), plus the pure
// dephasing specialization Gamma (sigma_z rho sigma_z - rho) that the
// random-band bath induces on the two-level search dynamics.

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "hamsim/bath.hpp"
#include "hamsim/numerics.hpp"
#include "hamsim/observables.hpp"
#include "hamsim/schedule.hpp"

namespace hamsim::master {

using numerics::CMatrix;

struct DissipatorSpec {
  std::vector<CMatrix> ops;              // coupling operators A_k (Hermitian)
  CMatrix rates;                         // constant rate matrix Gamma_lk
  std::function<CMatrix(double)> rates_fn;  // optional time-dependent override

  CMatrix rates_at(double t) const { return rates_fn ? rates_fn(t) : rates; }
  // A Lindblad-form dissipator needs Gamma_lk Hermitian PSD; callers may
  // propagate with a non-PSD rate matrix, but they can ask first.
  bool rates_psd(double t = 0.0, double tol = 1e-12) const;
};

// Validates shapes (square ops of one dimension, K x K Hermitian rates).
DissipatorSpec make_dissipator(std::vector<CMatrix> ops, CMatrix rates);
DissipatorSpec make_dissipator(std::vector<CMatrix> ops,
                               std::function<CMatrix(double)> rates_fn, int dim);

// Dephasing induced by the bath: single operator sigma_z, scalar rate
// Gamma = gamma_rate(p).
DissipatorSpec dephasing_spec(const bath::BathParams& p);

// Right-hand side above; exactly traceless up to rounding.
CMatrix master_rhs(const CMatrix& rho, double t, const CMatrix& h,
                   const DissipatorSpec& d);

struct MasterOptions {
  double dt = 0.02;                 // RK4 step, must be <= 0.05
  double sample_dt = 0;             // 0 -> ceil(t_end / 500), at least 1
  double t_end = 0;                 // 0 -> model.t_total
  std::optional<double> freeze_s;   // propagate with H_S frozen at this s
  std::optional<Eigen::Matrix2cd> initial_rho;  // default |psi_S(0)><psi_S(0)|
};

// Integrates the two-level master equation with H(t) = H_S(s(t)) and the
// given dissipator. Trace, Hermiticity and positivity are checked at every
// sample; violations abort (no silent repair).
observables::Trajectory propagate_master(const schedule::SearchModel& model,
                                         const DissipatorSpec& dissipator,
                                         const MasterOptions& opts);

}  // namespace hamsim::master

#pragma once

// Random-band environment: N1 equally spaced levels spanning an energy band
// delta_eps, coupled to the register through independent complex Gaussian
// matrix elements. With identical per-qubit coupling strengths the dephasing
// part of the interaction reduces to sigma_z (x) C with a single effective
// strength lambda_eff = n*lambda/4 and
//   C = -lambda_eff * sum_{n2>n1} [ c(n1,n2)|n1><n2| + h.c. ],
// c i.i.d. with Re, Im ~ N(0, 1/2)  (so <c>=0, <c^2>=0, <|c|^2>=1).
//
// Sampling is reproducible by construction: a named generator (mt19937_64,
// seeded directly) drives a fixed polar Box-Muller recipe, one (radius,
// angle) pair per coupling, in lexicographic (n1, n2) order.

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hamsim/numerics.hpp"

namespace hamsim::bath {

using numerics::Complex;

struct BathParams {
  int n_levels = 0;        // N1
  double band_width = 0;   // delta_eps > 0
  double coupling = 0;     // lambda >= 0 (identical for all qubits)
  int n_qubits = 0;        // n, shared with the search model
  std::uint64_t seed = 0;

  double lambda_eff() const { return n_qubits * coupling / 4.0; }
};

void validate(const BathParams& p);

// One drawn realization; couplings are stored strictly-upper-triangular,
// row-major, 0-based level indices (level k has energy (de/N1)*(k+1)).
struct BathRealization {
  BathParams params;
  std::vector<Complex> couplings;  // size N1*(N1-1)/2

  // c(n1, n2) for 0 <= n1 < n2 < N1.
  Complex coupling_at(int n1, int n2) const;
};

BathRealization sample_bath(const BathParams& p);

// Diagonal of H_E: entry k (0-based) is (delta_eps / N1) * (k + 1).
Eigen::VectorXd bath_hamiltonian_diagonal(const BathParams& p);

// Dense Hermitian N1 x N1 operator C defined above (zero diagonal).
Eigen::MatrixXcd reduced_bath_operator(const BathRealization& r);

// Ensemble-averaged bath correlation function
//   G(s) = N1 * ( n*lambda/(2 de s) * sin(de s / 2) )^2,  G(0) = N1*lambda_eff^2.
double correlation_analytic(double s, const BathParams& p);

// Same quantity for one realization (bath in the maximally mixed state):
//   G(s) = (1/N1) * lambda_eff^2 * sum_{n2>n1} |c|^2 * 2 cos(omega s),
// omega = (de/N1)(n2-n1).
double correlation_empirical(const BathRealization& r, double s);

// Overload taking an explicit bath density matrix; only I/N1 is supported.
double correlation_empirical(const BathRealization& r, double s,
                             const Eigen::MatrixXcd& rho_e);

// Golden-rule dephasing rate Gamma = n^2 lambda^2 pi N1 / (8 delta_eps);
// equals 2 * integral_0^inf G(s) ds.
double gamma_rate(const BathParams& p);

// Weak-coupling validity criteria:
//   c1 = lambda_eff * N1 / de      (needs c1 >= 1/2)
//   c2 = lambda_eff^2 * N1 / de^2  (needs c2 << 1; we flag c2 < 0.1)
struct CriteriaReport {
  double lambda_eff = 0;
  double c1 = 0;
  double c2 = 0;
  double gamma = 0;
  bool c1_ok = false;
  bool c2_ok = false;
};

CriteriaReport criteria(const BathParams& p);

// Parameter persistence (couplings re-derive from the seed, so a realization
// round-trips through its params alone).
std::string params_to_text(const BathParams& p);
BathParams params_from_text(const std::string& text);

}  // namespace hamsim::bath

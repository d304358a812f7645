#include "hamsim/observables.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hamsim::observables {

double success_probability(const ReducedDensity& rho) {
  return rho(0, 0).real();
}

double purity(const ReducedDensity& rho) {
  return (rho * rho).trace().real();
}

double coherence_measure(const ReducedDensity& rho) {
  return std::sqrt(std::max(0.0, 2.0 * purity(rho) - 1.0));
}

void validate_density(const ReducedDensity& rho, double tol_trace, double tol_psd,
                      const char* where) {
  const std::string at(where);
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
    throw std::runtime_error(at + ": density matrix lost Hermiticity");
  if (std::abs(rho.trace().real() - 1.0) > tol_trace ||
      std::abs(rho.trace().imag()) > tol_trace)
    throw std::runtime_error(at + ": density matrix trace drifted beyond tolerance");
  // 2x2 Hermitian eigenvalues in closed form.
  const double a = rho(0, 0).real();
  const double d = rho(1, 1).real();
  const double off = std::abs(rho(0, 1));
  const double mid = 0.5 * (a + d);
  const double rad = std::sqrt(0.25 * (a - d) * (a - d) + off * off);
  if (mid - rad < -tol_psd)
    throw std::runtime_error(at + ": density matrix developed a negative eigenvalue");
}

}  // namespace hamsim::observables

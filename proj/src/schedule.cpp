#include "hamsim/schedule.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hamsim::schedule {

SearchModel make_search_model(int n_qubits, double epsilon) {
  if (n_qubits < 1 || n_qubits > 40)
    throw std::invalid_argument("make_search_model: n_qubits must be in [1, 40]");
  if (!(epsilon > 0.0) || !(epsilon < 1.0))
    throw std::invalid_argument("make_search_model: epsilon must be in (0, 1)");
  SearchModel m;
  m.n_qubits = n_qubits;
  m.n_states = std::ldexp(1.0, n_qubits);  // 2^n exactly
  m.epsilon = epsilon;
  const double root_n = std::sqrt(m.n_states);
  m.t_total = root_n / epsilon * std::atan(root_n);
  return m;
}

double s_of_t(double t, const SearchModel& model) {
  const double slack = 1e-9 * std::max(1.0, model.t_total);
  if (t < -slack || t > model.t_total + slack)
    throw std::out_of_range("s_of_t: t outside [0, t_total]");
  t = std::min(std::max(t, 0.0), model.t_total);
  const double root_n = std::sqrt(model.n_states);
  const double arg = 2.0 * model.epsilon * t / root_n - std::atan(root_n);
  const double s = 0.5 + 0.5 / root_n * std::tan(arg);
  return std::min(std::max(s, 0.0), 1.0);
}

Eigen::Matrix2cd system_hamiltonian(double s, const SearchModel& model) {
  if (s < 0.0 || s > 1.0)
    throw std::out_of_range("system_hamiltonian: s outside [0, 1]");
  const double n = model.n_states;
  const double off = -(1.0 - s) * std::sqrt(n - 1.0) / n;
  Eigen::Matrix2cd h;
  h << (1.0 - s) * (1.0 - 1.0 / n), off,
       off, (1.0 - s) / n + s;
  return h;
}

double gap(double s, const SearchModel& model) {
  if (s < 0.0 || s > 1.0)
    throw std::out_of_range("gap: s outside [0, 1]");
  const double n = model.n_states;
  const double radicand = 1.0 - 4.0 * s * (1.0 - s) * (1.0 - 1.0 / n);
  return std::sqrt(std::max(radicand, 0.0));
}

Eigen::Vector2cd initial_system_state(const SearchModel& model) {
  const double n = model.n_states;
  Eigen::Vector2cd psi;
  psi << 1.0 / std::sqrt(n), std::sqrt((n - 1.0) / n);
  return psi;
}

}  // namespace hamsim::schedule

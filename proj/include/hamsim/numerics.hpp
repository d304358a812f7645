#pragma once

// Shared dense linear-algebra helpers and the classical RK4 stepper used by
// every time-domain solver in this project. States are Eigen complex vectors
// or matrices; the stepper is generic over both.

#include <complex>
#include <stdexcept>
#include <type_traits>

#include <Eigen/Dense>

namespace hamsim::numerics {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr Complex kI{0.0, 1.0};

// Max-abs deviation from Hermiticity, relative to the largest entry.
inline bool is_hermitian(const CMatrix& m, double tol = 1e-14) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

// y = M*x for a Hermitian matrix. Dimension mismatch is the caller's bug and
// is reported, Hermiticity itself is an input contract (checked by callers or
// tests, not per call: the product is O(n^2) and this sits in hot loops).
inline CVector matvec_hermitian(const CMatrix& m, const CVector& x) {
  if (m.rows() != m.cols() || m.cols() != x.size())
    throw std::invalid_argument("matvec_hermitian: dimension mismatch");
  return m * x;
}

// Scratch buffers so repeated RK4 steps do not allocate.
template <class State>
struct Rk4Workspace {
  State k1, k2, k3, k4, stage;
  bool ready = false;

  void match(const State& y) {
    if (ready && k1.rows() == y.rows() && k1.cols() == y.cols()) return;
    k1 = y; k2 = y; k3 = y; k4 = y; stage = y;
    ready = true;
  }
};

// One classical Runge-Kutta 4 step, in place: y(t) -> y(t+dt).
// Deriv has signature void(const State& y, double t, State& dydt).
// A non-finite result aborts immediately: the step size was too large for the
// problem and every later number would be garbage.
template <class State, class Deriv>
void rk4_step(Deriv&& deriv, State& y, double t, double dt, Rk4Workspace<State>& ws) {
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw std::invalid_argument("rk4_step: dt must be positive and finite");
  ws.match(y);
  deriv(y, t, ws.k1);
  ws.stage = y + (0.5 * dt) * ws.k1;
  deriv(ws.stage, t + 0.5 * dt, ws.k2);
  ws.stage = y + (0.5 * dt) * ws.k2;
  deriv(ws.stage, t + 0.5 * dt, ws.k3);
  ws.stage = y + dt * ws.k3;
  deriv(ws.stage, t + dt, ws.k4);
  y += (dt / 6.0) * (ws.k1 + 2.0 * ws.k2 + 2.0 * ws.k3 + ws.k4);
  if (!y.allFinite())
    throw std::runtime_error("rk4_step: non-finite state (integrator blow-up; reduce dt)");
}

// Convenience overload for callers that do not keep a workspace.
template <class State, class Deriv>
State rk4_step(Deriv&& deriv, const State& y, double t, double dt) {
  State out = y;
  Rk4Workspace<State> ws;
  rk4_step(deriv, out, t, dt, ws);
  return out;
}

}  // namespace hamsim::numerics

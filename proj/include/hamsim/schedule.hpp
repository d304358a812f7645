#pragma once

// Two-level reduction of adiabatic Grover search over N = 2^n states.
// The dynamics of the full search Hamiltonian closes on span{|m>, |p>},
// where |m> is the marked state and |p> the uniform superposition of the
// unmarked ones; everything here lives in that ordered {|m>, |p>} basis.
//
// The interpolation uses the local-adiabatic schedule: ds/dt is proportional
// to the square of the instantaneous gap, so the sweep crawls through the
// avoided crossing at s = 1/2 and races through the ends.

#include <Eigen/Dense>

#include "hamsim/numerics.hpp"

namespace hamsim::schedule {

struct SearchModel {
  int n_qubits = 0;      // register size, N = 2^n
  double n_states = 0;   // N as a double (used in closed forms)
  double epsilon = 0;    // local adiabaticity parameter, 0 < eps < 1
  double t_total = 0;    // sweep duration: (sqrt(N)/eps) * atan(sqrt(N))
};

// Validates and derives N and t_total. n_qubits in [1, 40], epsilon in (0, 1).
SearchModel make_search_model(int n_qubits, double epsilon);

// Schedule s(t) = 1/2 + (1/(2 sqrt(N))) tan(2 eps t / sqrt(N) - atan sqrt(N)),
// clamped to [0, 1]; s(0) = 0, s(t_total/2) = 1/2, s(t_total) = 1.
// t outside [0, t_total] (beyond a tiny rounding slack) is an error.
double s_of_t(double t, const SearchModel& model);

// H_S(s) in the {|m>, |p>} basis:
//   [ (1-s)(1-1/N)        -(1-s) sqrt(N-1)/N ]
//   [ -(1-s) sqrt(N-1)/N   (1-s)/N + s       ]
// Real symmetric; returned complex for uniform use in the solvers.
Eigen::Matrix2cd system_hamiltonian(double s, const SearchModel& model);

// Spectral gap sqrt(1 - 4 s (1-s) (1 - 1/N)); minimum 1/sqrt(N) at s = 1/2.
double gap(double s, const SearchModel& model);

// Ground state of H_S(0): (1/sqrt(N), sqrt((N-1)/N)).
Eigen::Vector2cd initial_system_state(const SearchModel& model);

}  // namespace hamsim::schedule

#pragma once

// Reduced two-level observables shared by all solvers, and the trajectory
// record they emit. Basis order is {|m>, |p>}, so success probability is the
// top-left density matrix entry.

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hamsim/numerics.hpp"

namespace hamsim::observables {

using ReducedDensity = Eigen::Matrix2cd;

// P_m = <m|rho|m>.
double success_probability(const ReducedDensity& rho);

// Tr[rho^2].
double purity(const ReducedDensity& rho);

// Bloch-vector length sqrt(max(0, 2 Tr[rho^2] - 1)); 1 for pure states,
// 0 for the maximally mixed state.
double coherence_measure(const ReducedDensity& rho);

// Throws if rho is non-Hermitian, trace-drifted beyond tol_trace, or has an
// eigenvalue below -tol_psd. No silent repair anywhere.
void validate_density(const ReducedDensity& rho, double tol_trace, double tol_psd,
                      const char* where);

struct TrajectoryMeta {
  std::string solver;        // "exact" | "master" | "ham"
  std::uint64_t seed = 0;    // bath seed as requested (0 for seed averages)
  std::string digest;        // physical-scenario digest (stamped by the runner)
  int n_qubits = 0;
  double epsilon = 0;
  int n_levels = 0;
  double band_width = 0;
  double coupling = 0;
  double dt = 0;             // integrator step (tau for the ham solver)
};

struct Trajectory {
  std::vector<double> times;
  std::vector<double> p_success;
  std::vector<double> coherence;
  std::vector<double> purity;
  std::vector<double> drift;  // |norm^2 - 1| (exact) or |Tr rho - 1| (density solvers)
  double min_eigenvalue = 1.0;  // smallest reduced-density eigenvalue seen
  TrajectoryMeta meta;

  std::size_t size() const { return times.size(); }
};

}  // namespace hamsim::observables

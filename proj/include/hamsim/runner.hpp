#pragma once

// Orchestration layer shared by the CLI and the test suites: scenario
// configuration with validation, the physical-scenario digest that makes CSV
// files self-identifying, seed-parallel batch runs with deterministic
// seed-order merging, versioned CSV serialization, seed averaging,
// cross-solver comparison, and the named presets.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hamsim/bath.hpp"
#include "hamsim/observables.hpp"
#include "hamsim/schedule.hpp"

namespace hamsim::runner {

struct RunConfig {
  int n_qubits = 12;
  double epsilon = 0.1;
  int n_levels = 2000;        // N1
  double band_width = 0.5;    // delta_eps
  double coupling = 1e-4;     // lambda
  std::vector<std::uint64_t> seeds = {1};
  std::string solver = "all"; // exact | master | ham | all, or a comma list
  double dt = 0;              // RK4 step override (0 -> solver default)
  double tau = 0;             // ham step (0 -> 2/band_width)
  int quad_points = 32;
  int hs_substeps = 16;
  double sample_dt = 0;       // 0 -> auto (tau when ham runs, else ~t_end/500)
  double t_end = 0;           // 0 -> t_total
  std::string out_dir = "out";
  std::string label = "run";  // output file prefix
};

// Rejects invalid configs naming the violated constraint; no silent repair.
void validate_config(const RunConfig& cfg);

// Expands cfg.solver into an ordered, validated list.
std::vector<std::string> solver_list(const RunConfig& cfg);

// FNV-1a 64-bit hex digest over the physical scenario only (n_qubits,
// epsilon, n_levels, band_width, coupling), so trajectories from different
// solvers of the same physics share a digest and comparisons can refuse
// mismatched scenarios.
std::string scenario_digest(const RunConfig& cfg);

schedule::SearchModel model_of(const RunConfig& cfg);
bath::BathParams bath_params(const RunConfig& cfg, std::uint64_t seed);

// Sample grid actually used: explicit sample_dt if set; otherwise the ham
// step when the ham solver participates (so all solvers land on the ham
// grid and comparisons line up); otherwise 0 (solver default, ~t_end/500).
double effective_sample_dt(const RunConfig& cfg);

// One (solver, seed) trajectory with the digest and bath metadata stamped.
observables::Trajectory run_single(const RunConfig& cfg, const std::string& solver,
                                   std::uint64_t seed);

struct SolverResult {
  std::string solver;
  std::vector<observables::Trajectory> per_seed;  // cfg.seeds order
  observables::Trajectory averaged;
};

struct BatchResult {
  std::vector<SolverResult> results;  // solver_list order
};

// Runs every (solver, seed) pair on a bounded worker pool (HAMSIM_WORKERS
// caps it; default: hardware concurrency, at most 8) and merges results in
// deterministic (solver, seed) order regardless of completion order.
BatchResult run_batch(const RunConfig& cfg);

// Pointwise mean over same-grid, same-solver, same-digest trajectories;
// averaged meta carries seed = 0.
observables::Trajectory average_trajectories(
    const std::vector<observables::Trajectory>& ts);

// CSV schema (versioned):
//   # ham-adiabatic v1, digest=<hex>
//   # solver=... seed=... n_qubits=... epsilon=... n_levels=... band_width=... coupling=... dt=...
//   t,p_success,coherence,purity,drift
// Values are written with round-trippable precision, so identical configs
// produce byte-identical files.
void write_csv(const std::string& path, const observables::Trajectory& t);
observables::Trajectory read_csv(const std::string& path);

// Deterministic file names: <label>_<solver>_s<seed>_<digest>.csv and
// <label>_<solver>_avg_<digest>.csv under cfg.out_dir.
std::string csv_name(const RunConfig& cfg, const std::string& solver,
                     std::uint64_t seed);
std::string avg_csv_name(const RunConfig& cfg, const std::string& solver);

// Writes all per-seed and averaged CSVs; returns the paths written.
std::vector<std::string> write_batch(const RunConfig& cfg, const BatchResult& res);

// Emits <label>.gp under out_dir plotting the given (csv file, title) curves
// (success probability, then coherence after a pause); returns the path.
std::string write_gnuplot_script(const std::string& out_dir, const std::string& label,
                                 const std::vector<std::pair<std::string, std::string>>& curves);

struct CompareReport {
  double max_dp = 0;   // max_t |delta P_m|
  double avg_dp = 0;   // time-averaged |delta P_m| (trapezoid)
  double max_dc = 0;   // same for the coherence series
  double avg_dc = 0;
  std::size_t samples = 0;
};

// Refuses trajectories with different digests (different physics) or
// different time grids; otherwise reports pointwise deltas.
CompareReport compare_trajectories(const observables::Trajectory& a,
                                   const observables::Trajectory& b);
std::string report_text(const CompareReport& r);

// Human-readable validity-criteria report (c1, c2, lambda_eff, Gamma,
// t_total with pass/fail flags).
std::string criteria_text(const RunConfig& cfg);

// Named presets; a preset is a list of fully specified jobs.
std::vector<RunConfig> preset_jobs(const std::string& name);
std::vector<std::string> preset_names();
std::string preset_summary();  // one descriptive line per preset + runtime hint

}  // namespace hamsim::runner

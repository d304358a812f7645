// hamsim: adiabatic-search decoherence runs from the command line.
// Subcommands: criteria (validity report), run (trajectory CSVs + gnuplot
// script), compare (cross-solver delta report), preset list.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "hamsim/runner.hpp"

namespace {

using hamsim::runner::RunConfig;

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

void add_config_flags(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--n-qubits", cfg.n_qubits, "register size n, search space N = 2^n")
      ->capture_default_str();
  cmd->add_option("--epsilon", cfg.epsilon, "adiabatic sweep parameter, in (0, 1)")
      ->capture_default_str();
  cmd->add_option("--n-levels", cfg.n_levels, "bath levels N1")->capture_default_str();
  cmd->add_option("--band-width", cfg.band_width, "bath energy band width")
      ->capture_default_str();
  cmd->add_option("--lambda", cfg.coupling, "per-qubit bath coupling strength")
      ->capture_default_str();
  cmd->add_option("--seed-list", cfg.seeds, "bath seeds, comma separated")
      ->delimiter(',')
      ->capture_default_str();
  cmd->add_option("--solver", cfg.solver, "exact | master | ham | all, or a comma list")
      ->capture_default_str();
  cmd->add_option("--dt", cfg.dt, "RK4 step override (0 = solver default)")
      ->capture_default_str();
  cmd->add_option("--tau", cfg.tau, "ham step (0 = 2/band_width)")->capture_default_str();
  cmd->add_option("--quad-points", cfg.quad_points,
                  "Simpson subintervals per integral dimension (even, >= 2)")
      ->capture_default_str();
  cmd->add_option("--hs-substeps", cfg.hs_substeps,
                  "system-rotation substeps per ham half step")
      ->capture_default_str();
  cmd->add_option("--sample-dt", cfg.sample_dt, "sample spacing (0 = auto)")
      ->capture_default_str();
  cmd->add_option("--t-end", cfg.t_end, "stop time (0 = full sweep)")->capture_default_str();
  cmd->add_option("--out-dir", cfg.out_dir, "output directory")->capture_default_str();
  cmd->add_option("--label", cfg.label, "output file prefix")->capture_default_str();
  cmd->set_config("--config", "", "INI config file; keys are the long option names");
}

// Carries preset jobs the explicitly passed flags (presets fix the physics,
// flags still win so e.g. --seed-list can widen an averaging study).
void apply_overrides(const CLI::App* cmd, const RunConfig& flags, RunConfig& job) {
  if (cmd->count("--n-qubits")) job.n_qubits = flags.n_qubits;
  if (cmd->count("--epsilon")) job.epsilon = flags.epsilon;
  if (cmd->count("--n-levels")) job.n_levels = flags.n_levels;
  if (cmd->count("--band-width")) job.band_width = flags.band_width;
  if (cmd->count("--lambda")) job.coupling = flags.coupling;
  if (cmd->count("--seed-list")) job.seeds = flags.seeds;
  if (cmd->count("--solver")) job.solver = flags.solver;
  if (cmd->count("--dt")) job.dt = flags.dt;
  if (cmd->count("--tau")) job.tau = flags.tau;
  if (cmd->count("--quad-points")) job.quad_points = flags.quad_points;
  if (cmd->count("--hs-substeps")) job.hs_substeps = flags.hs_substeps;
  if (cmd->count("--sample-dt")) job.sample_dt = flags.sample_dt;
  if (cmd->count("--t-end")) job.t_end = flags.t_end;
  if (cmd->count("--out-dir")) job.out_dir = flags.out_dir;
  if (cmd->count("--label")) job.label = flags.label;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adiabatic quantum search with a random-band dephasing bath"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string preset;
  double tol = -1.0;
  std::vector<std::string> compare_files;

  CLI::App* criteria = app.add_subcommand(
      "criteria", "print the weak-coupling validity report for a scenario");
  add_config_flags(criteria, cfg);

  CLI::App* run = app.add_subcommand(
      "run", "propagate the selected solvers and write trajectory CSVs");
  add_config_flags(run, cfg);
  run->add_option("--preset", preset, "run a named preset (see: preset list)");

  CLI::App* compare = app.add_subcommand(
      "compare", "pointwise delta report between two trajectory CSVs");
  compare->add_option("files", compare_files, "two CSV files")->expected(2)->required();
  compare->add_option("--tol", tol,
                      "fail (exit 1) if the time-averaged |delta P_m| exceeds this");

  CLI::App* preset_cmd = app.add_subcommand("preset", "preset utilities");
  preset_cmd->require_subcommand(1);
  preset_cmd->add_subcommand("list", "describe the shipped presets");

  CLI11_PARSE(app, argc, argv);

  try {
    if (criteria->parsed()) {
      std::cout << hamsim::runner::criteria_text(cfg);
      return 0;
    }
    if (run->parsed()) {
      std::vector<RunConfig> jobs;
      if (!preset.empty()) {
        jobs = hamsim::runner::preset_jobs(preset);
        for (auto& job : jobs) apply_overrides(run, cfg, job);
      } else {
        jobs = {cfg};
      }
      std::vector<std::pair<std::string, std::string>> curves;
      for (const auto& job : jobs) {
        const auto res = hamsim::runner::run_batch(job);
        for (const auto& path : hamsim::runner::write_batch(job, res))
          std::cout << "wrote " << path << "\n";
        for (const auto& sr : res.results)
          curves.emplace_back(hamsim::runner::avg_csv_name(job, sr.solver),
                              sr.solver + " lambda=" + fmt_g(job.coupling));
      }
      std::cout << "wrote "
                << hamsim::runner::write_gnuplot_script(jobs.front().out_dir,
                                                        jobs.front().label, curves)
                << "\n";
      return 0;
    }
    if (compare->parsed()) {
      const auto a = hamsim::runner::read_csv(compare_files[0]);
      const auto b = hamsim::runner::read_csv(compare_files[1]);
      const auto rep = hamsim::runner::compare_trajectories(a, b);
      std::cout << hamsim::runner::report_text(rep);
      if (tol >= 0.0 && rep.avg_dp > tol) {
        std::cout << "tolerance " << fmt_g(tol) << " exceeded\n";
        return 1;
      }
      return 0;
    }
    if (preset_cmd->parsed()) {
      std::cout << hamsim::runner::preset_summary();
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "hamsim: error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

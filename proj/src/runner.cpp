#include "hamsim/runner.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "hamsim/exact.hpp"
#include "hamsim/ham.hpp"
#include "hamsim/master.hpp"

namespace hamsim::runner {

namespace fs = std::filesystem;

namespace {

// Shortest round-trippable decimal form; keeps CSVs readable and reruns
// byte-identical.
std::string fmt(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s, const std::string& what) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || s.empty())
    throw std::runtime_error("read_csv: bad number for " + what + ": '" + s + "'");
  return v;
}

long long parse_int(const std::string& s, const std::string& what) {
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size() || s.empty())
    throw std::runtime_error("read_csv: bad integer for " + what + ": '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string::npos ? pos : pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

int worker_count() {
  if (const char* env = std::getenv("HAMSIM_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1 || v > 256)
      throw std::invalid_argument("HAMSIM_WORKERS must be an integer in [1, 256]");
    return static_cast<int>(v);
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return std::clamp(hc == 0 ? 1 : static_cast<int>(hc), 1, 8);
}

constexpr const char* kCsvVersion = "# ham-adiabatic v1, digest=";
constexpr const char* kCsvColumns = "t,p_success,coherence,purity,drift";

}  // namespace

void validate_config(const RunConfig& cfg) {
  if (cfg.n_qubits < 1 || cfg.n_qubits > 40)
    throw std::invalid_argument("config: n_qubits must be in [1, 40]");
  if (!(cfg.epsilon > 0.0) || !(cfg.epsilon < 1.0))
    throw std::invalid_argument("config: epsilon must be in (0, 1)");
  if (cfg.n_levels < 2)
    throw std::invalid_argument("config: n_levels must be >= 2");
  if (!(cfg.band_width > 0.0))
    throw std::invalid_argument("config: band_width must be > 0");
  if (cfg.coupling < 0.0)
    throw std::invalid_argument("config: coupling must be >= 0");
  if (cfg.seeds.empty())
    throw std::invalid_argument("config: seeds must be non-empty");
  for (std::size_t i = 0; i < cfg.seeds.size(); ++i)
    for (std::size_t j = i + 1; j < cfg.seeds.size(); ++j)
      if (cfg.seeds[i] == cfg.seeds[j])
        throw std::invalid_argument("config: seeds contain a duplicate entry");
  solver_list(cfg);  // validates the solver string
  if (cfg.dt < 0.0) throw std::invalid_argument("config: dt must be >= 0");
  if (cfg.tau < 0.0) throw std::invalid_argument("config: tau must be >= 0");
  if (cfg.quad_points < 2 || cfg.quad_points % 2 != 0)
    throw std::invalid_argument("config: quad_points must be even and >= 2");
  if (cfg.hs_substeps < 1)
    throw std::invalid_argument("config: hs_substeps must be >= 1");
  if (cfg.sample_dt < 0.0)
    throw std::invalid_argument("config: sample_dt must be >= 0");
  if (cfg.t_end < 0.0)
    throw std::invalid_argument("config: t_end must be >= 0");
  if (cfg.t_end > 0.0) {
    const auto model = model_of(cfg);
    if (cfg.t_end > model.t_total * (1.0 + 1e-12))
      throw std::invalid_argument("config: t_end must not exceed t_total");
  }
  if (cfg.label.empty())
    throw std::invalid_argument("config: label must be non-empty");
  for (char c : cfg.label)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.'))
      throw std::invalid_argument("config: label may only contain [A-Za-z0-9_.-]");
  if (cfg.out_dir.empty())
    throw std::invalid_argument("config: out_dir must be non-empty");
}

std::vector<std::string> solver_list(const RunConfig& cfg) {
  std::vector<std::string> parts = split(cfg.solver, ',');
  if (parts.size() == 1 && parts[0] == "all") return {"exact", "master", "ham"};
  std::vector<std::string> out;
  for (const auto& p : parts) {
    if (p != "exact" && p != "master" && p != "ham")
      throw std::invalid_argument(
          "config: solver must be exact, master, ham, all, or a comma list; got '" + p + "'");
    if (std::find(out.begin(), out.end(), p) != out.end())
      throw std::invalid_argument("config: solver list contains a duplicate: '" + p + "'");
    out.push_back(p);
  }
  return out;
}

std::string scenario_digest(const RunConfig& cfg) {
  const std::string canon = "n=" + std::to_string(cfg.n_qubits) +
                            ";eps=" + fmt(cfg.epsilon) +
                            ";n1=" + std::to_string(cfg.n_levels) +
                            ";deps=" + fmt(cfg.band_width) +
                            ";lambda=" + fmt(cfg.coupling);
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a 64
  for (const char c : canon) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return out;
}

schedule::SearchModel model_of(const RunConfig& cfg) {
  return schedule::make_search_model(cfg.n_qubits, cfg.epsilon);
}

bath::BathParams bath_params(const RunConfig& cfg, std::uint64_t seed) {
  bath::BathParams p;
  p.n_levels = cfg.n_levels;
  p.band_width = cfg.band_width;
  p.coupling = cfg.coupling;
  p.n_qubits = cfg.n_qubits;
  p.seed = seed;
  return p;
}

double effective_sample_dt(const RunConfig& cfg) {
  if (cfg.sample_dt > 0.0) return cfg.sample_dt;
  const auto solvers = solver_list(cfg);
  if (std::find(solvers.begin(), solvers.end(), "ham") != solvers.end())
    return cfg.tau > 0.0 ? cfg.tau : 2.0 / cfg.band_width;
  return 0.0;
}

observables::Trajectory run_single(const RunConfig& cfg, const std::string& solver,
                                   std::uint64_t seed) {
  validate_config(cfg);
  const auto model = model_of(cfg);
  const auto params = bath_params(cfg, seed);
  observables::Trajectory traj;
  if (solver == "exact") {
    const auto br = bath::sample_bath(params);
    exact::ExactOptions o;
    o.dt = cfg.dt;
    o.sample_dt = effective_sample_dt(cfg);
    o.t_end = cfg.t_end;
    traj = exact::propagate_exact(model, br, o);
  } else if (solver == "master") {
    master::MasterOptions o;
    if (cfg.dt > 0.0) o.dt = cfg.dt;
    o.sample_dt = effective_sample_dt(cfg);
    o.t_end = cfg.t_end;
    traj = master::propagate_master(model, master::dephasing_spec(params), o);
    traj.meta.n_levels = params.n_levels;
    traj.meta.band_width = params.band_width;
    traj.meta.coupling = params.coupling;
  } else if (solver == "ham") {
    const auto br = bath::sample_bath(params);
    ham::HamOptions o;
    o.tau = cfg.tau;
    o.quad_points = cfg.quad_points;
    o.hs_substeps = cfg.hs_substeps;
    o.t_end = cfg.t_end;
    traj = ham::ham_propagate(model, br, o);
  } else {
    throw std::invalid_argument("run_single: unknown solver '" + solver + "'");
  }
  // Record the requested seed even for seed-independent solvers, so per-seed
  // file names and CSV headers stay distinct and traceable.
  traj.meta.seed = seed;
  traj.meta.digest = scenario_digest(cfg);
  return traj;
}

observables::Trajectory average_trajectories(
    const std::vector<observables::Trajectory>& ts) {
  if (ts.empty())
    throw std::invalid_argument("average_trajectories: empty input");
  const auto& first = ts.front();
  for (const auto& t : ts) {
    if (t.meta.solver != first.meta.solver)
      throw std::invalid_argument("average_trajectories: mixed solvers");
    if (t.meta.digest != first.meta.digest)
      throw std::invalid_argument("average_trajectories: mixed scenario digests");
    if (t.times != first.times)
      throw std::invalid_argument("average_trajectories: time grids differ");
  }
  observables::Trajectory avg = first;
  avg.meta.seed = 0;
  const double k = static_cast<double>(ts.size());
  for (std::size_t i = 0; i < avg.size(); ++i) {
    double p = 0, c = 0, u = 0, d = 0;
    for (const auto& t : ts) {
      p += t.p_success[i];
      c += t.coherence[i];
      u += t.purity[i];
      d += t.drift[i];
    }
    avg.p_success[i] = p / k;
    avg.coherence[i] = c / k;
    avg.purity[i] = u / k;
    avg.drift[i] = d / k;
  }
  avg.min_eigenvalue = 1.0;
  for (const auto& t : ts) avg.min_eigenvalue = std::min(avg.min_eigenvalue, t.min_eigenvalue);
  return avg;
}

BatchResult run_batch(const RunConfig& cfg) {
  validate_config(cfg);
  const auto solvers = solver_list(cfg);
  struct Job {
    std::size_t si, ki;
  };
  std::vector<Job> jobs;
  for (std::size_t si = 0; si < solvers.size(); ++si)
    for (std::size_t ki = 0; ki < cfg.seeds.size(); ++ki) jobs.push_back({si, ki});

  std::vector<observables::Trajectory> done(jobs.size());
  const std::size_t workers = static_cast<std::size_t>(worker_count());
  for (std::size_t base = 0; base < jobs.size(); base += workers) {
    const std::size_t count = std::min(workers, jobs.size() - base);
    std::vector<std::future<observables::Trajectory>> futures;
    futures.reserve(count);
    for (std::size_t j = 0; j < count; ++j) {
      const Job job = jobs[base + j];
      futures.push_back(std::async(std::launch::async, [&cfg, &solvers, job] {
        return run_single(cfg, solvers[job.si], cfg.seeds[job.ki]);
      }));
    }
    for (std::size_t j = 0; j < count; ++j) done[base + j] = futures[j].get();
  }

  BatchResult res;
  for (std::size_t si = 0; si < solvers.size(); ++si) {
    SolverResult sr;
    sr.solver = solvers[si];
    for (std::size_t ki = 0; ki < cfg.seeds.size(); ++ki)
      sr.per_seed.push_back(std::move(done[si * cfg.seeds.size() + ki]));
    sr.averaged = average_trajectories(sr.per_seed);
    res.results.push_back(std::move(sr));
  }
  return res;
}

void write_csv(const std::string& path, const observables::Trajectory& t) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("write_csv: cannot open '" + path + "' for writing");
  f << kCsvVersion << t.meta.digest << "\n";
  f << "# solver=" << t.meta.solver << " seed=" << t.meta.seed
    << " n_qubits=" << t.meta.n_qubits << " epsilon=" << fmt(t.meta.epsilon)
    << " n_levels=" << t.meta.n_levels << " band_width=" << fmt(t.meta.band_width)
    << " coupling=" << fmt(t.meta.coupling) << " dt=" << fmt(t.meta.dt) << "\n";
  f << kCsvColumns << "\n";
  for (std::size_t i = 0; i < t.size(); ++i)
    f << fmt(t.times[i]) << ',' << fmt(t.p_success[i]) << ',' << fmt(t.coherence[i])
      << ',' << fmt(t.purity[i]) << ',' << fmt(t.drift[i]) << "\n";
  if (!f) throw std::runtime_error("write_csv: write failed for '" + path + "'");
}

observables::Trajectory read_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("read_csv: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(f, line) || line.rfind(kCsvVersion, 0) != 0)
    throw std::runtime_error("read_csv: '" + path + "' is not a ham-adiabatic v1 CSV");
  observables::Trajectory t;
  t.meta.digest = line.substr(std::string(kCsvVersion).size());
  if (!std::getline(f, line) || line.rfind("# ", 0) != 0)
    throw std::runtime_error("read_csv: '" + path + "' is missing the parameter line");
  for (const auto& tok : split(line.substr(2), ' ')) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("read_csv: bad parameter token '" + tok + "'");
    const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
    if (key == "solver") t.meta.solver = val;
    else if (key == "seed") t.meta.seed = static_cast<std::uint64_t>(parse_int(val, key));
    else if (key == "n_qubits") t.meta.n_qubits = static_cast<int>(parse_int(val, key));
    else if (key == "epsilon") t.meta.epsilon = parse_double(val, key);
    else if (key == "n_levels") t.meta.n_levels = static_cast<int>(parse_int(val, key));
    else if (key == "band_width") t.meta.band_width = parse_double(val, key);
    else if (key == "coupling") t.meta.coupling = parse_double(val, key);
    else if (key == "dt") t.meta.dt = parse_double(val, key);
    else throw std::runtime_error("read_csv: unexpected parameter '" + key + "'");
  }
  if (!std::getline(f, line) || line != kCsvColumns)
    throw std::runtime_error("read_csv: '" + path + "' has an unexpected column header");
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 5)
      throw std::runtime_error("read_csv: '" + path + "' row with " +
                               std::to_string(cells.size()) + " columns (want 5)");
    t.times.push_back(parse_double(cells[0], "t"));
    t.p_success.push_back(parse_double(cells[1], "p_success"));
    t.coherence.push_back(parse_double(cells[2], "coherence"));
    t.purity.push_back(parse_double(cells[3], "purity"));
    t.drift.push_back(parse_double(cells[4], "drift"));
  }
  if (t.times.empty())
    throw std::runtime_error("read_csv: '" + path + "' contains no samples");
  return t;
}

std::string csv_name(const RunConfig& cfg, const std::string& solver,
                     std::uint64_t seed) {
  return cfg.label + "_" + solver + "_s" + std::to_string(seed) + "_" +
         scenario_digest(cfg) + ".csv";
}

std::string avg_csv_name(const RunConfig& cfg, const std::string& solver) {
  return cfg.label + "_" + solver + "_avg_" + scenario_digest(cfg) + ".csv";
}

std::vector<std::string> write_batch(const RunConfig& cfg, const BatchResult& res) {
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec)
    throw std::runtime_error("write_batch: cannot create output dir '" + cfg.out_dir +
                             "': " + ec.message());
  std::vector<std::string> paths;
  for (const auto& sr : res.results) {
    for (std::size_t ki = 0; ki < sr.per_seed.size(); ++ki) {
      const auto p = fs::path(cfg.out_dir) / csv_name(cfg, sr.solver, sr.per_seed[ki].meta.seed);
      write_csv(p.string(), sr.per_seed[ki]);
      paths.push_back(p.string());
    }
    const auto p = fs::path(cfg.out_dir) / avg_csv_name(cfg, sr.solver);
    write_csv(p.string(), sr.averaged);
    paths.push_back(p.string());
  }
  return paths;
}

std::string write_gnuplot_script(const std::string& out_dir, const std::string& label,
                                 const std::vector<std::pair<std::string, std::string>>& curves) {
  if (curves.empty())
    throw std::invalid_argument("write_gnuplot_script: no curves");
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec)
    throw std::runtime_error("write_gnuplot_script: cannot create '" + out_dir +
                             "': " + ec.message());
  const auto path = (fs::path(out_dir) / (label + ".gp")).string();
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("write_gnuplot_script: cannot open '" + path + "'");
  f << "# run from inside the output directory: gnuplot " << label << ".gp\n";
  f << "set datafile separator ','\n";
  f << "set grid\nset xlabel 'time'\nset key left top\n";
  f << "set ylabel 'success probability'\n";
  f << "plot \\\n";
  for (std::size_t i = 0; i < curves.size(); ++i)
    f << "  '" << curves[i].first << "' using 1:2 with lines title '" << curves[i].second
      << (i + 1 < curves.size() ? "', \\\n" : "'\n");
  f << "pause -1 'press enter for the coherence curves'\n";
  f << "set ylabel 'coherence magnitude'\nset key right top\n";
  f << "plot \\\n";
  for (std::size_t i = 0; i < curves.size(); ++i)
    f << "  '" << curves[i].first << "' using 1:3 with lines title '" << curves[i].second
      << (i + 1 < curves.size() ? "', \\\n" : "'\n");
  f << "pause -1 'press enter to close'\n";
  if (!f) throw std::runtime_error("write_gnuplot_script: write failed for '" + path + "'");
  return path;
}

CompareReport compare_trajectories(const observables::Trajectory& a,
                                   const observables::Trajectory& b) {
  if (!a.meta.digest.empty() && !b.meta.digest.empty() && a.meta.digest != b.meta.digest)
    throw std::runtime_error("compare: scenario digests differ (" + a.meta.digest +
                             " vs " + b.meta.digest + "); refusing to compare different physics");
  if (a.size() != b.size())
    throw std::runtime_error("compare: time grids differ (" + std::to_string(a.size()) +
                             " vs " + std::to_string(b.size()) + " samples)");
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.times[i] != b.times[i])
      throw std::runtime_error("compare: time grids differ at sample " + std::to_string(i));

  CompareReport r;
  r.samples = a.size();
  std::vector<double> dp(a.size()), dc(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    dp[i] = std::abs(a.p_success[i] - b.p_success[i]);
    dc[i] = std::abs(a.coherence[i] - b.coherence[i]);
    r.max_dp = std::max(r.max_dp, dp[i]);
    r.max_dc = std::max(r.max_dc, dc[i]);
  }
  const double span = a.times.back() - a.times.front();
  if (a.size() < 2 || !(span > 0.0)) {
    double sp = 0, sc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      sp += dp[i];
      sc += dc[i];
    }
    r.avg_dp = sp / a.size();
    r.avg_dc = sc / a.size();
  } else {
    double ip = 0, ic = 0;  // trapezoid in t
    for (std::size_t i = 0; i + 1 < a.size(); ++i) {
      const double w = 0.5 * (a.times[i + 1] - a.times[i]);
      ip += w * (dp[i] + dp[i + 1]);
      ic += w * (dc[i] + dc[i + 1]);
    }
    r.avg_dp = ip / span;
    r.avg_dc = ic / span;
  }
  return r;
}

std::string report_text(const CompareReport& r) {
  std::ostringstream os;
  os << "samples            = " << r.samples << "\n";
  os << "max |delta P_m|    = " << fmt(r.max_dp) << "\n";
  os << "avg |delta P_m|    = " << fmt(r.avg_dp) << "\n";
  os << "max |delta coher.| = " << fmt(r.max_dc) << "\n";
  os << "avg |delta coher.| = " << fmt(r.avg_dc) << "\n";
  return os.str();
}

std::string criteria_text(const RunConfig& cfg) {
  validate_config(cfg);
  const auto model = model_of(cfg);
  const auto rep = bath::criteria(bath_params(cfg, 0));
  std::ostringstream os;
  os.precision(6);
  os << "scenario: n_qubits=" << cfg.n_qubits << " epsilon=" << cfg.epsilon
     << " n_levels=" << cfg.n_levels << " band_width=" << cfg.band_width
     << " coupling=" << cfg.coupling << "\n";
  os << "lambda_eff = " << rep.lambda_eff << "\n";
  os << "c1         = " << rep.c1 << (rep.c1_ok ? "   [ok: >= 0.5]" : "   [VIOLATED: needs >= 0.5]")
     << "\n";
  os << "c2         = " << rep.c2 << (rep.c2_ok ? "   [ok: < 0.1]" : "   [VIOLATED: needs < 0.1]")
     << "\n";
  os << "gamma      = " << rep.gamma << "\n";
  os << "t_total    = " << model.t_total << "\n";
  return os.str();
}

std::vector<RunConfig> preset_jobs(const std::string& name) {
  if (name == "figure1") {
    RunConfig base;
    base.label = "figure1";
    base.n_qubits = 12;
    base.epsilon = 0.1;
    base.n_levels = 2000;
    base.band_width = 0.5;
    base.solver = "exact,master";
    base.seeds = {1};
    base.dt = 0.01;  // the ~1000-long sweep overruns the norm-drift budget at 0.02
    RunConfig free = base, weak = base, strong = base;
    free.coupling = 0.0;
    weak.coupling = 1e-4;
    strong.coupling = 5e-4;
    return {free, weak, strong};
  }
  if (name == "desk") {
    RunConfig cfg;
    cfg.label = "desk";
    cfg.n_qubits = 8;
    cfg.epsilon = 0.1;
    cfg.n_levels = 200;
    cfg.band_width = 0.5;
    cfg.coupling = 6.25e-4;  // lambda_eff = 1.25e-3 -> c1 = 0.5, c2 = 1.25e-3
    cfg.solver = "exact,master";
    cfg.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    return {cfg};
  }
  if (name == "toy") {
    RunConfig cfg;
    cfg.label = "toy";
    cfg.n_qubits = 4;
    cfg.epsilon = 0.1;
    cfg.n_levels = 32;
    cfg.band_width = 0.5;
    cfg.coupling = 2.5e-3;
    cfg.solver = "all";
    cfg.seeds = {1, 2, 3, 4};
    return {cfg};
  }
  throw std::invalid_argument("unknown preset '" + name + "' (known: figure1, desk, toy)");
}

std::vector<std::string> preset_names() { return {"figure1", "desk", "toy"}; }

std::string preset_summary() {
  return
      "figure1  n=12 N1=2000 band=0.5 eps=0.1, lambda in {0, 1e-4, 5e-4}, 1 seed,\n"
      "         exact+master. Master legs run in seconds and the decoupled exact\n"
      "         leg in about a minute; each coupled exact leg is an hour-scale run.\n"
      "desk     n=8 N1=200 band=0.5 lambda=6.25e-4 (c1=0.5, c2=1.25e-3), 10 seeds,\n"
      "         exact+master. A few minutes on a desktop.\n"
      "toy      n=4 N1=32 band=0.5 lambda=2.5e-3, 4 seeds, exact+master+ham on a\n"
      "         shared step-aligned grid. Seconds; used by CI.\n";
}

}  // namespace hamsim::runner

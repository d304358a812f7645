#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>

#include "hamsim/exact.hpp"
#include "hamsim/master.hpp"

using hamsim::bath::BathParams;
using hamsim::bath::BathRealization;
using hamsim::exact::ExactOptions;
using hamsim::exact::FullState;
using hamsim::numerics::CVector;
using hamsim::numerics::Complex;
using hamsim::observables::Trajectory;
using hamsim::schedule::SearchModel;

namespace {

BathParams make_params(int n_qubits, int n_levels, double lambda, std::uint64_t seed) {
  BathParams p;
  p.n_levels = n_levels;
  p.band_width = 0.5;
  p.coupling = lambda;
  p.n_qubits = n_qubits;
  p.seed = seed;
  return p;
}

CVector random_state(int dim, std::mt19937_64& gen) {
  std::normal_distribution<double> nd;
  CVector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = Complex(nd(gen), nd(gen));
  return v / v.norm();
}

}  // namespace

TEST_CASE("initial state: system ground state times a uniform bath") {
  const SearchModel m = hamsim::schedule::make_search_model(2, 0.5);  // N = 4
  const BathParams p = make_params(2, 2, 1e-3, 1);
  const FullState st = hamsim::exact::initial_full_state(m, p);
  REQUIRE(st.amps.size() == 4);
  CHECK(st.n_levels == 2);
  CHECK(st.time == 0.0);
  const double b = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(st.amps[0] - Complex(0.5 * b, 0)) < 1e-15);
  CHECK(std::abs(st.amps[1] - Complex(0.5 * b, 0)) < 1e-15);
  CHECK(std::abs(st.amps[2] - Complex(std::sqrt(3.0) / 2.0 * b, 0)) < 1e-15);
  CHECK(std::abs(st.amps[3] - Complex(std::sqrt(3.0) / 2.0 * b, 0)) < 1e-15);
  CHECK(std::abs(st.amps.squaredNorm() - 1.0) < 1e-14);
}

TEST_CASE("reduced density of a product state is the system projector") {
  const SearchModel m = hamsim::schedule::make_search_model(4, 0.1);
  const BathParams p = make_params(4, 16, 1e-3, 1);
  const FullState st = hamsim::exact::initial_full_state(m, p);
  const Eigen::Vector2cd sys = hamsim::schedule::initial_system_state(m);
  const Eigen::Matrix2cd outer = sys * sys.adjoint();
  CHECK((hamsim::exact::reduced_density(st) - outer).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("reduced density: naive partial-trace oracle and a Schmidt pair") {
  std::mt19937_64 gen(41);
  FullState st;
  st.n_levels = 8;
  st.amps = random_state(16, gen);
  const Eigen::Matrix2cd rho = hamsim::exact::reduced_density(st);
  Eigen::Matrix2cd oracle = Eigen::Matrix2cd::Zero();
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int n = 0; n < 8; ++n)
        oracle(a, b) += st.amps[a * 8 + n] * std::conj(st.amps[b * 8 + n]);
  CHECK((rho - oracle).cwiseAbs().maxCoeff() < 1e-13);
  CHECK(std::abs(rho.trace().real() - 1.0) < 1e-14);
  CHECK((rho - rho.adjoint()).cwiseAbs().maxCoeff() < 1e-15);

  // maximally entangled Schmidt pair -> I/2, coherence exactly zero
  FullState bell;
  bell.n_levels = 8;
  bell.amps = CVector::Zero(16);
  bell.amps[0] = std::sqrt(0.5);
  bell.amps[8 + 1] = std::sqrt(0.5);
  const Eigen::Matrix2cd half = hamsim::exact::reduced_density(bell);
  CHECK(std::abs(half(0, 0).real() - 0.5) < 1e-15);
  CHECK(std::abs(half(1, 1).real() - 0.5) < 1e-15);
  CHECK(std::abs(half(0, 1)) == 0.0);
}

TEST_CASE("apply_hamiltonian: decoupled structure against per-element arithmetic") {
  const SearchModel m = hamsim::schedule::make_search_model(4, 0.1);
  const BathParams p = make_params(4, 8, 0.0, 1);
  const Eigen::MatrixXcd czero = Eigen::MatrixXcd::Zero(8, 8);
  const Eigen::VectorXd he = hamsim::bath::bath_hamiltonian_diagonal(p);
  std::mt19937_64 gen(42);
  const CVector psi = random_state(16, gen);

  const double t = m.t_total;  // s -> 1: H_S ~ diag(0, 1)
  const CVector out = hamsim::exact::apply_hamiltonian(psi, t, m, p, czero);
  const double s = hamsim::schedule::s_of_t(t, m);
  const double n = m.n_states;
  const double h00 = (1.0 - s) * (1.0 - 1.0 / n);
  const double h01 = -(1.0 - s) * std::sqrt(n - 1.0) / n;
  const double h11 = (1.0 - s) / n + s;
  for (int k = 0; k < 8; ++k) {
    const Complex em = h00 * psi[k] + h01 * psi[8 + k] + he[k] * psi[k];
    const Complex ep = h01 * psi[k] + h11 * psi[8 + k] + he[k] * psi[8 + k];
    CHECK(std::abs(out[k] - em) < 1e-14);
    CHECK(std::abs(out[8 + k] - ep) < 1e-14);
  }
}

TEST_CASE("apply_hamiltonian: matches the materialized 2*N1 block matrix") {
  const SearchModel m = hamsim::schedule::make_search_model(4, 0.1);
  const BathParams p = make_params(4, 8, 1e-3, 11);
  const BathRealization br = hamsim::bath::sample_bath(p);
  const Eigen::MatrixXcd c = hamsim::bath::reduced_bath_operator(br);
  const Eigen::VectorXd he = hamsim::bath::bath_hamiltonian_diagonal(p);

  const double t = 0.37 * m.t_total;
  const double s = hamsim::schedule::s_of_t(t, m);
  const Eigen::Matrix2cd hs = hamsim::schedule::system_hamiltonian(s, m);
  Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(16, 16);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      full.block(a * 8, b * 8, 8, 8) = hs(a, b) * Eigen::MatrixXcd::Identity(8, 8);
  for (int k = 0; k < 8; ++k) {
    full(k, k) += he[k];
    full(8 + k, 8 + k) += he[k];
  }
  full.block(0, 0, 8, 8) += c;  // sigma_z (x) C
  full.block(8, 8, 8, 8) -= c;

  CHECK((full - full.adjoint()).cwiseAbs().maxCoeff() < 1e-15);
  std::mt19937_64 gen(43);
  for (int trial = 0; trial < 3; ++trial) {
    const CVector psi = random_state(16, gen);
    const CVector via_blocks = hamsim::exact::apply_hamiltonian(psi, t, m, p, c);
    const CVector via_matrix = full * psi;
    CHECK((via_blocks - via_matrix).cwiseAbs().maxCoeff() < 1e-13);
    // Hermitian quadratic form is real
    CHECK(std::abs(psi.dot(via_blocks).imag()) < 1e-12);
  }
}

TEST_CASE("apply_hamiltonian: shape validation") {
  const SearchModel m = hamsim::schedule::make_search_model(4, 0.1);
  const BathParams p = make_params(4, 8, 1e-3, 11);
  const Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(8, 8);
  CHECK_THROWS_AS(hamsim::exact::apply_hamiltonian(CVector::Zero(15), 0.0, m, p, c),
                  std::invalid_argument);
  CHECK_THROWS_AS(hamsim::exact::apply_hamiltonian(CVector::Zero(16), 0.0, m, p,
                                                   Eigen::MatrixXcd::Zero(4, 4)),
                  std::invalid_argument);
}

TEST_CASE("step-size rule and its validation") {
  const BathParams p = make_params(12, 2000, 1e-4, 1);
  const double bound = hamsim::exact::coupling_norm_bound(p);
  CHECK(bound == doctest::Approx(3e-4 * 2.0 * std::sqrt(4000.0)).epsilon(1e-14));
  CHECK(hamsim::exact::max_dt(p) == doctest::Approx(0.05 / (1.5 + bound)).epsilon(1e-14));
  CHECK(hamsim::exact::default_dt(p) == doctest::Approx(0.02).epsilon(1e-14));

  // a huge coupling pushes the default below 0.02
  const BathParams strong = make_params(12, 2000, 1e-1, 1);
  CHECK(hamsim::exact::default_dt(strong) == hamsim::exact::max_dt(strong));

  const SearchModel m = hamsim::schedule::make_search_model(4, 0.1);
  const BathParams small = make_params(4, 16, 1e-3, 1);
  ExactOptions o;
  o.dt = 2.0 * hamsim::exact::max_dt(small);
  o.t_end = 10.0;
  CHECK_THROWS_WITH_AS(
      hamsim::exact::propagate_exact(m, hamsim::bath::sample_bath(small), o),
      doctest::Contains("exceeds"), std::invalid_argument);
}

TEST_CASE("closed-system energy is conserved when the coupling is off") {
  const SearchModel m = hamsim::schedule::make_search_model(4, 0.1);
  const BathParams p = make_params(4, 16, 0.0, 1);
  const Eigen::MatrixXcd czero = Eigen::MatrixXcd::Zero(16, 16);
  const Eigen::VectorXd he = hamsim::bath::bath_hamiltonian_diagonal(p);
  CVector psi = hamsim::exact::initial_full_state(m, p).amps;
  auto bath_energy = [&](const CVector& v) {
    double e = 0;
    for (int k = 0; k < 16; ++k)
      e += he[k] * (std::norm(v[k]) + std::norm(v[16 + k]));
    return e;
  };
  const double e0 = bath_energy(psi);
  auto deriv = [&](const CVector& v, double t, CVector& d) {
    d = -hamsim::numerics::kI * hamsim::exact::apply_hamiltonian(v, t, m, p, czero);
  };
  hamsim::numerics::Rk4Workspace<CVector> ws;
  const double dt = 0.005;
  for (int k = 0; k < 10000; ++k)
    hamsim::numerics::rk4_step(deriv, psi, k * dt, dt, ws);
  CHECK(std::abs(bath_energy(psi) - e0) < 1e-9 * e0);
  CHECK(std::abs(psi.squaredNorm() - 1.0) < 1e-9);
}

TEST_CASE("norm drift shrinks at least 16x when dt is halved") {
  const SearchModel m = hamsim::schedule::make_search_model(4, 0.1);
  BathParams p = make_params(4, 16, 0.0, 1);
  p.band_width = 2.0;  // widen the band so integrator error is measurable
  const BathRealization br = hamsim::bath::sample_bath(p);
  auto run = [&](double dt) {
    ExactOptions o;
    o.dt = dt;
    o.t_end = 50.0;
    o.freeze_s = 0.5;
    return hamsim::exact::propagate_exact(m, br, o).drift.back();
  };
  const double d1 = run(0.016);
  const double d2 = run(0.008);
  CHECK(d1 > 1e-12);
  CHECK(d2 > 1e-14);
  CHECK(d1 / d2 > 14.0);
  CHECK(d1 / d2 < 64.0);
}

TEST_CASE("zero coupling: exact and master agree to 1e-6 and stay pure") {
  const SearchModel m = hamsim::schedule::make_search_model(8, 0.1);
  const BathParams p = make_params(8, 32, 0.0, 1);
  ExactOptions eo;
  eo.dt = 0.005;
  const Trajectory ex = hamsim::exact::propagate_exact(m, hamsim::bath::sample_bath(p), eo);

  hamsim::master::MasterOptions mo;
  mo.dt = 0.005;
  const Trajectory ma =
      hamsim::master::propagate_master(m, hamsim::master::dephasing_spec(p), mo);

  REQUIRE(ex.size() == ma.size());
  for (std::size_t i = 0; i < ex.size(); ++i) {
    CHECK(ex.times[i] == ma.times[i]);
    CHECK(std::abs(ex.p_success[i] - ma.p_success[i]) <= 1e-6);
    CHECK(std::abs(ex.coherence[i] - ma.coherence[i]) <= 1e-6);
  }
  for (std::size_t i = 0; i < ex.size(); ++i) {
    CHECK(std::abs(ex.purity[i] - 1.0) <= 1e-8);
    CHECK(std::abs(ex.coherence[i] - 1.0) <= 1e-8);
  }
  CHECK(ex.p_success.back() >= 0.9);
}

TEST_CASE("desk-scale coupled run: hygiene and bookkeeping") {
  const SearchModel m = hamsim::schedule::make_search_model(8, 0.1);
  const BathParams p = make_params(8, 200, 6.25e-4, 1);
  const Trajectory t =
      hamsim::exact::propagate_exact(m, hamsim::bath::sample_bath(p), ExactOptions{});
  REQUIRE(t.size() >= 200);
  CHECK(t.times.front() == 0.0);
  CHECK(t.times.back() == m.t_total);
  for (std::size_t i = 1; i < t.size(); ++i) CHECK(t.times[i] > t.times[i - 1]);
  for (double d : t.drift) CHECK(d <= 1e-8);
  CHECK(t.min_eigenvalue >= -1e-12);
  for (double v : t.p_success) {
    CHECK(v >= -1e-12);
    CHECK(v <= 1.0 + 1e-12);
  }
  for (double c : t.coherence) CHECK(c <= 1.0 + 1e-8);
  CHECK(t.meta.solver == "exact");
  CHECK(t.meta.seed == 1);
  CHECK(t.meta.n_qubits == 8);
  CHECK(t.meta.n_levels == 200);
  CHECK(t.meta.coupling == 6.25e-4);
  CHECK(t.meta.dt == 0.02);
}

TEST_CASE("frozen sweep: measured dephasing rate matches the golden-rule value") {
  // H_S frozen at s=1 commutes with sigma_z (x) C, so populations are frozen
  // and the |m><p| coherence decays at 2*Gamma. Fit the 10-seed average.
  const SearchModel m = hamsim::schedule::make_search_model(12, 0.1);
  const BathParams base = make_params(12, 100, 1e-3, 0);
  const double gamma = hamsim::bath::gamma_rate(base);
  const auto rep = hamsim::bath::criteria(base);
  REQUIRE(rep.c1_ok);  // inside the validity window by construction
  REQUIRE(rep.c2_ok);

  std::vector<double> mean_c;
  std::vector<double> times;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    BathParams p = base;
    p.seed = seed;
    ExactOptions o;
    o.t_end = 80.0;
    o.freeze_s = 1.0;
    Eigen::Vector2cd plus;
    plus << std::sqrt(0.5), std::sqrt(0.5);
    o.initial_system = plus;
    const Trajectory t = hamsim::exact::propagate_exact(m, hamsim::bath::sample_bath(p), o);
    if (mean_c.empty()) {
      mean_c.assign(t.size(), 0.0);
      times = t.times;
    }
    for (std::size_t i = 0; i < t.size(); ++i) mean_c[i] += t.coherence[i] / 10.0;
    for (double ps : t.p_success) CHECK(std::abs(ps - 0.5) <= 1e-6);
  }

  // least-squares slope of ln(mean coherence) on t in [10, 80]
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < 10.0) continue;
    const double x = times[i], y = std::log(mean_c[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  REQUIRE(count > 10);
  const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  CHECK(std::abs(-slope - 2.0 * gamma) < 0.3 * 2.0 * gamma);
}

TEST_CASE("propagation is deterministic for a fixed seed") {
  const SearchModel m = hamsim::schedule::make_search_model(4, 0.1);
  const BathParams p = make_params(4, 32, 1e-3, 5);
  ExactOptions o;
  o.t_end = 30.0;
  const Trajectory a = hamsim::exact::propagate_exact(m, hamsim::bath::sample_bath(p), o);
  const Trajectory b = hamsim::exact::propagate_exact(m, hamsim::bath::sample_bath(p), o);
  CHECK(a.p_success == b.p_success);
  CHECK(a.coherence == b.coherence);
  CHECK(a.drift == b.drift);
}

TEST_CASE("unnormalized initial system states are rejected") {
  const SearchModel m = hamsim::schedule::make_search_model(4, 0.1);
  const BathParams p = make_params(4, 16, 0.0, 1);
  ExactOptions o;
  o.t_end = 1.0;
  Eigen::Vector2cd bad;
  bad << 1.0, 0.5;
  o.initial_system = bad;
  CHECK_THROWS_AS(hamsim::exact::propagate_exact(m, hamsim::bath::sample_bath(p), o),
                  std::invalid_argument);
}

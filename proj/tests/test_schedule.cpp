#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "hamsim/schedule.hpp"

using hamsim::schedule::SearchModel;

TEST_CASE("total runtime: frozen value for n=12, eps=0.1") {
  const SearchModel m = hamsim::schedule::make_search_model(12, 0.1);
  CHECK(m.n_states == 4096.0);
  // (sqrt(N)/eps) * atan(sqrt(N)), evaluated once at high precision and frozen
  CHECK(m.t_total == doctest::Approx(995.310462831629).epsilon(1e-12));
}

TEST_CASE("schedule endpoints and midpoint") {
  const SearchModel m = hamsim::schedule::make_search_model(12, 0.1);
  CHECK(std::abs(hamsim::schedule::s_of_t(0.0, m)) <= 1e-12);
  CHECK(hamsim::schedule::s_of_t(0.5 * m.t_total, m) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(hamsim::schedule::s_of_t(m.t_total, m) >= 1.0 - 1e-12);
  CHECK(hamsim::schedule::s_of_t(m.t_total, m) <= 1.0 + 1e-12);
}

TEST_CASE("schedule is monotone nondecreasing on a fine grid") {
  const SearchModel m = hamsim::schedule::make_search_model(10, 0.25);
  const int k = 10000;
  double prev = hamsim::schedule::s_of_t(0.0, m);
  for (int i = 1; i <= k; ++i) {
    const double s = hamsim::schedule::s_of_t(m.t_total * i / k, m);
    CHECK(s >= prev);
    prev = s;
  }
}

TEST_CASE("sweep rate: slow near the avoided crossing, fast at the edges") {
  // ds/dt = eps/N + 4*eps*(s-1/2)^2: minimum eps/N at s=1/2, ~eps at the ends.
  const SearchModel m = hamsim::schedule::make_search_model(12, 0.1);
  const double h = m.t_total * 1e-6;
  auto rate = [&](double t) {
    return (hamsim::schedule::s_of_t(t + h, m) - hamsim::schedule::s_of_t(t - h, m)) /
           (2.0 * h);
  };
  const double mid = rate(0.5 * m.t_total);
  const double edge = rate(h);  // one step in from t=0
  CHECK(std::abs(mid * m.n_states / m.epsilon - 1.0) < 1e-3);
  CHECK(std::abs(edge - m.epsilon) < 0.01 * m.epsilon);
  CHECK(edge / mid > 100.0);
}

TEST_CASE("two-level Hamiltonian at the endpoints") {
  const SearchModel m = hamsim::schedule::make_search_model(2, 0.5);  // N = 4
  const Eigen::Matrix2cd h0 = hamsim::schedule::system_hamiltonian(0.0, m);
  // s=0: (1-s)[[1-1/N, -sqrt(N-1)/N],[-sqrt(N-1)/N, 1/N]]
  CHECK(h0(0, 0).real() == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(h0(0, 1).real() == doctest::Approx(-std::sqrt(3.0) / 4.0).epsilon(1e-15));
  CHECK(h0(1, 0) == h0(0, 1));
  CHECK(h0(1, 1).real() == doctest::Approx(0.25).epsilon(1e-15));
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(h0);
  CHECK(std::abs(es.eigenvalues()[0]) < 1e-14);  // ground energy 0 at s=0
  CHECK(es.eigenvalues()[1] == doctest::Approx(1.0).epsilon(1e-14));

  const Eigen::Matrix2cd h1 = hamsim::schedule::system_hamiltonian(1.0, m);
  CHECK(h1(0, 0) == std::complex<double>(0.0, 0.0));
  CHECK(h1(0, 1) == std::complex<double>(0.0, 0.0));
  CHECK(h1(1, 1).real() == 1.0);
}

TEST_CASE("gap: closed form matches an eigensolve and hits 1/sqrt(N) at s=1/2") {
  const SearchModel m = hamsim::schedule::make_search_model(8, 0.1);  // N = 256
  for (double s : {0.0, 0.25, 0.5, 0.8, 1.0}) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(
        hamsim::schedule::system_hamiltonian(s, m));
    const double gap_eig = es.eigenvalues()[1] - es.eigenvalues()[0];
    CHECK(std::abs(hamsim::schedule::gap(s, m) - gap_eig) < 1e-12);
  }
  CHECK(std::abs(hamsim::schedule::gap(0.0, m) - 1.0) < 1e-15);
  CHECK(std::abs(hamsim::schedule::gap(0.5, m) - 1.0 / 16.0) < 1e-15);
}

TEST_CASE("gap: grid minimum equals 1/sqrt(N) for several sizes") {
  for (int n : {4, 8, 12}) {
    const SearchModel m = hamsim::schedule::make_search_model(n, 0.1);
    double gmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 2000; ++i)
      gmin = std::min(gmin, hamsim::schedule::gap(i / 2000.0, m));
    CHECK(std::abs(gmin - 1.0 / std::sqrt(m.n_states)) < 1e-12);
  }
}

TEST_CASE("eigenvalues stay inside [0, 1] along the sweep") {
  const SearchModel m = hamsim::schedule::make_search_model(6, 0.2);
  for (int i = 0; i <= 100; ++i) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(
        hamsim::schedule::system_hamiltonian(i / 100.0, m));
    CHECK(es.eigenvalues()[0] >= -1e-12);
    CHECK(es.eigenvalues()[1] <= 1.0 + 1e-12);
  }
}

TEST_CASE("initial state: amplitudes, normalization, and H(0) ground state") {
  const SearchModel m4 = hamsim::schedule::make_search_model(2, 0.5);
  const Eigen::Vector2cd psi = hamsim::schedule::initial_system_state(m4);
  CHECK(std::abs(psi[0].real() - 0.5) < 1e-15);
  CHECK(std::abs(psi[1].real() - std::sqrt(3.0) / 2.0) < 1e-15);
  CHECK(psi[0].imag() == 0.0);
  CHECK(psi[1].imag() == 0.0);

  for (int n : {2, 8, 12, 20}) {
    const SearchModel m = hamsim::schedule::make_search_model(n, 0.1);
    const Eigen::Vector2cd v = hamsim::schedule::initial_system_state(m);
    CHECK(std::abs(v.squaredNorm() - 1.0) < 1e-14);
    const Eigen::Vector2cd hv = hamsim::schedule::system_hamiltonian(0.0, m) * v;
    CHECK(hv.cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(hamsim::schedule::make_search_model(0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(hamsim::schedule::make_search_model(-3, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(hamsim::schedule::make_search_model(41, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(hamsim::schedule::make_search_model(12, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(hamsim::schedule::make_search_model(12, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(hamsim::schedule::make_search_model(12, 1.0), std::invalid_argument);

  const SearchModel m = hamsim::schedule::make_search_model(12, 0.1);
  CHECK_THROWS_AS(hamsim::schedule::s_of_t(-1.0, m), std::out_of_range);
  CHECK_THROWS_AS(hamsim::schedule::s_of_t(1.1 * m.t_total, m), std::out_of_range);
  CHECK_THROWS_AS(hamsim::schedule::system_hamiltonian(-0.1, m), std::out_of_range);
  CHECK_THROWS_AS(hamsim::schedule::system_hamiltonian(1.1, m), std::out_of_range);
  CHECK_THROWS_AS(hamsim::schedule::gap(-0.1, m), std::out_of_range);
  CHECK_THROWS_AS(hamsim::schedule::gap(1.0001, m), std::out_of_range);
}

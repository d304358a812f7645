#include "hamsim/bath.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace hamsim::bath {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Index of (n1, n2), n1 < n2, in the packed strictly-upper triangle.
inline std::size_t upper_index(int n1, int n2, int n) {
  return static_cast<std::size_t>(n1) * n - static_cast<std::size_t>(n1) * (n1 + 1) / 2
       + static_cast<std::size_t>(n2 - n1 - 1);
}

// Uniform double in (0, 1), 53-bit resolution, never exactly 0 or 1.
inline double uniform_open(std::mt19937_64& gen) {
  return (static_cast<double>(gen() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

void validate(const BathParams& p) {
  if (p.n_levels < 2)
    throw std::invalid_argument("BathParams: n_levels must be >= 2");
  if (!(p.band_width > 0.0))
    throw std::invalid_argument("BathParams: band_width must be > 0");
  if (p.coupling < 0.0)
    throw std::invalid_argument("BathParams: coupling must be >= 0");
  if (p.n_qubits < 1)
    throw std::invalid_argument("BathParams: n_qubits must be >= 1");
}

Complex BathRealization::coupling_at(int n1, int n2) const {
  const int n = params.n_levels;
  if (n1 < 0 || n2 <= n1 || n2 >= n)
    throw std::invalid_argument("coupling_at: need 0 <= n1 < n2 < n_levels");
  return couplings[upper_index(n1, n2, n)];
}

BathRealization sample_bath(const BathParams& p) {
  validate(p);
  const int n = p.n_levels;
  BathRealization r;
  r.params = p;
  r.couplings.resize(static_cast<std::size_t>(n) * (n - 1) / 2);
  std::mt19937_64 gen(p.seed);
  // Polar form of a standard complex Gaussian: |c|^2 ~ Exp(1), arg uniform.
  // Two generator draws per coupling, fixed lexicographic order.
  std::size_t k = 0;
  for (int n1 = 0; n1 < n - 1; ++n1) {
    for (int n2 = n1 + 1; n2 < n; ++n2) {
      const double radius = std::sqrt(-std::log(uniform_open(gen)));
      const double angle = kTwoPi * uniform_open(gen);
      r.couplings[k++] = Complex(radius * std::cos(angle), radius * std::sin(angle));
    }
  }
  return r;
}

Eigen::VectorXd bath_hamiltonian_diagonal(const BathParams& p) {
  validate(p);
  Eigen::VectorXd d(p.n_levels);
  const double step = p.band_width / p.n_levels;
  for (int k = 0; k < p.n_levels; ++k) d[k] = step * (k + 1);
  return d;
}

Eigen::MatrixXcd reduced_bath_operator(const BathRealization& r) {
  const int n = r.params.n_levels;
  const double le = r.params.lambda_eff();
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(n, n);
  std::size_t k = 0;
  for (int n1 = 0; n1 < n - 1; ++n1) {
    for (int n2 = n1 + 1; n2 < n; ++n2) {
      const Complex v = -le * r.couplings[k++];
      c(n1, n2) = v;
      c(n2, n1) = std::conj(v);
    }
  }
  return c;
}

double correlation_analytic(double s, const BathParams& p) {
  validate(p);
  const double le = p.lambda_eff();
  const double x = p.band_width * s / 2.0;
  // (n lambda / (2 de s)) * sin(de s / 2) = lambda_eff * sin(x)/x
  const double sinc = std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
  return p.n_levels * le * le * sinc * sinc;
}

double correlation_empirical(const BathRealization& r, double s) {
  const int n = r.params.n_levels;
  const double le = r.params.lambda_eff();
  const double dw = r.params.band_width / n;  // level spacing
  double sum = 0.0;
  std::size_t k = 0;
  for (int n1 = 0; n1 < n - 1; ++n1) {
    for (int n2 = n1 + 1; n2 < n; ++n2) {
      const double omega = dw * (n2 - n1);
      sum += std::norm(r.couplings[k++]) * 2.0 * std::cos(omega * s);
    }
  }
  return le * le * sum / n;
}

double correlation_empirical(const BathRealization& r, double s,
                             const Eigen::MatrixXcd& rho_e) {
  const int n = r.params.n_levels;
  if (rho_e.rows() != n || rho_e.cols() != n)
    throw std::invalid_argument("correlation_empirical: rho_e dimension mismatch");
  const Eigen::MatrixXcd uniform = Eigen::MatrixXcd::Identity(n, n) / double(n);
  if ((rho_e - uniform).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument(
        "correlation_empirical: unsupported bath state (only I/N1 is implemented)");
  return correlation_empirical(r, s);
}

double gamma_rate(const BathParams& p) {
  validate(p);
  const double nl = p.n_qubits * p.coupling;
  const double pi = 3.14159265358979323846;
  return nl * nl * pi * p.n_levels / (8.0 * p.band_width);
}

CriteriaReport criteria(const BathParams& p) {
  validate(p);
  CriteriaReport rep;
  rep.lambda_eff = p.lambda_eff();
  rep.c1 = rep.lambda_eff * p.n_levels / p.band_width;
  rep.c2 = rep.lambda_eff * rep.lambda_eff * p.n_levels / (p.band_width * p.band_width);
  rep.gamma = gamma_rate(p);
  rep.c1_ok = rep.c1 >= 0.5;
  rep.c2_ok = rep.c2 < 0.1;
  return rep;
}

std::string params_to_text(const BathParams& p) {
  std::ostringstream os;
  os.precision(17);
  os << "n_levels=" << p.n_levels << "\n"
     << "band_width=" << p.band_width << "\n"
     << "coupling=" << p.coupling << "\n"
     << "n_qubits=" << p.n_qubits << "\n"
     << "seed=" << p.seed << "\n";
  return os.str();
}

BathParams params_from_text(const std::string& text) {
  BathParams p;
  std::istringstream is(text);
  std::string line;
  int seen = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("params_from_text: malformed line: " + line);
    const std::string key = line.substr(0, eq);
    const std::string val = line.substr(eq + 1);
    if (key == "n_levels") { p.n_levels = std::stoi(val); ++seen; }
    else if (key == "band_width") { p.band_width = std::stod(val); ++seen; }
    else if (key == "coupling") { p.coupling = std::stod(val); ++seen; }
    else if (key == "n_qubits") { p.n_qubits = std::stoi(val); ++seen; }
    else if (key == "seed") { p.seed = std::stoull(val); ++seen; }
    else throw std::invalid_argument("params_from_text: unknown key: " + key);
  }
  if (seen != 5)
    throw std::invalid_argument("params_from_text: missing fields");
  validate(p);
  return p;
}

}  // namespace hamsim::bath

#include "fpml/frac_params.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fpml {

namespace {
void check_sigma(double sigma) {
  if (!(sigma > 0.0 && sigma < 2.0))
    throw std::invalid_argument("sigma must lie strictly in (0,2), got " +
                                std::to_string(sigma));
}
}  // namespace

double normalization_constant(int dim, double sigma) {
  check_sigma(sigma);
  if (dim < 1) throw std::invalid_argument("dim must be >= 1");
  double n = dim;
  return std::pow(2.0, sigma - 1.0) * sigma * std::tgamma((n + sigma) / 2.0) /
         (std::pow(std::numbers::pi, n / 2.0) * std::tgamma(1.0 - sigma / 2.0));
}

double extension_constant(double sigma) {
  check_sigma(sigma);
  return std::pow(2.0, sigma - 1.0) * std::tgamma(sigma / 2.0) /
         std::tgamma(1.0 - sigma / 2.0);
}

FracParams FracParams::make(int dim, double sigma, double m) {
  if (dim != 1 && dim != 2)
    throw std::invalid_argument("FracParams dim must be 1 or 2");
  check_sigma(sigma);
  if (!(m > 0.0))
    throw std::invalid_argument("exponent m must be positive");
  return FracParams{dim, sigma, m};
}

double FracParams::m_star() const {
  double v = (dim - sigma) / dim;
  return v > 0.0 ? v : 0.0;
}

double FracParams::p_star() const { return (1.0 - m) * dim / sigma; }

double FracParams::gamma_p(double p) const {
  return 1.0 / (m - 1.0 + sigma * p / dim);
}

double FracParams::delta_p(double p) const {
  return sigma * p * gamma_p(p) / dim;
}

// The exponent formulas stay symbolic in N even though grids stop at N = 2.
CriticalExponents critical_exponents(int dim, double sigma, double m, double p) {
  check_sigma(sigma);
  if (dim < 1) throw std::invalid_argument("dim must be >= 1");
  if (!(m > 0.0)) throw std::invalid_argument("exponent m must be positive");
  double n = dim;
  double m_star = std::max((n - sigma) / n, 0.0);
  double p_star = (1.0 - m) * n / sigma;
  double gamma_p = 1.0 / (m - 1.0 + sigma * p / n);
  return CriticalExponents{m_star, p_star, gamma_p, sigma * p * gamma_p / n};
}

}  // namespace fpml

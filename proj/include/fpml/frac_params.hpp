#pragma once

namespace fpml {

/// Riesz kernel normalization C_{N,sigma} = 2^{sigma-1} sigma Gamma((N+sigma)/2)
/// / (pi^{N/2} Gamma(1-sigma/2)).  Requires 0 < sigma < 2.
double normalization_constant(int dim, double sigma);

/// Extension weight constant mu_sigma = 2^{sigma-1} Gamma(sigma/2) / Gamma(1-sigma/2).
double extension_constant(double sigma);

struct CriticalExponents {
  double m_star;
  double p_star;
  double gamma_p;
  double delta_p;
};

/// Problem parameters (N, sigma, m) with the derived critical quantities.
struct FracParams {
  int dim = 1;
  double sigma = 1.0;
  double m = 1.0;

  static FracParams make(int dim, double sigma, double m);

  double m_star() const;          // (N - sigma)_+ / N
  double p_star() const;          // (1 - m) N / sigma
  double gamma_p(double p) const; // (m - 1 + sigma p / N)^{-1}
  double delta_p(double p) const; // sigma p gamma_p / N
};

CriticalExponents critical_exponents(int dim, double sigma, double m, double p);

}  // namespace fpml

#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "fpml/grid.hpp"

namespace fpml {

/// Real nodal values on a grid.  Immutable by convention once filled:
/// operations return fresh fields instead of mutating inputs.
class Field {
public:
  Field() = default;
  explicit Field(const Grid& g, double fill = 0.0)
      : grid_(g), values_(g.node_count(), fill) {}
  Field(const Grid& g, std::vector<double> values);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  bool all_finite() const;

private:
  Grid grid_;
  std::vector<double> values_;
};

/// Row-major flat index; i1 ignored in 1D.
std::size_t flat_index(const Grid& g, int i0, int i1 = 0);

/// Writes the dim() coordinates of a flat node index into xy.
void node_coords(const Grid& g, std::size_t flat, double* xy);

/// Discrete h^N-weighted L^p norm, (h^N sum |u_i|^p)^{1/p}; p = infinity
/// gives max |u_i|.  Rejects p < 1.
double norm_lp(const Field& u, double p);

/// Signed discrete integral h^N sum u_i.
double mass(const Field& u);

double norm_l1_diff(const Field& a, const Field& b);

/// h^N sum (a_i - b_i)_+ .
double positive_part_integral(const Field& a, const Field& b);

/// Odd power |s|^{p-1} s, the sign-preserving power used throughout.
double pow_signed(double s, double p);
Field pow_signed(const Field& u, double p);

/// Discrete transform coefficients.  On torus grids these are Fourier-series
/// coefficients (u = sum_k c_k e^{i omega_k x}) stored in FFT bin order; on
/// Dirichlet grids they are sine coefficients (u = sum_k c_k prod sin(...)).
class Spectrum {
public:
  Spectrum() = default;
  static Spectrum make_fourier(const Grid& g, std::vector<std::complex<double>> coeffs);
  static Spectrum make_sine(const Grid& g, std::vector<double> coeffs);

  const Grid& grid() const { return grid_; }
  bool is_fourier() const { return fourier_mode_; }

  std::vector<std::complex<double>>& fourier_coeffs();
  const std::vector<std::complex<double>>& fourier_coeffs() const;
  std::vector<double>& sine_coeffs();
  const std::vector<double>& sine_coeffs() const;

  /// Torus coefficient at integer mode (k0, k1), k in [-M/2, M/2).
  std::complex<double> at_freq(int k0, int k1 = 0) const;

  /// Spectral l2 norm matching norm_lp(field, 2) via Parseval.
  double l2_norm() const;

private:
  Grid grid_;
  bool fourier_mode_ = true;
  std::vector<std::complex<double>> fourier_;
  std::vector<double> sine_;
};

}  // namespace fpml

#include "fpml/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fpml {

Field::Field(const Grid& g, std::vector<double> values)
    : grid_(g), values_(std::move(values)) {
  if (values_.size() != g.node_count())
    throw std::invalid_argument("field length does not match grid node count");
}

bool Field::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

std::size_t flat_index(const Grid& g, int i0, int i1) {
  if (g.dim() == 1) return static_cast<std::size_t>(i0);
  return static_cast<std::size_t>(i0) * g.nodes_per_dim() + i1;
}

void node_coords(const Grid& g, std::size_t flat, double* xy) {
  if (g.dim() == 1) {
    xy[0] = g.coord(static_cast<int>(flat));
  } else {
    int n = g.nodes_per_dim();
    xy[0] = g.coord(static_cast<int>(flat) / n);
    xy[1] = g.coord(static_cast<int>(flat) % n);
  }
}

double norm_lp(const Field& u, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : u.values()) m = std::max(m, std::abs(v));
    return m;
  }
  if (!(p >= 1.0))
    throw std::invalid_argument("norm_lp requires p >= 1");
  double s = 0.0;
  if (p == 1.0) {
    for (double v : u.values()) s += std::abs(v);
  } else if (p == 2.0) {
    for (double v : u.values()) s += v * v;
  } else {
    for (double v : u.values()) s += std::pow(std::abs(v), p);
  }
  return std::pow(u.grid().cell_volume() * s, 1.0 / p);
}

double mass(const Field& u) {
  double s = 0.0;
  for (double v : u.values()) s += v;
  return u.grid().cell_volume() * s;
}

double norm_l1_diff(const Field& a, const Field& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("field size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return a.grid().cell_volume() * s;
}

double positive_part_integral(const Field& a, const Field& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("field size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::max(a[i] - b[i], 0.0);
  return a.grid().cell_volume() * s;
}

double pow_signed(double s, double p) {
  if (s == 0.0) return 0.0;
  return std::copysign(std::pow(std::abs(s), p), s);
}

Field pow_signed(const Field& u, double p) {
  Field out(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = pow_signed(u[i], p);
  return out;
}

Spectrum Spectrum::make_fourier(const Grid& g, std::vector<std::complex<double>> coeffs) {
  if (g.boundary() == Boundary::DirichletBox)
    throw std::invalid_argument("fourier spectrum requires a torus/free-space grid");
  if (coeffs.size() != g.node_count())
    throw std::invalid_argument("spectrum length does not match grid");
  Spectrum s;
  s.grid_ = g;
  s.fourier_mode_ = true;
  s.fourier_ = std::move(coeffs);
  return s;
}

Spectrum Spectrum::make_sine(const Grid& g, std::vector<double> coeffs) {
  if (g.boundary() != Boundary::DirichletBox)
    throw std::invalid_argument("sine spectrum requires a Dirichlet grid");
  if (coeffs.size() != g.node_count())
    throw std::invalid_argument("spectrum length does not match grid");
  Spectrum s;
  s.grid_ = g;
  s.fourier_mode_ = false;
  s.sine_ = std::move(coeffs);
  return s;
}

std::vector<std::complex<double>>& Spectrum::fourier_coeffs() {
  if (!fourier_mode_) throw std::logic_error("not a fourier spectrum");
  return fourier_;
}
const std::vector<std::complex<double>>& Spectrum::fourier_coeffs() const {
  if (!fourier_mode_) throw std::logic_error("not a fourier spectrum");
  return fourier_;
}
std::vector<double>& Spectrum::sine_coeffs() {
  if (fourier_mode_) throw std::logic_error("not a sine spectrum");
  return sine_;
}
const std::vector<double>& Spectrum::sine_coeffs() const {
  if (fourier_mode_) throw std::logic_error("not a sine spectrum");
  return sine_;
}

std::complex<double> Spectrum::at_freq(int k0, int k1) const {
  int m = grid_.points_per_dim();
  auto bin = [m](int k) { return k >= 0 ? k : k + m; };
  std::size_t idx = grid_.dim() == 1
                        ? static_cast<std::size_t>(bin(k0))
                        : static_cast<std::size_t>(bin(k0)) * m + bin(k1);
  return fourier_coeffs()[idx];
}

double Spectrum::l2_norm() const {
  double s = 0.0;
  if (fourier_mode_) {
    for (const auto& c : fourier_) s += std::norm(c);
    return std::sqrt(grid_.domain_volume() * s);
  }
  for (double c : sine_) s += c * c;
  // per axis: sum_i sin^2 = M/2, so h^N (M/2)^N = L^N
  double l = grid_.half_length();
  double vol = grid_.dim() == 1 ? l : l * l;
  return std::sqrt(vol * s);
}

}  // namespace fpml

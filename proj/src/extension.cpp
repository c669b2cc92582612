#include "fpml/extension.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fpml/fft.hpp"
#include "fpml/frac_params.hpp"

namespace fpml {

namespace {

double omega_sq_of_bin(const Grid& g, std::size_t bin) {
  if (g.dim() == 1) {
    double w = g.omega(static_cast<int>(bin));
    return w * w;
  }
  int m = g.points_per_dim();
  double w0 = g.omega(static_cast<int>(bin) / m);
  double w1 = g.omega(static_cast<int>(bin) % m);
  return w0 * w0 + w1 * w1;
}

}  // namespace

double default_extension_height(const Grid& g) {
  double omega_min = std::numbers::pi / g.half_length();
  return 8.0 / omega_min;
}

ExtensionSolution extend(const Field& g, double sigma, double height, int levels) {
  const Grid& grid = g.grid();
  if (grid.boundary() != Boundary::PeriodicTorus)
    throw std::invalid_argument("extend requires a PeriodicTorus grid");
  if (!(sigma > 0.0 && sigma < 2.0))
    throw std::invalid_argument("extend needs sigma in (0,2)");
  if (!(height > 0.0)) throw std::invalid_argument("extend needs height > 0");
  if (levels < 32) throw std::invalid_argument("extend needs at least 32 levels");

  ExtensionSolution ext;
  ext.grid = grid;
  ext.sigma = sigma;
  ext.ymesh.resize(levels + 1);
  // One power beyond 2/sigma: the first cell must resolve the y^sigma layer
  // and the y^2 source component behind it, which dominates for sigma > 1.
  double grade = 1.0 + 2.0 / sigma;
  for (int j = 0; j <= levels; ++j)
    ext.ymesh[j] = height * std::pow(static_cast<double>(j) / levels, grade);

  double omega_min = std::numbers::pi / grid.half_length();
  ext.truncation_warning = height * omega_min < 3.0;

  Spectrum spec = forward_transform(g);
  const auto& coeffs = spec.fourier_coeffs();
  const int jmax = levels;
  ext.profiles.assign(coeffs.size() * (jmax + 1), 0.0);
  ext.first_increment.assign(coeffs.size(), 0.0);

  // precompute flux coefficients and weight integrals (mode independent)
  std::vector<double> flux_c(jmax + 1, 0.0);  // flux_c[j] couples y_{j-1}, y_j
  for (int j = 1; j <= jmax; ++j)
    flux_c[j] = sigma / (std::pow(ext.ymesh[j], sigma) - std::pow(ext.ymesh[j - 1], sigma));
  std::vector<double> wint(jmax, 0.0);  // control-volume int y^{1-sigma} dy
  for (int j = 1; j < jmax; ++j) {
    double lo = 0.5 * (ext.ymesh[j - 1] + ext.ymesh[j]);
    double hi = 0.5 * (ext.ymesh[j] + ext.ymesh[j + 1]);
    wint[j] = (std::pow(hi, 2.0 - sigma) - std::pow(lo, 2.0 - sigma)) / (2.0 - sigma);
  }

  std::vector<double> diag(jmax), sub(jmax), sup(jmax);
  std::vector<std::complex<double>> rhs(jmax), sol(jmax);

  for (std::size_t bin = 0; bin < coeffs.size(); ++bin) {
    std::complex<double> g_hat = coeffs[bin];
    double w2 = omega_sq_of_bin(grid, bin);
    auto* prof = &ext.profiles[bin * (jmax + 1)];
    if (w2 == 0.0) {
      for (int j = 0; j <= jmax; ++j) prof[j] = g_hat;  // harmonic extension of the mean
      continue;
    }
    // Thomas solve in the increment variable v = w - g_hat (v_0 = 0,
    // v_J = -g_hat), which keeps the tiny first-cell increment out of the
    // rounding shadow of the O(1) boundary value
    for (int j = 1; j < jmax; ++j) {
      sub[j] = -flux_c[j];
      sup[j] = -flux_c[j + 1];
      diag[j] = flux_c[j] + flux_c[j + 1] + w2 * wint[j];
      rhs[j] = -w2 * wint[j] * g_hat;
    }
    rhs[jmax - 1] -= flux_c[jmax] * g_hat;
    for (int j = 2; j < jmax; ++j) {
      double f = sub[j] / diag[j - 1];
      diag[j] -= f * sup[j - 1];
      rhs[j] -= f * rhs[j - 1];
    }
    if (jmax >= 2) sol[jmax - 1] = rhs[jmax - 1] / diag[jmax - 1];
    for (int j = jmax - 2; j >= 1; --j)
      sol[j] = (rhs[j] - sup[j] * sol[j + 1]) / diag[j];
    ext.first_increment[bin] = jmax >= 2 ? sol[1] : -g_hat;
    prof[0] = g_hat;
    for (int j = 1; j < jmax; ++j) prof[j] = sol[j] + g_hat;
    prof[jmax] = 0.0;
  }
  return ext;
}

Field dtn_flux(const ExtensionSolution& ext) {
  const Grid& grid = ext.grid;
  double mu = extension_constant(ext.sigma);
  double y1s = std::pow(ext.ymesh[1], ext.sigma);
  std::vector<std::complex<double>> flux(grid.node_count());
  for (std::size_t bin = 0; bin < flux.size(); ++bin) {
    // first-cell flux sigma (w_1 - w_0)/y_1^sigma equals the coefficient of
    // the y^sigma boundary layer times sigma, the quantity whose limit the
    // weighted normal derivative takes
    std::complex<double> f = ext.sigma * ext.first_increment[bin] / y1s;
    flux[bin] = -mu * f;
  }
  return inverse_transform(Spectrum::make_fourier(grid, std::move(flux)));
}

double energy_form(const ExtensionSolution& a, const ExtensionSolution& b) {
  if (a.ymesh.size() != b.ymesh.size() || !(a.grid == b.grid))
    throw std::invalid_argument("energy_form: incompatible extension solutions");
  const int jmax = a.levels();
  const double sigma = a.sigma;
  std::vector<double> flux_c(jmax + 1, 0.0);
  for (int j = 1; j <= jmax; ++j)
    flux_c[j] = sigma / (std::pow(a.ymesh[j], sigma) - std::pow(a.ymesh[j - 1], sigma));
  std::vector<double> wint(jmax, 0.0);
  for (int j = 1; j < jmax; ++j) {
    double lo = 0.5 * (a.ymesh[j - 1] + a.ymesh[j]);
    double hi = 0.5 * (a.ymesh[j] + a.ymesh[j + 1]);
    wint[j] = (std::pow(hi, 2.0 - sigma) - std::pow(lo, 2.0 - sigma)) / (2.0 - sigma);
  }
  double total = 0.0;
  std::size_t nbins = a.grid.node_count();
  for (std::size_t bin = 0; bin < nbins; ++bin) {
    double w2 = omega_sq_of_bin(a.grid, bin);
    double s = 0.0;
    for (int j = 1; j <= jmax; ++j) {
      auto da = a.at(bin, j) - a.at(bin, j - 1);
      auto db = b.at(bin, j) - b.at(bin, j - 1);
      s += flux_c[j] * (da * std::conj(db)).real();
    }
    if (w2 != 0.0)
      for (int j = 1; j < jmax; ++j)
        s += w2 * wint[j] * (a.at(bin, j) * std::conj(b.at(bin, j))).real();
    total += s;
  }
  return a.grid.domain_volume() * total;
}

double weighted_energy(const ExtensionSolution& w) {
  return extension_constant(w.sigma) * energy_form(w, w);
}

CrossValidationReport cross_validate(const Field& g, double sigma, double height,
                                     int levels) {
  ExtensionSolution ext = extend(g, sigma, height, levels);
  Field flux = dtn_flux(ext);
  Spectrum g_hat = forward_transform(g);
  Spectrum f_hat = forward_transform(flux);
  const auto& gc = g_hat.fourier_coeffs();
  const auto& fc = f_hat.fourier_coeffs();
  double gmax = 0.0;
  for (const auto& c : gc) gmax = std::max(gmax, std::abs(c));

  CrossValidationReport rep;
  rep.truncation_warning = ext.truncation_warning;
  for (std::size_t bin = 0; bin < gc.size(); ++bin) {
    double w2 = omega_sq_of_bin(g.grid(), bin);
    if (w2 == 0.0 || std::abs(gc[bin]) < 1e-8 * gmax) continue;
    double target = std::pow(w2, 0.5 * sigma);
    double ratio = (fc[bin] / gc[bin]).real() / target;
    rep.mode_ratios.push_back(ratio);
    rep.mode_omegas.push_back(std::sqrt(w2));
    rep.max_rel_error = std::max(rep.max_rel_error, std::abs(ratio - 1.0));
  }
  return rep;
}

}  // namespace fpml

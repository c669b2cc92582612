#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fpml/extension.hpp"
#include "fpml/fft.hpp"
#include "fpml/operators.hpp"
#include "fpml/rng.hpp"

using namespace fpml;

namespace {
constexpr double kPi = std::numbers::pi;

Field band_limited(const Grid& g, std::uint64_t seed, int kmax) {
  Rng rng(seed);
  Field u(g);
  for (int k = 1; k <= kmax; ++k) {
    double a = rng.normal(), b = rng.normal();
    double w = kPi * k / g.half_length();
    for (int i = 0; i < g.points_per_dim(); ++i)
      u[i] += a * std::cos(w * g.coord(i)) + b * std::sin(w * g.coord(i));
  }
  return u;
}
}  // namespace

TEST_SUITE_BEGIN("cs_extension");

TEST_CASE("constants extend to constants with zero flux") {
  Grid g = Grid::make(1, kPi, 32, Boundary::PeriodicTorus);
  Field c(g, 2.5);
  ExtensionSolution ext = extend(c, 0.8, 8.0, 64);
  for (int j = 0; j <= ext.levels(); ++j)
    CHECK(ext.at(0, j).real() == doctest::Approx(2.5).epsilon(1e-13));
  Field flux = dtn_flux(ext);
  for (std::size_t i = 0; i < flux.size(); ++i) CHECK(std::abs(flux[i]) < 1e-12);
}

TEST_CASE("zero data give the zero solution") {
  Grid g = Grid::make(1, kPi, 32, Boundary::PeriodicTorus);
  ExtensionSolution ext = extend(Field(g), 1.2, 8.0, 64);
  for (std::size_t b = 0; b < g.node_count(); ++b)
    for (int j = 0; j <= ext.levels(); ++j) CHECK(std::abs(ext.at(b, j)) < 1e-14);
}

TEST_CASE("sigma = 1 mode profiles decay like exp(-|omega| y)") {
  Grid g = Grid::make(1, kPi, 32, Boundary::PeriodicTorus);
  Field u(g);
  double w = 2.0;
  for (int i = 0; i < 32; ++i) u[i] = std::cos(w * g.coord(i));
  ExtensionSolution ext = extend(u, 1.0, 8.0, 512);
  // the cos(2x) mode lives in bin 2
  for (int j = 8; j <= 256; j += 31) {
    double y = ext.ymesh[j];
    if (y > 3.0) break;
    double expect = 0.5 * std::exp(-w * y);
    CHECK(ext.at(2, j).real() == doctest::Approx(expect).epsilon(0.02));
  }
}

TEST_CASE("dtn flux reproduces the symbol on single modes") {
  Grid g = Grid::make(1, kPi, 32, Boundary::PeriodicTorus);
  for (double sigma : {0.6, 1.0, 1.5}) {
    Field u(g);
    double w = 2.0;
    for (int i = 0; i < 32; ++i) u[i] = std::cos(w * g.coord(i));
    ExtensionSolution ext = extend(u, sigma, 6.0 / 1.0, 256);
    Field flux = dtn_flux(ext);
    Field sym = apply_symbol(u, sigma);
    for (std::size_t i = 0; i < u.size(); ++i)
      CHECK(flux[i] == doctest::Approx(sym[i]).epsilon(0.02));
  }
}

TEST_CASE("dtn flux is linear") {
  Grid g = Grid::make(1, kPi, 32, Boundary::PeriodicTorus);
  Field a = band_limited(g, 1, 4), b = band_limited(g, 2, 4);
  Field ab(g);
  for (std::size_t i = 0; i < a.size(); ++i) ab[i] = a[i] + b[i];
  double sigma = 0.7, height = 8.0;
  Field fa = dtn_flux(extend(a, sigma, height, 128));
  Field fb = dtn_flux(extend(b, sigma, height, 128));
  Field fab = dtn_flux(extend(ab, sigma, height, 128));
  double scale = norm_lp(fab, 2.0) + 1.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(std::abs(fab[i] - fa[i] - fb[i]) <= 1e-12 * scale);
}

TEST_CASE("cross validation against the symbol") {
  Grid g = Grid::make(1, kPi, 64, Boundary::PeriodicTorus);
  Field u = band_limited(g, 3, 6);
  double height = default_extension_height(g);
  for (double sigma : {0.5, 1.5}) {
    CrossValidationReport rep = cross_validate(u, sigma, height, 512);
    CHECK(rep.max_rel_error <= 0.02);
  }
  // errors decrease monotonically with the vertical resolution
  std::vector<double> errs;
  for (int levels : {64, 128, 256})
    errs.push_back(cross_validate(u, 0.5, height, levels).max_rel_error);
  CHECK(errs[0] > errs[1]);
  CHECK(errs[1] > errs[2]);
}

TEST_CASE("discrete solutions are energy-orthogonal to zero-trace functions") {
  Grid g = Grid::make(1, kPi, 16, Boundary::PeriodicTorus);
  Field psi = band_limited(g, 11, 5);
  double sigma = 0.9;
  ExtensionSolution w = extend(psi, sigma, 8.0, 64);
  Rng rng(21);
  ExtensionSolution phi = w;  // same mesh/grid, profiles replaced
  for (std::size_t b = 0; b < g.node_count(); ++b) {
    for (int j = 0; j <= phi.levels(); ++j) {
      bool boundary = j == 0 || j == phi.levels();
      phi.profiles[b * phi.ymesh.size() + j] =
          boundary ? 0.0 : std::complex<double>(rng.normal(), rng.normal());
    }
  }
  double inner = energy_form(w, phi);
  double scale = std::sqrt(energy_form(w, w) * energy_form(phi, phi)) + 1e-30;
  CHECK(std::abs(inner) / scale <= 1e-10);
}

TEST_CASE("weighted energy approaches the fractional seminorm") {
  Grid g = Grid::make(1, kPi, 32, Boundary::PeriodicTorus);
  Field psi = band_limited(g, 31, 4);
  double sigma = 0.8;
  Spectrum s = forward_transform(psi);
  double target = 0.0;
  for (std::size_t i = 0; i < s.fourier_coeffs().size(); ++i) {
    double w = g.omega(static_cast<int>(i));
    target += g.domain_volume() * std::pow(std::abs(w), sigma) *
              std::norm(s.fourier_coeffs()[i]);
  }
  double coarse = weighted_energy(extend(psi, sigma, 8.0, 256));
  CHECK(coarse == doctest::Approx(target).epsilon(0.05));
  double fine = weighted_energy(extend(psi, sigma, 12.0, 1024));
  CHECK(std::abs(fine - target) < std::abs(coarse - target));
}

TEST_CASE("truncation warning and input validation") {
  Grid g = Grid::make(1, kPi, 16, Boundary::PeriodicTorus);
  Field u = band_limited(g, 4, 3);
  CHECK(extend(u, 1.0, 1.0, 64).truncation_warning);       // Y * omega_min = 1
  CHECK_FALSE(extend(u, 1.0, 8.0, 64).truncation_warning);  // = 8
  CHECK_THROWS_AS(extend(u, 1.0, 8.0, 16), std::invalid_argument);
  CHECK_THROWS_AS(extend(u, 1.0, -1.0, 64), std::invalid_argument);
  CHECK_THROWS_AS(extend(u, 2.0, 8.0, 64), std::invalid_argument);
}

TEST_SUITE_END();

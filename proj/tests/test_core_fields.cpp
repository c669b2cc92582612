#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "fpml/fft.hpp"
#include "fpml/field.hpp"
#include "fpml/grid.hpp"
#include "fpml/rng.hpp"

using namespace fpml;

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

Field random_field(const Grid& g, std::uint64_t seed) {
  Rng rng(seed);
  Field u(g);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = rng.normal();
  return u;
}
}  // namespace

TEST_SUITE_BEGIN("core_fields");

TEST_CASE("make_grid basic layout") {
  Grid g = Grid::make(1, kPi, 16, Boundary::PeriodicTorus);
  CHECK(g.spacing() == doctest::Approx(2.0 * kPi / 16).epsilon(1e-15));
  // frequencies are the integers -8..7 when L = pi
  CHECK(g.freq_index(0) == 0);
  CHECK(g.freq_index(7) == 7);
  CHECK(g.freq_index(8) == -8);
  CHECK(g.freq_index(15) == -1);
  CHECK(g.omega(1) == doctest::Approx(1.0));
  CHECK(g.omega(8) == doctest::Approx(-8.0));
  CHECK(g.node_count() == 16);
  CHECK(g.spacing() * g.points_per_dim() == doctest::Approx(2.0 * g.half_length()));
}

TEST_CASE("make_grid 2d") {
  Grid g = Grid::make(2, 1.0, 8, Boundary::PeriodicTorus);
  CHECK(g.node_count() == 64);
  CHECK(g.omega(1) == doctest::Approx(kPi));
  CHECK(g.omega(4) == doctest::Approx(-4.0 * kPi));
}

TEST_CASE("make_grid rejects bad input") {
  CHECK_THROWS_AS(Grid::make(1, 1.0, 7, Boundary::PeriodicTorus), std::invalid_argument);
  CHECK_THROWS_AS(Grid::make(1, 1.0, 9, Boundary::PeriodicTorus), std::invalid_argument);
  CHECK_THROWS_AS(Grid::make(1, 1.0, 4, Boundary::PeriodicTorus), std::invalid_argument);
  CHECK_THROWS_AS(Grid::make(1, -2.0, 16, Boundary::PeriodicTorus), std::invalid_argument);
  CHECK_THROWS_AS(Grid::make(3, 1.0, 16, Boundary::PeriodicTorus), std::invalid_argument);
}

TEST_CASE("dirichlet grid keeps interior nodes") {
  Grid g = Grid::make(1, 1.0, 16, Boundary::DirichletBox);
  CHECK(g.node_count() == 15);
  CHECK(g.coord(0) == doctest::Approx(-1.0 + g.spacing()));
  CHECK(g.coord(14) == doctest::Approx(1.0 - g.spacing()));
  CHECK(g.sine_rate(1) == doctest::Approx(kPi / 2.0));
}

TEST_CASE("constant field transforms to the zero mode") {
  Grid g = Grid::make(1, 2.0, 32, Boundary::PeriodicTorus);
  Field u(g, 3.25);
  Spectrum s = forward_transform(u);
  CHECK(s.at_freq(0).real() == doctest::Approx(3.25).epsilon(1e-13));
  double off = 0.0;
  for (int k = 1; k < 32; ++k) off = std::max(off, std::abs(s.fourier_coeffs()[k]));
  CHECK(off < 1e-13);
}

TEST_CASE("cosine transforms to two symmetric coefficients") {
  Grid g = Grid::make(1, kPi, 32, Boundary::PeriodicTorus);
  Field u(g);
  for (int i = 0; i < 32; ++i) u[i] = std::cos(3.0 * g.coord(i));
  Spectrum s = forward_transform(u);
  CHECK(s.at_freq(3).real() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(s.at_freq(-3).real() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(s.at_freq(2)) < 1e-13);
}

TEST_CASE("random round trip is the identity") {
  for (int dim : {1, 2}) {
    Grid g = Grid::make(dim, 1.5, 16, Boundary::PeriodicTorus);
    Field u = random_field(g, 42 + dim);
    Field v = inverse_transform(forward_transform(u));
    for (std::size_t i = 0; i < u.size(); ++i)
      CHECK(v[i] == doctest::Approx(u[i]).epsilon(1e-12));
  }
}

TEST_CASE("dirichlet round trip and Parseval") {
  for (int dim : {1, 2}) {
    Grid g = Grid::make(dim, 1.0, 16, Boundary::DirichletBox);
    Field u = random_field(g, 7 + dim);
    Spectrum s = forward_transform(u);
    Field v = inverse_transform(s);
    for (std::size_t i = 0; i < u.size(); ++i)
      CHECK(v[i] == doctest::Approx(u[i]).epsilon(1e-12));
    CHECK(s.l2_norm() == doctest::Approx(norm_lp(u, 2.0)).epsilon(1e-12));
  }
}

TEST_CASE("transform unitarity over an ensemble") {
  Grid g = Grid::make(1, 3.0, 64, Boundary::PeriodicTorus);
  for (int trial = 0; trial < 100; ++trial) {
    Field u = random_field(g, 1000 + trial);
    double a = norm_lp(u, 2.0);
    double b = forward_transform(u).l2_norm();
    CHECK(std::abs(a - b) <= 1e-12 * std::max(a, 1.0));
  }
}

TEST_CASE("mass equals the zero coefficient times the volume") {
  Grid g = Grid::make(1, 2.5, 64, Boundary::PeriodicTorus);
  Field u = random_field(g, 5);
  Spectrum s = forward_transform(u);
  double via_spec = s.at_freq(0).real() * g.domain_volume();
  CHECK(mass(u) == doctest::Approx(via_spec).epsilon(1e-12));
}

TEST_CASE("mass of odd data vanishes; sign flips") {
  Grid g = Grid::make(1, kPi, 64, Boundary::PeriodicTorus);
  Field u(g);
  for (int i = 0; i < 64; ++i) u[i] = std::sin(2.0 * g.coord(i));
  CHECK(std::abs(mass(u)) < 1e-13);
  Field v = random_field(g, 9);
  Field neg(g);
  for (std::size_t i = 0; i < v.size(); ++i) neg[i] = -v[i];
  CHECK(mass(neg) == doctest::Approx(-mass(v)).epsilon(1e-14));
}

TEST_CASE("norms: basic values and rejection") {
  Grid g = Grid::make(1, 1.0, 16, Boundary::PeriodicTorus);
  Field zero(g);
  CHECK(norm_lp(zero, 1.0) == 0.0);
  CHECK(norm_lp(zero, kInf) == 0.0);
  Field one(g, 1.0);
  CHECK(norm_lp(one, 1.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK_THROWS_AS(norm_lp(one, 0.5), std::invalid_argument);
  Field u = random_field(g, 11);
  double parseval = forward_transform(u).l2_norm();
  CHECK(norm_lp(u, 2.0) * norm_lp(u, 2.0) ==
        doctest::Approx(parseval * parseval).epsilon(1e-12));
}

TEST_CASE("norm monotone in pointwise magnitude") {
  Grid g = Grid::make(1, 1.0, 32, Boundary::PeriodicTorus);
  Rng rng(3);
  Field u = random_field(g, 13);
  Field v(g);
  for (std::size_t i = 0; i < u.size(); ++i)
    v[i] = u[i] * (1.0 + rng.uniform());  // same sign, larger magnitude
  for (double p : {1.0, 1.7, 2.0, 3.0, kInf})
    CHECK(norm_lp(u, p) <= norm_lp(v, p) + 1e-14);
}

TEST_CASE("field length must match the grid") {
  Grid g = Grid::make(1, 1.0, 16, Boundary::PeriodicTorus);
  CHECK_THROWS_AS(Field(g, std::vector<double>(15, 0.0)), std::invalid_argument);
}

TEST_SUITE_END();

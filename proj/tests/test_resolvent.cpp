#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "fpml/resolvent.hpp"
#include "fpml/rng.hpp"

using namespace fpml;

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

Field bump(const Grid& g, double center, double width, double target_mass) {
  Field u(g);
  for (int i = 0; i < g.nodes_per_dim(); ++i) {
    double x = g.coord(i) - center;
    u[i] = std::exp(-x * x / (2.0 * width * width));
  }
  double m0 = mass(u);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] *= target_mass / m0;
  return u;
}

Field random_smooth(const Grid& g, std::uint64_t seed) {
  Rng rng(seed);
  Field u(g);
  for (int k = 1; k <= 6; ++k) {
    double a = rng.normal() / k, b = rng.normal() / k;
    double w = kPi * k / g.half_length();
    for (int i = 0; i < g.points_per_dim(); ++i)
      u[i] += a * std::cos(w * g.coord(i)) + b * std::sin(w * g.coord(i));
  }
  return u;
}

// Unpreconditioned damped Richardson iteration: the brute-force oracle.
// Deliberately ignorant of the production solver's machinery.
Field brute_force_resolvent(const Field& g, double tau, double m,
                            const FracOperator& op, int iters) {
  std::vector<double> u = g.values();
  double sup = norm_lp(g, kInf);
  double lam_max = std::pow(kPi / g.grid().spacing(), op.sigma());
  double slope = m >= 1.0 ? m * std::pow(std::max(sup, 1e-12), m - 1.0) : 1e3;
  double theta = 1.0 / (1.0 + tau * lam_max * slope);
  Field cur(g.grid(), u);
  for (int it = 0; it < iters; ++it) {
    Field au = op.apply(pow_signed(cur, m));
    double r2 = 0.0;
    for (std::size_t i = 0; i < cur.size(); ++i) {
      double res = cur[i] + tau * au[i] - g[i];
      cur[i] -= theta * res;
      r2 += res * res;
    }
    if (std::sqrt(g.grid().cell_volume() * r2) < 1e-11) break;
  }
  return cur;
}
}  // namespace

TEST_SUITE_BEGIN("resolvent_solver");

TEST_CASE("linear resolvent closed form") {
  Grid g = Grid::make(1, kPi, 64, Boundary::PeriodicTorus);
  Field c(g, 4.0);
  Field rc = resolvent_linear(c, 0.3, 1.0);
  for (std::size_t i = 0; i < rc.size(); ++i)
    CHECK(rc[i] == doctest::Approx(4.0).epsilon(1e-13));

  Field u(g);
  for (int i = 0; i < 64; ++i) u[i] = std::cos(3.0 * g.coord(i));
  double tau = 0.2, sigma = 1.4;
  Field ru = resolvent_linear(u, tau, sigma);
  double factor = 1.0 / (1.0 + tau * std::pow(3.0, sigma));
  for (std::size_t i = 0; i < u.size(); ++i)
    CHECK(ru[i] == doctest::Approx(factor * u[i]).epsilon(1e-12));

  Field tiny = resolvent_linear(u, 1e-13, sigma);
  for (std::size_t i = 0; i < u.size(); ++i)
    CHECK(std::abs(tiny[i] - u[i]) < 1e-12);
  CHECK_THROWS_AS(resolvent_linear(u, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("newton at m = 1 agrees with the closed form") {
  Grid g = Grid::make(1, kPi, 64, Boundary::PeriodicTorus);
  Field f = random_smooth(g, 17);
  double tau = 0.25, sigma = 1.0;
  FracParams params = FracParams::make(1, sigma, 1.0);
  FracOperator op(g, sigma, OperatorMode::Symbol);
  auto [u, rep] = resolvent(f, tau, params, op);
  CHECK(rep.converged);
  Field lin = resolvent_linear(f, tau, sigma);
  CHECK(norm_l1_diff(u, lin) < 1e-10);
}

TEST_CASE("order preservation against zero") {
  Grid g = Grid::make(1, 5.0, 64, Boundary::PeriodicTorus);
  Field f = bump(g, 0.0, 0.7, 1.0);
  FracParams params = FracParams::make(1, 1.0, 2.0);
  FracOperator op(g, 1.0, OperatorMode::KernelTorus);
  auto [u, rep] = resolvent(f, 0.5, params, op);
  CHECK(rep.converged);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(u[i] >= -1e-12);
}

TEST_CASE("discrete delta source: peak, monotone tails, brute-force oracle") {
  Grid g = Grid::make(1, kPi, 32, Boundary::PeriodicTorus);
  Field f(g);
  f[16] = 1.0 / g.spacing();  // discrete delta at x = 0 + h*0
  double tau = 0.01;
  FracParams params = FracParams::make(1, 1.0, 2.0);
  FracOperator op(g, 1.0, OperatorMode::KernelTorus);
  auto [u, rep] = resolvent(f, tau, params, op);
  CHECK(rep.converged);
  std::size_t arg = 0;
  for (std::size_t i = 0; i < u.size(); ++i)
    if (u[i] > u[arg]) arg = i;
  CHECK(arg == 16);
  for (int d = 1; d < 15; ++d) {  // radially monotone on both sides
    CHECK(u[16 + d] <= u[16 + d - 1] + 1e-12);
    CHECK(u[16 - d] <= u[16 - d + 1] + 1e-12);
  }
  Field oracle = brute_force_resolvent(f, tau, 2.0, op, 200000);
  CHECK(norm_l1_diff(u, oracle) < 1e-6);
}

TEST_CASE("fast-diffusion branch solves in the pressure variable") {
  Grid g = Grid::make(1, 5.0, 64, Boundary::PeriodicTorus);
  Field f = bump(g, 0.3, 0.8, 1.0);
  double tau = 0.2;
  FracParams params = FracParams::make(1, 0.8, 0.5);
  FracOperator op(g, 0.8, OperatorMode::KernelTorus);
  auto [u, rep] = resolvent(f, tau, params, op);
  CHECK(rep.converged);
  CHECK(rep.final_residual <= 4e-10);
  Field oracle = brute_force_resolvent(f, tau, 0.5, op, 400000);
  CHECK(norm_l1_diff(u, oracle) < 1e-6);
}

TEST_CASE("t-contraction gap and L1 nonexpansiveness") {
  Grid g = Grid::make(1, 5.0, 64, Boundary::PeriodicTorus);
  FracOperator op(g, 1.0, OperatorMode::KernelTorus);
  SUBCASE("identical data") {
    Field f = random_smooth(g, 5);
    FracParams params = FracParams::make(1, 1.0, 2.0);
    CHECK(t_contraction_gap(f, f, 0.1, params, op) <= 1e-10);
  }
  SUBCASE("ordered data") {
    Rng rng(8);
    Field f2 = random_smooth(g, 6);
    Field f1(g);
    for (std::size_t i = 0; i < f1.size(); ++i) f1[i] = f2[i] + rng.uniform();
    FracParams params = FracParams::make(1, 1.0, 2.0);
    auto [u1, r1] = resolvent(f1, 0.1, params, op);
    auto [u2, r2] = resolvent(f2, 0.1, params, op);
    CHECK(positive_part_integral(u1, u2) <=
          positive_part_integral(f1, f2) + 1e-8);
  }
  SUBCASE("random ensemble across m") {
    for (double m : {0.5, 1.0, 2.0, 3.0}) {
      FracParams params = FracParams::make(1, 1.0, m);
      for (int trial = 0; trial < 20; ++trial) {
        Field f1 = random_smooth(g, 100 + trial);
        Field f2 = random_smooth(g, 200 + trial);
        double gap = t_contraction_gap(f1, f2, 0.1, params, op);
        CHECK(gap <= 1e-8);
        auto [u1, r1] = resolvent(f1, 0.1, params, op);
        auto [u2, r2] = resolvent(f2, 0.1, params, op);
        CHECK(norm_l1_diff(u1, u2) <= norm_l1_diff(f1, f2) + 2e-8);
        CHECK(norm_lp(u1, kInf) <= norm_lp(f1, kInf) + 1e-9);
      }
    }
  }
}

TEST_CASE("implicit step conserves the mean exactly") {
  Grid g = Grid::make(1, 5.0, 64, Boundary::PeriodicTorus);
  Field f = random_smooth(g, 23);
  for (double m : {0.5, 1.0, 2.0}) {
    for (OperatorMode mode : {OperatorMode::Symbol, OperatorMode::KernelTorus}) {
      FracParams params = FracParams::make(1, 1.2, m);
      FracOperator op(g, 1.2, mode);
      auto [u, rep] = resolvent(f, 0.3, params, op);
      CHECK(rep.converged);
      CHECK(mass(u) == doctest::Approx(mass(f)).epsilon(1e-13));
    }
  }
}

TEST_CASE("newton exhibits a quadratic tail on smooth slow diffusion") {
  Grid g = Grid::make(1, 5.0, 128, Boundary::PeriodicTorus);
  Field f = bump(g, 0.0, 1.0, 1.0);
  FracParams params = FracParams::make(1, 1.0, 2.0);
  FracOperator op(g, 1.0, OperatorMode::Symbol);
  ResolventOptions opts;
  opts.residual_tol_abs = 1e-13;
  auto [u, rep] = resolvent(f, 0.5, params, op, opts);
  CHECK(rep.converged);
  bool in_tail = false;
  for (std::size_t k = 1; k < rep.residual_history.size(); ++k) {
    if (in_tail && rep.residual_history[k - 1] > 1e-14)
      CHECK(rep.residual_history[k] / rep.residual_history[k - 1] <= 0.3);
    if (rep.residual_history[k] < 1e-4) in_tail = true;
  }
}

TEST_CASE("fixed-point cross check agrees with newton") {
  Grid g = Grid::make(1, 5.0, 32, Boundary::PeriodicTorus);
  Field f = bump(g, 0.0, 1.0, 1.0);
  FracParams params = FracParams::make(1, 1.0, 2.0);
  FracOperator op(g, 1.0, OperatorMode::KernelTorus);
  ResolventOptions opts;
  opts.cross_check_fixed_point = true;
  auto [u, rep] = resolvent(f, 0.2, params, op, opts);
  CHECK(rep.converged);
  CHECK(rep.fixed_point_disagreement == rep.fixed_point_disagreement);  // not NaN
  CHECK(rep.fixed_point_disagreement < 1e-6);
}

TEST_CASE("2d implicit step: convergence, mean conservation, contraction") {
  Grid g = Grid::make(2, 3.0, 16, Boundary::PeriodicTorus);
  Rng rng(31);
  Field f1(g), f2(g);
  double xy[2];
  for (std::size_t i = 0; i < f1.size(); ++i) {
    node_coords(g, i, xy);
    double r2 = xy[0] * xy[0] + xy[1] * xy[1];
    f1[i] = std::exp(-r2) + 0.1 * rng.normal();
    f2[i] = 0.8 * std::exp(-r2 / 2.0);
  }
  FracParams params = FracParams::make(2, 1.0, 2.0);
  FracOperator op(g, 1.0, OperatorMode::KernelTorus);
  auto [u1, r1] = resolvent(f1, 0.2, params, op);
  CHECK(r1.converged);
  CHECK(mass(u1) == doctest::Approx(mass(f1)).epsilon(1e-13));
  CHECK(t_contraction_gap(f1, f2, 0.2, params, op) <= 1e-8);
}

TEST_CASE("argument validation and failure reporting") {
  Grid g = Grid::make(1, 5.0, 32, Boundary::PeriodicTorus);
  Field f = bump(g, 0.0, 1.0, 1.0);
  FracParams params = FracParams::make(1, 1.0, 2.0);
  FracOperator op(g, 1.0, OperatorMode::Symbol);
  CHECK_THROWS_AS(resolvent(f, -0.1, params, op), std::invalid_argument);
  Field bad = f;
  bad[3] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS(resolvent(bad, 0.1, params, op));
  // unreachable tolerance: flagged report, no exception
  ResolventOptions opts;
  opts.residual_tol_abs = 1e-30;
  opts.max_newton_iters = 5;
  auto [u, rep] = resolvent(f, 0.1, params, op, opts);
  CHECK_FALSE(rep.converged);
}

TEST_SUITE_END();

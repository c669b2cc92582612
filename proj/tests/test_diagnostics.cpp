#include <doctest.h>

#include <cmath>
#include <limits>

#include "fpml/diagnostics.hpp"
#include "fpml/reference.hpp"

using namespace fpml;

namespace {
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

Trajectory short_run(double m, double sigma, OperatorMode mode, int steps = 16,
                     double t_final = 0.25) {
  Grid g = Grid::make(1, 5.0, 64, mode == OperatorMode::KernelFreeSpace
                                      ? Boundary::FreeSpaceWindow
                                      : Boundary::PeriodicTorus);
  Field f = bump(g, 0.0, 0.6, 1.0);
  FracParams params = FracParams::make(1, sigma, m);
  FracOperator op(g, sigma, mode);
  return evolve(f, Schedule::uniform(t_final, steps, steps), params, op);
}
}  // namespace

TEST_SUITE_BEGIN("diagnostics");

TEST_CASE("series rows follow the snapshots") {
  Trajectory traj = short_run(2.0, 1.0, OperatorMode::KernelTorus);
  DiagnosticsSeries s = run_diagnostics(traj);
  CHECK(s.rows.size() == traj.snapshots.size());
  for (std::size_t k = 1; k < s.rows.size(); ++k)
    CHECK(s.rows[k].t > s.rows[k - 1].t);
  CHECK(s.rows.front().energy == 0.0);
  CHECK(s.rows.back().energy > 0.0);
  // zero trajectory: all-zero rows
  Grid g = Grid::make(1, 5.0, 32, Boundary::PeriodicTorus);
  FracParams params = FracParams::make(1, 1.0, 2.0);
  FracOperator op(g, 1.0, OperatorMode::Symbol);
  DiagnosticsSeries z =
      run_diagnostics(evolve(Field(g), Schedule::uniform(0.1, 4, 2), params, op));
  for (const auto& r : z.rows) {
    CHECK(r.l1 == 0.0);
    CHECK(r.linf == 0.0);
    CHECK(r.energy == 0.0);
  }
}

TEST_CASE("mass verdict: torus conserves for every m") {
  for (double m : {0.4, 1.0, 2.0}) {
    Trajectory traj = short_run(m, 1.0, OperatorMode::KernelTorus);
    Verdict v = check_mass(run_diagnostics(traj));
    CHECK(v.claim == "mass-conservation");
    CHECK(v.pass);
    CHECK(v.measured <= 1e-10);
  }
}

TEST_CASE("mass verdict: subcritical free space decays strictly") {
  Trajectory traj = short_run(1.0 / 3.0, 0.5, OperatorMode::KernelFreeSpace, 24, 0.5);
  Verdict v = check_mass(run_diagnostics(traj));
  CHECK(v.claim == "mass-decay-subcritical");
  CHECK(v.pass);
}

TEST_CASE("lp monotonicity verdicts") {
  Trajectory traj = short_run(2.0, 1.0, OperatorMode::KernelTorus);
  DiagnosticsSeries s = run_diagnostics(traj);
  for (double p : {1.0, 2.0, 3.0, kInf}) {
    Verdict v = check_lp_monotone(s, p);
    CHECK(v.pass);
  }
  CHECK_THROWS_AS(check_lp_monotone(s, 1.7), std::invalid_argument);
  // the zero trajectory passes vacuously
  {
    Grid g = Grid::make(1, 5.0, 32, Boundary::PeriodicTorus);
    FracParams params = FracParams::make(1, 1.0, 2.0);
    FracOperator op(g, 1.0, OperatorMode::Symbol);
    DiagnosticsSeries z =
        run_diagnostics(evolve(Field(g), Schedule::uniform(0.1, 4, 4), params, op));
    CHECK(check_lp_monotone(z, 1.0).pass);
    CHECK(check_lp_monotone(z, kInf).pass);
  }
  // a fabricated increasing series must fail
  DiagnosticsSeries fake = s;
  fake.rows[3].l2 = fake.rows[2].l2 * 2.0;
  CHECK_FALSE(check_lp_monotone(fake, 2.0).pass);
}

TEST_CASE("positivity floor holds along slow-diffusion flows") {
  Trajectory traj = short_run(2.0, 1.0, OperatorMode::KernelTorus);
  Verdict v = check_positivity(traj);
  CHECK(v.pass);
}

TEST_CASE("homogeneity and retention verdicts") {
  Trajectory traj = short_run(2.0, 1.0, OperatorMode::KernelTorus, 32, 0.5);
  CHECK(check_homogeneity(traj).pass);
  CHECK(check_retention(traj).pass);
  Trajectory fast = short_run(0.5, 1.0, OperatorMode::KernelTorus, 32, 0.5);
  CHECK_THROWS_AS(check_retention(fast), std::invalid_argument);
  CHECK(check_homogeneity(fast).pass);
}

TEST_CASE("time derivative quotients obey the 2/(|m-1| t) envelope") {
  for (double m : {0.5, 1.0, 2.0}) {
    Trajectory traj = short_run(m, 1.0, OperatorMode::KernelTorus, 32, 0.5);
    DiagnosticsSeries s = run_diagnostics(traj);
    Verdict v = check_time_derivative_bound(s, traj);
    CHECK(v.pass);
  }
}

TEST_CASE("m = 1 increment quotients against the exact spectral evolution") {
  // || u(t+d) - u(t) ||_1 / d for the closed-form linear flow stays under
  // 2N/(sigma t) ||f||_1 without any safety factor
  Grid g = Grid::make(1, 10.0, 256, Boundary::PeriodicTorus);
  double sigma = 1.2;
  Field f = heat_kernel(g, sigma, 0.4);
  double f1 = norm_lp(f, 1.0);
  for (double t : {0.2, 0.5, 1.0}) {
    double d = 1e-4;
    Field a = linear_solution(f, t, sigma);
    Field b = linear_solution(f, t + d, sigma);
    double quotient = norm_l1_diff(b, a) / d;
    CHECK(quotient <= 2.0 * 1.0 / (sigma * t) * f1);
  }
}

TEST_CASE("extinction detection returns nothing above m = 1") {
  Trajectory traj = short_run(2.0, 1.0, OperatorMode::KernelTorus);
  DiagnosticsSeries s = run_diagnostics(traj);
  CHECK_FALSE(detect_extinction(s, 1e-8 * s.initial_linf).has_value());
}

TEST_CASE("smoothing fit requires enough snapshots") {
  Trajectory traj = short_run(2.0, 1.0, OperatorMode::KernelTorus, 4, 0.1);
  DiagnosticsSeries s = run_diagnostics(traj);
  CHECK_THROWS_AS(fit_smoothing_rate(s, 1.0, FitWindow{0.09, 0.1}),
                  std::invalid_argument);
}

TEST_CASE("measured slacks track solver tolerance and step count") {
  // with the mean repair off, the mass drift is pure solver noise: it must
  // stay under a per-step envelope linear in both the tolerance and n
  Grid g = Grid::make(1, 5.0, 64, Boundary::PeriodicTorus);
  Field f = bump(g, 0.0, 0.7, 1.0);
  FracParams params = FracParams::make(1, 1.0, 2.0);
  FracOperator op(g, 1.0, OperatorMode::Symbol);
  auto drift_at = [&](double tol, int steps) {
    ResolventOptions opts;
    opts.residual_tol_abs = tol;
    opts.repair_mean = false;
    Trajectory traj = evolve(f, Schedule::uniform(0.25, steps, 4), params, op, opts);
    double worst = 0.0;
    for (const auto& e : traj.snapshots)
      worst = std::max(worst, std::abs(mass(e.u) - mass(f)));
    return worst;
  };
  double envelope = std::sqrt(g.domain_volume());  // |mass err| <= sqrt(vol)*residual
  double loose8 = drift_at(1e-6, 8);
  double tight8 = drift_at(1e-12, 8);
  double loose16 = drift_at(1e-6, 16);
  CHECK(loose8 <= 8 * 1e-6 * envelope);
  CHECK(tight8 <= 8 * 1e-12 * envelope);
  CHECK(loose16 <= 16 * 1e-6 * envelope);
  CHECK(tight8 < loose8);  // tighter tolerance leaves a smaller gap
}

TEST_CASE("continuity ladder: identical parameters give zero distance") {
  Grid g = Grid::make(1, 5.0, 32, Boundary::PeriodicTorus);
  Field f = bump(g, 0.0, 0.7, 1.0);
  std::vector<FracParams> ladder = {
      FracParams::make(1, 1.0, 2.0), FracParams::make(1, 1.0, 1.9),
      FracParams::make(1, 1.0, 1.85), FracParams::make(1, 1.0, 1.85)};
  ContinuityResult c = parameter_continuity(f, ladder, 0.1, 8, OperatorMode::Symbol);
  CHECK(c.to_reference.back() == 0.0);
  CHECK(c.sup_distance[0][1] > 0.0);
}

TEST_SUITE_END();

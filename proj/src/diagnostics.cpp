#include "fpml/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace fpml {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}
}  // namespace

DiagnosticsSeries run_diagnostics(const Trajectory& traj) {
  if (traj.snapshots.empty()) throw std::invalid_argument("empty trajectory");
  DiagnosticsSeries s;
  s.params = traj.params;
  s.mode = traj.mode;
  s.tau = traj.tau;
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    const auto& e = traj.snapshots[k];
    DiagnosticsRow r;
    r.t = e.t;
    r.mass = mass(e.u);
    r.l1 = norm_lp(e.u, 1.0);
    r.l2 = norm_lp(e.u, 2.0);
    r.lmp1 = norm_lp(e.u, traj.params.m + 1.0);
    r.linf = norm_lp(e.u, kInf);
    r.min_u = *std::min_element(e.u.values().begin(), e.u.values().end());
    r.energy = traj.energy[k];
    s.rows.push_back(r);
  }
  s.initial_l1 = s.rows.front().l1;
  s.initial_linf = s.rows.front().linf;
  s.volume = traj.initial().grid().domain_volume();
  return s;
}

Verdict check_mass(const DiagnosticsSeries& s, double tolerance) {
  Verdict v;
  v.name = "mass";
  const auto& rows = s.rows;
  double m0 = rows.front().mass;
  double scale = std::max(std::abs(m0), 1e-30);
  FracParams p = s.params;

  // mean conservation is structural on the torus, for every m
  if (s.mode == OperatorMode::Symbol || s.mode == OperatorMode::KernelTorus) {
    v.claim = "mass-conservation";
    double drift = 0.0;
    for (const auto& r : rows) drift = std::max(drift, std::abs(r.mass - m0));
    v.measured = drift / scale;
    v.tolerance = tolerance;
    v.pass = v.measured <= tolerance;
    return v;
  }

  if (s.mode == OperatorMode::KernelFreeSpace && p.m < p.m_star()) {
    v.claim = "mass-decay-subcritical";
    double worst = -kInf;  // largest increase between snapshots
    for (std::size_t k = 1; k < rows.size(); ++k)
      worst = std::max(worst, rows[k].mass - rows[k - 1].mass);
    v.measured = worst / scale;
    v.tolerance = 0.0;
    v.pass = worst < 0.0;
    v.detail = "mass must decrease strictly; worst step change " + fmt(worst);
    return v;
  }

  if (s.mode == OperatorMode::KernelFreeSpace && p.m > p.m_star()) {
    v.claim = "mass-conservation";
    double drift = 0.0;
    for (const auto& r : rows) drift = std::max(drift, std::abs(r.mass - m0));
    // window-flux bound T R^{-sigma+N(ph-1)/ph} ||f||_inf^{m-1/ph} ||f||_1^{1/ph},
    // with ph = max(1, 1/m) and a safety factor absorbing the cutoff norms
    double ph = std::max(1.0, 1.0 / p.m);
    double radius = 0.5 * std::pow(s.volume, 1.0 / p.dim);
    double bound = 3.0 * rows.back().t *
                   std::pow(radius, -p.sigma + p.dim * (ph - 1.0) / ph) *
                   std::pow(s.initial_linf, p.m - 1.0 / ph) *
                   std::pow(s.initial_l1, 1.0 / ph);
    v.measured = drift / scale;
    v.tolerance = (tolerance * scale + bound) / scale;
    v.pass = drift <= tolerance * scale + bound;
    v.detail = "free-space drift " + fmt(drift) + ", flux bound " + fmt(bound);
    return v;
  }

  // Dirichlet / critical free-space: only monotone decay is asserted
  v.claim = "mass-decay";
  double worst = -kInf;
  for (std::size_t k = 1; k < rows.size(); ++k)
    worst = std::max(worst, rows[k].mass - rows[k - 1].mass);
  v.measured = worst / scale;
  v.tolerance = tolerance;
  v.pass = worst <= tolerance * scale;
  return v;
}

Verdict check_lp_monotone(const DiagnosticsSeries& s, double p, double per_step_slack) {
  Verdict v;
  v.name = "lp-monotone(p=" + fmt(p) + ")";
  v.claim = "lp-monotonicity";
  auto column = [&](const DiagnosticsRow& r) {
    if (p == 1.0) return r.l1;
    if (p == 2.0) return r.l2;
    if (std::isinf(p)) return r.linf;
    if (std::abs(p - (s.params.m + 1.0)) < 1e-12) return r.lmp1;
    throw std::invalid_argument("check_lp_monotone: untracked p");
  };
  double scale = std::max(column(s.rows.front()), 1e-30);
  double steps_per_gap = 0.0, worst = -kInf;
  for (std::size_t k = 1; k < s.rows.size(); ++k) {
    steps_per_gap = std::max(1.0, (s.rows[k].t - s.rows[k - 1].t) / s.tau);
    double inc = (column(s.rows[k]) - column(s.rows[k - 1])) / (scale * steps_per_gap);
    worst = std::max(worst, inc);
  }
  v.measured = worst;
  v.tolerance = per_step_slack;
  v.pass = worst <= per_step_slack;
  return v;
}

namespace {
// aligns snapshots of two trajectories by time; returns common indices
std::vector<std::pair<std::size_t, std::size_t>> align(const Trajectory& a,
                                                       const Trajectory& b) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t j = 0;
  for (std::size_t i = 0; i < a.snapshots.size(); ++i) {
    while (j < b.snapshots.size() && b.snapshots[j].t < a.snapshots[i].t - 1e-12) ++j;
    if (j < b.snapshots.size() && std::abs(b.snapshots[j].t - a.snapshots[i].t) < 1e-12)
      out.emplace_back(i, j);
  }
  return out;
}
}  // namespace

Verdict check_l1_contraction(const Trajectory& a, const Trajectory& b,
                             double per_step_slack) {
  Verdict v;
  v.name = "l1-order-contraction";
  v.claim = "l1-order-contraction";
  auto pairs = align(a, b);
  if (pairs.size() < 2) throw std::invalid_argument("trajectories share too few times");
  double scale = std::max(norm_lp(a.initial(), 1.0) + norm_lp(b.initial(), 1.0), 1e-30);
  double worst = -kInf;
  double prev = positive_part_integral(a.snapshots[pairs[0].first].u,
                                       b.snapshots[pairs[0].second].u);
  double prev_t = a.snapshots[pairs[0].first].t;
  for (std::size_t k = 1; k < pairs.size(); ++k) {
    double cur = positive_part_integral(a.snapshots[pairs[k].first].u,
                                        b.snapshots[pairs[k].second].u);
    double t = a.snapshots[pairs[k].first].t;
    double nsteps = std::max(1.0, (t - prev_t) / a.tau);
    worst = std::max(worst, (cur - prev) / (scale * nsteps));
    prev = cur;
    prev_t = t;
  }
  v.measured = worst;
  v.tolerance = per_step_slack;
  v.pass = worst <= per_step_slack;
  return v;
}

Verdict check_comparison(const Trajectory& a, const Trajectory& b,
                         double per_step_slack) {
  Verdict v;
  v.name = "comparison";
  v.claim = "comparison-principle";
  for (std::size_t i = 0; i < a.initial().size(); ++i)
    if (a.initial()[i] < b.initial()[i] - 1e-14)
      throw std::invalid_argument("check_comparison needs ordered data f_a >= f_b");
  auto pairs = align(a, b);
  double scale = std::max(norm_lp(a.initial(), kInf), 1e-30);
  double worst = -kInf;  // most negative (u_a - u_b), scaled
  for (auto [i, j] : pairs) {
    double nsteps = std::max(1.0, a.snapshots[i].t / a.tau);
    const Field& ua = a.snapshots[i].u;
    const Field& ub = b.snapshots[j].u;
    for (std::size_t q = 0; q < ua.size(); ++q)
      worst = std::max(worst, (ub[q] - ua[q]) / (scale * nsteps));
  }
  v.measured = worst;
  v.tolerance = per_step_slack;
  v.pass = worst <= per_step_slack;
  return v;
}

SmoothingFit smoothing_slope(const DiagnosticsSeries& s, FitWindow window) {
  SmoothingFit fit;
  const auto& rows = s.rows;
  if (window.t_max <= window.t_min) {
    // automatic window: after the initial transient has smoothed the datum,
    // before the sup norm approaches the all-spread level mass/(2L)^N
    window.t_min = 5.0 * s.tau;
    window.t_max = rows.back().t;
    for (const auto& r : rows) {
      if (r.t <= 0) continue;
      if (r.linf <= 0.6 * s.initial_linf) {
        window.t_min = std::max(window.t_min, r.t);
        break;
      }
    }
    double flat_level = std::abs(rows.front().mass) / s.volume;
    if (flat_level > 0) {
      for (const auto& r : rows) {
        if (r.t <= window.t_min) continue;
        if (r.linf <= 8.0 * flat_level) {
          window.t_max = r.t;
          break;
        }
      }
    }
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& r : rows) {
    if (r.t < window.t_min || r.t > window.t_max || r.t <= 0 || r.linf <= 0) continue;
    double x = std::log(r.t), y = std::log(r.linf);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  fit.points = n;
  fit.t_min = window.t_min;
  fit.t_max = window.t_max;
  if (n >= 4) {
    double denom = n * sxx - sx * sx;
    if (denom > 0) {
      fit.slope = (n * sxy - sx * sy) / denom;
      fit.valid = true;
    }
  }
  return fit;
}

Verdict fit_smoothing_rate(const DiagnosticsSeries& s, double p, FitWindow window) {
  Verdict v;
  v.name = "smoothing-rate";
  v.claim = "linf-smoothing-rate";
  SmoothingFit fit = smoothing_slope(s, window);
  if (!fit.valid)
    throw std::invalid_argument("smoothing window holds fewer than 4 usable snapshots");
  double gamma = s.params.gamma_p(p);
  v.measured = fit.slope;
  v.tolerance = 0.15;
  v.pass = fit.slope >= -gamma - 0.15;
  v.detail = "window [" + fmt(fit.t_min) + ", " + fmt(fit.t_max) + "], points " +
             std::to_string(fit.points) + ", target " + fmt(-gamma) +
             ", two-sided gap " + fmt(std::abs(fit.slope + gamma));
  return v;
}

std::optional<double> detect_extinction(const DiagnosticsSeries& s, double tol) {
  for (const auto& r : s.rows)
    if (r.t > 0 && r.linf < tol) return r.t;
  return std::nullopt;
}

Verdict check_positivity(const Trajectory& traj, double floor_rel) {
  Verdict v;
  v.name = "positivity";
  v.claim = "positivity";
  const Field& f = traj.initial();
  double fmax = norm_lp(f, kInf);
  for (double x : f.values())
    if (x < 0) throw std::invalid_argument("check_positivity needs f >= 0");
  if (fmax == 0.0) {  // vacuous
    v.pass = true;
    v.measured = 0.0;
    v.detail = "zero datum, vacuous";
    return v;
  }
  double worst = kInf;  // min over snapshots of min_u / (floor_rel * sup)
  for (std::size_t k = 1; k < traj.snapshots.size(); ++k) {
    const Field& u = traj.snapshots[k].u;
    double sup = norm_lp(u, kInf);
    if (traj.extinction_time >= 0 && traj.snapshots[k].t >= traj.extinction_time) break;
    double mn = *std::min_element(u.values().begin(), u.values().end());
    worst = std::min(worst, mn / (floor_rel * std::max(sup, 1e-300)));
  }
  v.measured = worst;
  v.tolerance = 1.0;
  v.pass = worst >= 1.0;
  v.detail = "min u over grid, in units of the floor " + fmt(floor_rel) + "*sup";
  return v;
}

Verdict check_time_derivative_bound(const DiagnosticsSeries& s, const Trajectory& traj,
                                    double safety) {
  Verdict v;
  v.name = "time-derivative-bound";
  v.claim = "time-derivative-bound";
  const double m = s.params.m;
  double f1 = s.initial_l1;
  double worst = -kInf;
  for (std::size_t k = 2; k < traj.snapshots.size(); ++k) {
    const auto& prev = traj.snapshots[k - 1];
    const auto& cur = traj.snapshots[k];
    double dt = cur.t - prev.t;
    if (prev.t <= 0 || dt <= 0) continue;
    double q = norm_l1_diff(cur.u, prev.u) / dt;
    double bound = m == 1.0 ? 2.0 * s.params.dim / (s.params.sigma * prev.t) * f1
                            : 2.0 / (std::abs(m - 1.0) * prev.t) * f1;
    worst = std::max(worst, q / bound);
  }
  v.measured = worst;
  v.tolerance = safety;
  v.pass = worst <= safety;
  v.detail = "max over snapshots of quotient/bound";
  return v;
}

Verdict check_homogeneity(const Trajectory& traj) {
  Verdict v;
  v.name = "homogeneity-estimate";
  v.claim = "time-homogeneity-lower-bound";
  const double m = traj.params.m;
  for (double x : traj.initial().values())
    if (x < -1e-14) throw std::invalid_argument("check_homogeneity needs f >= 0");
  double worst = kInf;  // min of the scaled margin
  for (std::size_t k = 2; k < traj.snapshots.size(); ++k) {
    const auto& prev = traj.snapshots[k - 1];
    const auto& cur = traj.snapshots[k];
    double dt = cur.t - prev.t;
    double t = cur.t;
    double sup = norm_lp(cur.u, kInf);
    if (sup <= 0) continue;
    double coef = m == 1.0 ? traj.params.sigma : m - 1.0;
    // consistency-order slack: the snapshot quotient misses O(dt) of u_t
    double slack = 2.0 * std::abs(coef) * (dt / t) * sup + 1e-12 * sup;
    for (std::size_t i = 0; i < cur.u.size(); ++i) {
      double ut = (cur.u[i] - prev.u[i]) / dt;
      double margin = m == 1.0
                          ? traj.params.sigma * t * ut + traj.params.dim * cur.u[i]
                          : (m - 1.0) * t * ut + cur.u[i];
      worst = std::min(worst, (margin + slack) / sup);
    }
  }
  v.measured = worst;
  v.tolerance = 0.0;
  v.pass = worst >= 0.0;
  v.detail = "min over nodes/times of (slack-adjusted margin)/sup";
  return v;
}

Verdict check_retention(const Trajectory& traj) {
  Verdict v;
  v.name = "retention";
  v.claim = "retention";
  const double m = traj.params.m;
  if (m <= 1.0) throw std::invalid_argument("check_retention needs m > 1");
  for (double x : traj.initial().values())
    if (x < -1e-14) throw std::invalid_argument("check_retention needs f >= 0");
  double expo = 1.0 / (m - 1.0);
  double worst = kInf;
  for (std::size_t k = 2; k < traj.snapshots.size(); ++k) {
    const auto& prev = traj.snapshots[k - 1];
    const auto& cur = traj.snapshots[k];
    if (prev.t <= 0) continue;
    double sup = norm_lp(cur.u, kInf);
    if (sup <= 0) continue;
    double fp = std::pow(prev.t, expo), fc = std::pow(cur.t, expo);
    double dt = cur.t - prev.t;
    double slack = 2.0 * (dt / cur.t) * expo * fc * sup + 1e-12 * fc * sup;
    for (std::size_t i = 0; i < cur.u.size(); ++i)
      worst = std::min(worst, (fc * cur.u[i] - fp * prev.u[i] + slack) / (fc * sup));
  }
  v.measured = worst;
  v.tolerance = 0.0;
  v.pass = worst >= 0.0;
  v.detail = "min of slack-adjusted increments of t^{1/(m-1)} u";
  return v;
}

ContinuityResult parameter_continuity(const Field& f,
                                      const std::vector<FracParams>& ladder,
                                      double final_time, int steps, OperatorMode mode,
                                      const ResolventOptions& opts) {
  if (ladder.size() < 4)
    throw std::invalid_argument("parameter_continuity needs >= 4 parameter sets");
  Schedule sched = Schedule::uniform(final_time, steps, 8);
  std::vector<Trajectory> trajs;
  for (const auto& p : ladder) {
    FracOperator op(f.grid(), p.sigma, mode);
    trajs.push_back(evolve(f, sched, p, op, opts));
  }
  ContinuityResult out;
  std::size_t n = ladder.size();
  out.sup_distance.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double sup = 0.0;
      auto pairs = align(trajs[i], trajs[j]);
      for (auto [a, b] : pairs)
        sup = std::max(sup, norm_l1_diff(trajs[i].snapshots[a].u,
                                         trajs[j].snapshots[b].u));
      out.sup_distance[i][j] = out.sup_distance[j][i] = sup;
    }
  for (std::size_t i = 0; i + 1 < n; ++i)
    out.to_reference.push_back(out.sup_distance[i][n - 1]);

  Verdict v;
  v.name = "parameter-continuity";
  v.claim = "parameter-continuity";
  std::size_t r = out.to_reference.size();
  bool monotone = r >= 3 && out.to_reference[r - 3] > out.to_reference[r - 2] &&
                  out.to_reference[r - 2] > out.to_reference[r - 1];
  v.pass = monotone;
  v.measured = out.to_reference.back();
  v.tolerance = out.to_reference[r - 2];
  std::string d = "distances to reference:";
  for (double x : out.to_reference) d += " " + fmt(x);
  v.detail = d;
  out.verdict = v;
  return out;
}

}  // namespace fpml

#include "fpml/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fpml {

Schedule Schedule::uniform(double final_time, int steps, int snapshots) {
  Schedule s;
  s.final_time = final_time;
  s.steps = steps;
  snapshots = std::max(snapshots, 1);
  for (int i = 1; i <= snapshots; ++i)
    s.snapshot_times.push_back(final_time * i / snapshots);
  s.validate();
  return s;
}

Schedule Schedule::geometric(double final_time, int steps, double first_time,
                             int snapshots) {
  Schedule s;
  s.final_time = final_time;
  s.steps = steps;
  snapshots = std::max(snapshots, 2);
  double ratio = std::pow(final_time / first_time, 1.0 / (snapshots - 1));
  double t = first_time;
  for (int i = 0; i < snapshots; ++i, t *= ratio)
    s.snapshot_times.push_back(std::min(t, final_time));
  s.validate();
  return s;
}

void Schedule::validate() const {
  if (!(final_time > 0.0)) throw std::invalid_argument("schedule needs T > 0");
  if (steps < 1) throw std::invalid_argument("schedule needs steps >= 1");
  for (double t : snapshot_times)
    if (!(t >= 0.0 && t <= final_time * (1.0 + 1e-12)))
      throw std::invalid_argument("snapshot time outside [0, T]");
}

std::pair<Field, SolveReport> step(const Field& u_prev, double tau,
                                   const FracParams& params, const FracOperator& op,
                                   const ResolventOptions& opts) {
  return resolvent(u_prev, tau, params, op, opts);
}

Trajectory evolve(const Field& f, const Schedule& sched, const FracParams& params,
                  const FracOperator& op, const ResolventOptions& opts,
                  double extinction_rtol) {
  sched.validate();
  if (!f.all_finite()) throw std::invalid_argument("evolve: non-finite datum");

  Trajectory traj;
  traj.params = params;
  traj.mode = op.mode();
  traj.tau = sched.tau();
  traj.snapshots.push_back({0.0, f, SolveReport{}});
  traj.energy.push_back(0.0);

  // step indices at which snapshots are recorded
  std::vector<int> snap_steps;
  for (double t : sched.snapshot_times) {
    int k = std::clamp(static_cast<int>(std::lround(t / traj.tau)), 1, sched.steps);
    snap_steps.push_back(k);
  }
  std::sort(snap_steps.begin(), snap_steps.end());
  snap_steps.erase(std::unique(snap_steps.begin(), snap_steps.end()), snap_steps.end());

  double f_sup = norm_lp(f, std::numeric_limits<double>::infinity());
  double extinct_tol = extinction_rtol * f_sup;

  Field u = f;
  double energy_acc = 0.0;
  std::size_t next_snap = 0;
  for (int k = 1; k <= sched.steps; ++k) {
    auto [u_next, rep] = resolvent(u, traj.tau, params, op, opts);
    double t = k * traj.tau;
    if (!rep.converged) {
      traj.snapshots.push_back({t, u_next, rep});
      traj.energy.push_back(energy_acc);
      traj.status = Trajectory::Status::Failed;
      return traj;
    }
    u = std::move(u_next);
    energy_acc += traj.tau * op.quad_form(pow_signed(u, params.m));

    bool record = next_snap < snap_steps.size() && snap_steps[next_snap] == k;
    double sup = norm_lp(u, std::numeric_limits<double>::infinity());
    bool extinct = f_sup > 0.0 && sup < extinct_tol;
    if (record || extinct || k == sched.steps) {
      traj.snapshots.push_back({t, u, rep});
      traj.energy.push_back(energy_acc);
      while (next_snap < snap_steps.size() && snap_steps[next_snap] <= k) ++next_snap;
    }
    if (extinct) {
      traj.status = Trajectory::Status::Extinct;
      traj.extinction_time = t;
      return traj;
    }
  }
  traj.status = Trajectory::Status::Completed;
  return traj;
}

RefinementResult refine_convergence(const Field& f, double final_time,
                                    const FracParams& params, const FracOperator& op,
                                    const std::vector<int>& ladder,
                                    const ResolventOptions& opts) {
  if (ladder.size() < 3)
    throw std::invalid_argument("refinement ladder needs at least 3 step counts");
  RefinementResult out;
  out.ladder = ladder;
  std::vector<Field> finals;
  for (int n : ladder) {
    Schedule s = Schedule::uniform(final_time, n, 1);
    Trajectory t = evolve(f, s, params, op, opts);
    finals.push_back(t.final_state());
  }
  for (std::size_t i = 0; i + 1 < finals.size(); ++i)
    out.distances.push_back(norm_l1_diff(finals[i], finals[i + 1]));
  for (std::size_t i = 0; i + 1 < out.distances.size(); ++i) {
    double rung = static_cast<double>(ladder[i + 1]) / ladder[i];
    if (out.distances[i + 1] > 0.0)
      out.orders.push_back(std::log(out.distances[i] / out.distances[i + 1]) /
                           std::log(rung));
  }
  if (!out.orders.empty()) {
    double s = 0.0;
    for (double o : out.orders) s += o;
    out.order = s / out.orders.size();
  }
  return out;
}

}  // namespace fpml

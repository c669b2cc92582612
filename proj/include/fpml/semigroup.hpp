#pragma once

#include <optional>
#include <vector>

#include "fpml/resolvent.hpp"

namespace fpml {

/// Uniform implicit-Euler schedule: n steps of size tau = T/n, with snapshots
/// recorded at the step times nearest the requested instants.
struct Schedule {
  double final_time = 1.0;
  int steps = 1;
  std::vector<double> snapshot_times;  // subset of [0, T]; t = 0 always kept

  static Schedule uniform(double final_time, int steps, int snapshots);
  /// Geometric snapshot spacing from first_time to T (for log-log fits).
  static Schedule geometric(double final_time, int steps, double first_time,
                            int snapshots);
  double tau() const { return final_time / steps; }
  void validate() const;
};

struct TrajectoryEntry {
  double t = 0.0;
  Field u;
  SolveReport report;  // empty for the initial datum
};

struct Trajectory {
  enum class Status { Completed, Extinct, Failed };

  std::vector<TrajectoryEntry> snapshots;  // strictly increasing t from 0
  std::vector<double> energy;              // accumulated sum tau <phi(u_k), A phi(u_k)>_h
  FracParams params;
  OperatorMode mode = OperatorMode::Symbol;
  double tau = 0.0;
  Status status = Status::Completed;
  double extinction_time = -1.0;  // first step time below the extinction tol, if any

  const Field& initial() const { return snapshots.front().u; }
  const Field& final_state() const { return snapshots.back().u; }
};

/// One implicit step u_k + tau A(u_k^m) = u_{k-1}.
std::pair<Field, SolveReport> step(const Field& u_prev, double tau,
                                   const FracParams& params, const FracOperator& op,
                                   const ResolventOptions& opts = {});

/// Crandall-Liggett iteration of the resolvent.  Early-stops with Extinct
/// status when ||u||_inf < extinction_rtol * ||f||_inf; a non-converged step
/// yields Failed with the partial trajectory attached.
Trajectory evolve(const Field& f, const Schedule& sched, const FracParams& params,
                  const FracOperator& op, const ResolventOptions& opts = {},
                  double extinction_rtol = 1e-8);

struct RefinementResult {
  std::vector<int> ladder;
  std::vector<double> distances;  // L1 gap at T between successive rungs
  std::vector<double> orders;     // log2(d_i / d_{i+1})
  double order = 0.0;             // mean of the observed orders
};

/// Self-refinement study of the time discretization at fixed final time.
RefinementResult refine_convergence(const Field& f, double final_time,
                                    const FracParams& params, const FracOperator& op,
                                    const std::vector<int>& ladder,
                                    const ResolventOptions& opts = {});

}  // namespace fpml

#pragma once

#include <limits>
#include <utility>
#include <vector>

#include "fpml/field.hpp"
#include "fpml/frac_params.hpp"
#include "fpml/operators.hpp"

namespace fpml {

struct ResolventOptions {
  int max_newton_iters = 60;
  double residual_tol_abs = 1e-10;  // h^{N/2}-weighted l2 residual
  double damping_floor = 9.5367431640625e-7;  // 2^-20
  enum class Variable { U, W, Auto };
  /// Solve in u for m >= 1 (bounded Jacobian diag m|u|^{m-1}) and in
  /// w = |u|^{m-1}u for m < 1 (then w^{1/m} is C^1 at zero); Auto picks by m.
  Variable variable = Variable::Auto;
  /// Floor for |s|^{a-1} in the Jacobian only; the residual stays exact, so
  /// converged iterates solve the unregularized system.
  double epsilon_floor = 1e-14;
  int max_cg_iters = 500;
  double cg_tol = 1e-12;
  /// Cross-check Newton against the splitting iteration and record the
  /// L1 disagreement (diagnostic for nonuniqueness suspicions).
  bool cross_check_fixed_point = false;
  /// Project the residual mean after convergence on modes that annihilate
  /// constants, making the discrete mass identity exact.
  bool repair_mean = true;
};

struct SolveReport {
  int iterations = 0;
  double final_residual = std::numeric_limits<double>::quiet_NaN();
  int damping_events = 0;
  double contraction_slack = std::numeric_limits<double>::quiet_NaN();
  bool converged = false;
  int cg_iterations = 0;
  bool used_fallback = false;
  double fixed_point_disagreement = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> residual_history;
};

/// Closed form for the m = 1 implicit step on the torus:
/// coefficients g_hat / (1 + tau |omega|^sigma).
Field resolvent_linear(const Field& g, double tau, double sigma);

/// Solves u + tau A(|u|^{m-1} u) = g for the given operator realization.
/// Non-convergence is reported in the flagged SolveReport; non-finite
/// iterates abort with a diagnostic exception.
std::pair<Field, SolveReport> resolvent(const Field& g, double tau,
                                        const FracParams& params,
                                        const FracOperator& op,
                                        const ResolventOptions& opts = {});

/// Splitting iteration u <- u - (I + tau c A)^{-1} F(u), c >= max phi'.
/// Globally convergent for the monotone system but only linearly; used as a
/// convergence-failure fallback and as a cross-check.
std::pair<Field, SolveReport> resolvent_fixed_point(const Field& g, double tau,
                                                    const FracParams& params,
                                                    const FracOperator& op,
                                                    double tol, int max_iters);

/// int (u1 - u2)_+ - int (g1 - g2)_+ ; nonpositive up to solver slack.
double t_contraction_gap(const Field& g1, const Field& g2, double tau,
                         const FracParams& params, const FracOperator& op,
                         const ResolventOptions& opts = {});

}  // namespace fpml

#include "fpml/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "fpml/fft.hpp"

namespace fpml {

namespace {

double weighted_norm(const Grid& g, const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(g.cell_volume() * s);
}

void check_finite(const std::vector<double>& v, const char* where) {
  for (double x : v)
    if (!std::isfinite(x))
      throw std::runtime_error(std::string("resolvent: non-finite value in ") + where);
}

using Apply = std::function<void(const std::vector<double>&, std::vector<double>&)>;

// Preconditioned conjugate gradient on an SPD operator; returns iterations.
int pcg(const Apply& apply_op, const Apply& precond, const std::vector<double>& b,
        std::vector<double>& x, double rel_tol, int max_iters) {
  const std::size_t n = b.size();
  x.assign(n, 0.0);
  std::vector<double> r = b, z(n), p(n), ap(n);
  double bnorm = 0.0;
  for (double v : b) bnorm += v * v;
  bnorm = std::sqrt(bnorm);
  if (bnorm == 0.0) return 0;
  precond(r, z);
  p = z;
  double rz = 0.0;
  for (std::size_t i = 0; i < n; ++i) rz += r[i] * z[i];
  int it = 0;
  for (; it < max_iters; ++it) {
    apply_op(p, ap);
    double pap = 0.0;
    for (std::size_t i = 0; i < n; ++i) pap += p[i] * ap[i];
    if (pap <= 0.0) break;  // numerical loss of definiteness
    double alpha = rz / pap;
    double rnorm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
      rnorm += r[i] * r[i];
    }
    if (std::sqrt(rnorm) <= rel_tol * bnorm) {
      ++it;
      break;
    }
    precond(r, z);
    double rz_new = 0.0;
    for (std::size_t i = 0; i < n; ++i) rz_new += r[i] * z[i];
    double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  return it;
}

bool annihilates_constants(const FracOperator& op) {
  return op.mode() == OperatorMode::Symbol || op.mode() == OperatorMode::KernelTorus;
}

struct NewtonProblem {
  // residual of the current outer variable (u or w); also yields u
  std::function<std::vector<double>(const std::vector<double>&)> residual;
  std::function<std::vector<double>(const std::vector<double>&)> to_u;
  std::function<std::vector<double>(const std::vector<double>&)> jac_diag;
  bool symmetrize;  // true: K = I + tau D^{1/2} A D^{1/2} (u-variable form)
};

}  // namespace

Field resolvent_linear(const Field& g, double tau, double sigma) {
  if (g.grid().boundary() != Boundary::PeriodicTorus)
    throw std::invalid_argument("resolvent_linear requires a PeriodicTorus grid");
  if (!(tau > 0.0)) throw std::invalid_argument("resolvent_linear needs tau > 0");
  Spectrum s = forward_transform(g);
  auto& c = s.fourier_coeffs();
  const Grid& grid = g.grid();
  int m = grid.points_per_dim();
  for (std::size_t i = 0; i < c.size(); ++i) {
    double w2;
    if (grid.dim() == 1) {
      double w = grid.omega(static_cast<int>(i));
      w2 = w * w;
    } else {
      double w0 = grid.omega(static_cast<int>(i) / m);
      double w1 = grid.omega(static_cast<int>(i) % m);
      w2 = w0 * w0 + w1 * w1;
    }
    double lam = w2 == 0.0 ? 0.0 : std::pow(w2, 0.5 * sigma);
    c[i] /= 1.0 + tau * lam;
  }
  return inverse_transform(s);
}

std::pair<Field, SolveReport> resolvent(const Field& g, double tau,
                                        const FracParams& params,
                                        const FracOperator& op,
                                        const ResolventOptions& opts) {
  if (!(tau > 0.0)) throw std::invalid_argument("resolvent needs tau > 0");
  if (!(g.grid() == op.grid())) throw std::invalid_argument("resolvent grid mismatch");
  if (!g.all_finite()) throw std::invalid_argument("resolvent: non-finite datum");
  if (params.sigma != op.sigma())
    throw std::invalid_argument("params.sigma disagrees with operator sigma");

  const Grid& grid = g.grid();
  const double m = params.m;
  const std::size_t n = g.size();
  const bool in_u = opts.variable == ResolventOptions::Variable::U ||
                    (opts.variable == ResolventOptions::Variable::Auto && m >= 1.0);

  auto apply_a = [&](const std::vector<double>& v) {
    Field f(grid, v);
    return op.apply(f).values();
  };

  NewtonProblem prob;
  if (in_u) {
    prob.symmetrize = true;
    prob.residual = [&](const std::vector<double>& u) {
      std::vector<double> phi(n);
      for (std::size_t i = 0; i < n; ++i) phi[i] = pow_signed(u[i], m);
      std::vector<double> res = apply_a(phi);
      for (std::size_t i = 0; i < n; ++i) res[i] = u[i] + tau * res[i] - g[i];
      return res;
    };
    prob.to_u = [](const std::vector<double>& u) { return u; };
    prob.jac_diag = [&](const std::vector<double>& u) {
      std::vector<double> d(n);
      for (std::size_t i = 0; i < n; ++i)
        d[i] = m * std::pow(std::max(std::abs(u[i]), opts.epsilon_floor), m - 1.0);
      return d;
    };
  } else {
    prob.symmetrize = false;
    const double inv_m = 1.0 / m;
    prob.residual = [&, inv_m](const std::vector<double>& w) {
      std::vector<double> res = apply_a(w);
      for (std::size_t i = 0; i < n; ++i)
        res[i] = pow_signed(w[i], inv_m) + tau * res[i] - g[i];
      return res;
    };
    prob.to_u = [&, inv_m](const std::vector<double>& w) {
      std::vector<double> u(n);
      for (std::size_t i = 0; i < n; ++i) u[i] = pow_signed(w[i], inv_m);
      return u;
    };
    prob.jac_diag = [&, inv_m](const std::vector<double>& w) {
      std::vector<double> d(n);
      for (std::size_t i = 0; i < n; ++i)
        d[i] = inv_m * std::pow(std::max(std::abs(w[i]), opts.epsilon_floor), inv_m - 1.0);
      return d;
    };
  }

  // initial iterate: exact at tau = 0
  std::vector<double> x(n);
  if (in_u) {
    x = g.values();
  } else {
    for (std::size_t i = 0; i < n; ++i) x[i] = pow_signed(g[i], m);
  }

  SolveReport rep;
  std::vector<double> res = prob.residual(x);
  check_finite(res, "initial residual");
  double rnorm = weighted_norm(grid, res);
  double rnorm0 = std::max(rnorm, 1e-300);
  rep.residual_history.push_back(rnorm);

  // iterate past the advertised tolerance so the mean repair and the final
  // recomputation cannot push a converged solve back over it
  const double inner_tol = 0.5 * opts.residual_tol_abs;
  int stalls = 0;
  for (int it = 0; it < opts.max_newton_iters && rnorm > inner_tol; ++it) {
    std::vector<double> d = prob.jac_diag(x);
    std::vector<double> delta(n);
    double cg_rel = std::clamp(0.01 * rnorm / rnorm0, opts.cg_tol, 1e-2);

    if (prob.symmetrize) {
      // J = I + tau A D; transform with D^{1/2} to the SPD form
      std::vector<double> sq(n);
      for (std::size_t i = 0; i < n; ++i) sq[i] = std::sqrt(d[i]);
      double dbar = 0.0;
      for (double v : d) dbar += v;
      dbar /= static_cast<double>(n);
      Apply k_apply = [&](const std::vector<double>& y, std::vector<double>& out) {
        std::vector<double> tmp(n);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = sq[i] * y[i];
        tmp = apply_a(tmp);
        out.resize(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = y[i] + tau * sq[i] * tmp[i];
      };
      Apply k_prec = [&](const std::vector<double>& y, std::vector<double>& out) {
        Field f(grid, y);
        out = op.solve_shifted(f, tau * dbar).values();
      };
      std::vector<double> b(n), eta;
      for (std::size_t i = 0; i < n; ++i) b[i] = -sq[i] * res[i];
      rep.cg_iterations += pcg(k_apply, k_prec, b, eta, cg_rel, opts.max_cg_iters);
      // delta = -res - tau A (D^{1/2} eta)
      std::vector<double> tmp(n);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = sq[i] * eta[i];
      tmp = apply_a(tmp);
      for (std::size_t i = 0; i < n; ++i) delta[i] = -res[i] - tau * tmp[i];
    } else {
      // J = diag(b) + tau A, already SPD
      double q = 0.0;
      for (double v : d) q += v;
      q = std::max(q / static_cast<double>(n), 1e-300);
      Apply j_apply = [&](const std::vector<double>& y, std::vector<double>& out) {
        out = apply_a(y);
        for (std::size_t i = 0; i < n; ++i) out[i] = d[i] * y[i] + tau * out[i];
      };
      Apply j_prec = [&](const std::vector<double>& y, std::vector<double>& out) {
        Field f(grid, y);
        out = op.solve_shifted(f, tau / q).values();
        for (std::size_t i = 0; i < n; ++i) out[i] /= q;
      };
      std::vector<double> b(n);
      for (std::size_t i = 0; i < n; ++i) b[i] = -res[i];
      rep.cg_iterations += pcg(j_apply, j_prec, b, delta, cg_rel, opts.max_cg_iters);
    }

    // backtracking on the residual norm
    double step = 1.0;
    std::vector<double> x_new(n), res_new;
    double rnorm_new = rnorm;
    bool accepted = false;
    while (step >= opts.damping_floor) {
      for (std::size_t i = 0; i < n; ++i) x_new[i] = x[i] + step * delta[i];
      res_new = prob.residual(x_new);
      check_finite(res_new, "residual");
      rnorm_new = weighted_norm(grid, res_new);
      if (rnorm_new <= (1.0 - 1e-4 * step) * rnorm) {
        accepted = true;
        break;
      }
      step *= 0.5;
      ++rep.damping_events;
    }
    if (!accepted) {
      if (rnorm_new >= rnorm) {
        if (++stalls >= 2) break;
      }
    } else {
      stalls = 0;
    }
    x.swap(x_new);
    res.swap(res_new);
    rnorm = rnorm_new;
    rep.residual_history.push_back(rnorm);
    rep.iterations = it + 1;
  }

  std::vector<double> u = prob.to_u(x);

  if (rnorm > inner_tol) {
    // Newton stalled; try the globally convergent splitting iteration
    Field gf = g;
    auto [u_fb, rep_fb] = resolvent_fixed_point(gf, tau, params, op, inner_tol, 20000);
    if (rep_fb.converged) {
      u = u_fb.values();
      rnorm = rep_fb.final_residual;
      rep.used_fallback = true;
      rep.iterations += rep_fb.iterations;
    }
  }

  Field uf(grid, std::move(u));
  if (opts.repair_mean && annihilates_constants(op)) {
    double shift = (mass(g) - mass(uf)) / grid.domain_volume();
    for (std::size_t i = 0; i < n; ++i) uf[i] += shift;
  }
  {
    std::vector<double> phi(n);
    for (std::size_t i = 0; i < n; ++i) phi[i] = pow_signed(uf[i], m);
    std::vector<double> fin = apply_a(phi);
    for (std::size_t i = 0; i < n; ++i) fin[i] = uf[i] + tau * fin[i] - g[i];
    rep.final_residual = weighted_norm(grid, fin);
  }
  rep.converged = rep.final_residual <= opts.residual_tol_abs;

  if (opts.cross_check_fixed_point) {
    auto [u_fp, rep_fp] =
        resolvent_fixed_point(g, tau, params, op, opts.residual_tol_abs, 20000);
    if (rep_fp.converged)
      rep.fixed_point_disagreement = norm_l1_diff(uf, u_fp);
  }
  return {std::move(uf), rep};
}

std::pair<Field, SolveReport> resolvent_fixed_point(const Field& g, double tau,
                                                    const FracParams& params,
                                                    const FracOperator& op,
                                                    double tol, int max_iters) {
  const Grid& grid = g.grid();
  const double m = params.m;
  const std::size_t n = g.size();
  SolveReport rep;

  std::vector<double> u = g.values();
  double gmax = 0.0;
  for (double v : u) gmax = std::max(gmax, std::abs(v));
  // slope bound for phi on the invariant interval |u| <= ||g||_inf
  double c = m >= 1.0 ? m * std::pow(std::max(gmax, 1e-30), m - 1.0)
                      : m * std::pow(1e-8 * std::max(gmax, 1e-30), m - 1.0);

  double rnorm = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    std::vector<double> phi(n);
    for (std::size_t i = 0; i < n; ++i) phi[i] = pow_signed(u[i], m);
    Field af = op.apply(Field(grid, phi));
    std::vector<double> res(n);
    for (std::size_t i = 0; i < n; ++i) res[i] = u[i] + tau * af[i] - g[i];
    check_finite(res, "fixed-point residual");
    rnorm = weighted_norm(grid, res);
    rep.iterations = it;
    if (rnorm <= tol) {
      rep.converged = true;
      break;
    }
    Field corr = op.solve_shifted(Field(grid, res), tau * c);
    for (std::size_t i = 0; i < n; ++i) u[i] -= corr[i];
  }
  rep.final_residual = rnorm;
  return {Field(grid, std::move(u)), rep};
}

double t_contraction_gap(const Field& g1, const Field& g2, double tau,
                         const FracParams& params, const FracOperator& op,
                         const ResolventOptions& opts) {
  auto [u1, r1] = resolvent(g1, tau, params, op, opts);
  auto [u2, r2] = resolvent(g2, tau, params, op, opts);
  return positive_part_integral(u1, u2) - positive_part_integral(g1, g2);
}

}  // namespace fpml

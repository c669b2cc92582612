#include "fpml/reference.hpp"

#include <cmath>
#include <stdexcept>

#include "fpml/fft.hpp"
#include "fpml/frac_params.hpp"
#include "quadrature.hpp"

namespace fpml {

Field linear_solution(const Field& f, double t, double sigma) {
  if (f.grid().boundary() != Boundary::PeriodicTorus)
    throw std::invalid_argument("linear_solution requires a PeriodicTorus grid");
  if (!(t > 0.0)) throw std::invalid_argument("linear_solution needs t > 0");
  if (!(sigma > 0.0 && sigma <= 2.0))
    throw std::invalid_argument("linear_solution needs sigma in (0,2]");
  Spectrum s = forward_transform(f);
  auto& c = s.fourier_coeffs();
  const Grid& g = f.grid();
  int m = g.points_per_dim();
  for (std::size_t i = 0; i < c.size(); ++i) {
    double w2;
    if (g.dim() == 1) {
      double w = g.omega(static_cast<int>(i));
      w2 = w * w;
    } else {
      double w0 = g.omega(static_cast<int>(i) / m);
      double w1 = g.omega(static_cast<int>(i) % m);
      w2 = w0 * w0 + w1 * w1;
    }
    if (w2 != 0.0) c[i] *= std::exp(-std::pow(w2, 0.5 * sigma) * t);
  }
  return inverse_transform(s);
}

namespace {

Field profile_field(const Grid& grid, double c, double center, double exponent) {
  Field phi(grid);
  double xy[2];
  for (std::size_t i = 0; i < phi.size(); ++i) {
    node_coords(grid, i, xy);
    double r2 = (xy[0] - center) * (xy[0] - center);
    if (grid.dim() == 2) r2 += (xy[1] - center) * (xy[1] - center);
    phi[i] = std::pow(c + r2, exponent);
  }
  return phi;
}

// The zero-exterior window operator truncates the profile's algebraic tail,
// which swamps the ratio away from the center at any window size.  The
// exterior part of the hypersingular integral is a smooth 1D integral of the
// known profile, completed by quadrature on a log-radial mesh:
//   C int_{z outside [blo, bhi]} (c + (z-a)^2)^{-(N-sigma)/2} |x-z|^{-1-sigma} dz.
double profile_tail_integral(double x, double blo, double bhi, double a, double c,
                             double sigma) {
  auto side = [&](double edge) {
    // z = edge * e^s turns the algebraic decay into an exponential one
    return quad::integrate(0.0, 40.0, 96, [&](double s) {
      double z = edge * std::exp(s);
      double phi_m = std::pow(c + (z - a) * (z - a), -(1.0 - sigma) / 2.0);
      return phi_m * std::pow(std::abs(z - x), -1.0 - sigma) * std::abs(z);
    });
  };
  // bhi > 0 and blo < 0 for the centered windows used here
  return side(bhi) + side(blo);
}

}  // namespace

ExtinctionCalibration calibrate_extinction_profile(const Grid& grid, double sigma,
                                                   double c, double center) {
  if (grid.boundary() != Boundary::FreeSpaceWindow)
    throw std::invalid_argument("calibration requires a FreeSpaceWindow grid");
  if (grid.dim() != 1)
    throw std::invalid_argument("profile calibration is implemented for N = 1");
  if (!(grid.dim() > sigma))
    throw std::invalid_argument("calibration requires N > sigma");
  if (!(c > 0.0)) throw std::invalid_argument("calibration needs c > 0");
  const int dim = grid.dim();
  const double m = (dim - sigma) / (dim + sigma);

  Field phi = profile_field(grid, c, center, -(dim + sigma) / 2.0);
  Field phi_m = profile_field(grid, c, center, -(dim - sigma) / 2.0);
  FracOperator op(grid, sigma, OperatorMode::KernelFreeSpace);
  Field aphi = op.apply(phi_m);
  // complete the window-truncated integral with the profile's analytic tail
  {
    double cnorm = normalization_constant(dim, sigma);
    double h = grid.spacing();
    double bhi = grid.half_length() - 0.5 * h;
    double blo = -grid.half_length() - 0.5 * h;
    for (std::size_t i = 0; i < aphi.size(); ++i) {
      double x = grid.coord(static_cast<int>(i));
      aphi[i] -= cnorm * profile_tail_integral(x, blo, bhi, center, c, sigma);
    }
  }

  // ratio statistics inside |x - a| <= L/4
  double rcut2 = 0.0625 * grid.half_length() * grid.half_length();
  double sum = 0.0, sum2 = 0.0;
  std::size_t count = 0;
  double best_dist = 1e300;
  double mu_center = 0.0;
  double xy[2];
  for (std::size_t i = 0; i < phi.size(); ++i) {
    node_coords(grid, i, xy);
    double r2 = (xy[0] - center) * (xy[0] - center);
    if (dim == 2) r2 += (xy[1] - center) * (xy[1] - center);
    if (r2 > rcut2) continue;
    double ratio = aphi[i] / phi[i];
    sum += ratio;
    sum2 += ratio * ratio;
    ++count;
    if (r2 < best_dist) {
      best_dist = r2;
      mu_center = ratio;
    }
  }
  if (count < 4) throw std::runtime_error("calibration region holds too few nodes");
  double mean = sum / count;
  double var = std::max(sum2 / count - mean * mean, 0.0);
  double cov = std::sqrt(var) / std::abs(mean);

  ExtinctionCalibration cal;
  cal.mu = mu_center;
  cal.ratio_cov = cov;
  if (cov > 0.02)
    throw std::runtime_error(
        "extinction-profile calibration failed: ratio not constant (cov = " +
        std::to_string(cov) + "); widen the window or refine the grid");

  // Candidate time exponents.  Separation of variables balances the time
  // exponents only when alpha (1 - m) = 1; for the other candidate the
  // amplitude is fitted at mid-run and the residual measured off-center.
  const double alpha_sep = 1.0 / (1.0 - m);               // = (N+sigma)/(2 sigma)
  const double alpha_printed = (dim + sigma) / (2.0 * dim);
  for (double alpha : {alpha_printed, alpha_sep}) {
    double e = alpha * (1.0 - m) - 1.0;
    // residual ratio |1 - (2x/T)^e| with b fitted so it vanishes at x = T/2
    double worst = 0.0;
    for (double xfrac : {0.5, 1.5}) worst = std::max(worst, std::abs(1.0 - std::pow(xfrac, e)));
    cal.candidate_alphas.push_back(alpha);
    cal.candidate_residuals.push_back(worst);
  }
  cal.alpha = cal.candidate_residuals[1] <= cal.candidate_residuals[0]
                  ? cal.candidate_alphas[1]
                  : cal.candidate_alphas[0];
  cal.b = std::pow(cal.mu / cal.alpha, 1.0 / (1.0 - m));
  return cal;
}

Field separated_extinction(const Grid& grid, const ExtinctionProfileParams& p,
                           double t) {
  if (!(t >= 0.0 && t < p.extinction_time))
    throw std::invalid_argument("separated_extinction needs 0 <= t < T");
  if (!(p.b > 0.0 && p.alpha > 0.0))
    throw std::invalid_argument("separated_extinction needs calibrated b, alpha");
  Field phi = profile_field(grid, p.c, p.center, -(p.dim + p.sigma) / 2.0);
  double amp = p.b * std::pow(p.extinction_time - t, p.alpha);
  for (std::size_t i = 0; i < phi.size(); ++i) phi[i] *= amp;
  return phi;
}

double separated_profile_residual(const Grid& grid, const ExtinctionProfileParams& p,
                                  double t) {
  if (grid.boundary() != Boundary::FreeSpaceWindow || grid.dim() != 1)
    throw std::invalid_argument("separated residual needs a 1D FreeSpaceWindow grid");
  if (!(t > 0.0 && t < p.extinction_time))
    throw std::invalid_argument("separated residual needs 0 < t < T");
  const double m = p.m();
  Field u = separated_extinction(grid, p, t);
  Field um = pow_signed(u, m);
  FracOperator op(grid, p.sigma, OperatorMode::KernelFreeSpace);
  Field au = op.apply(um);
  // tail completion of A(u^m); the spatial factor of u^m is the calibration
  // profile, so the same exterior integral applies up to the time amplitude
  double cnorm = normalization_constant(1, p.sigma);
  double h = grid.spacing();
  double bhi = grid.half_length() - 0.5 * h;
  double blo = -grid.half_length() - 0.5 * h;
  double amp_m = std::pow(p.b * std::pow(p.extinction_time - t, p.alpha), m);
  // analytic time derivative of b (T-t)^alpha Phi
  double dfactor = -p.alpha * p.b * std::pow(p.extinction_time - t, p.alpha - 1.0);
  Field phi = profile_field(grid, p.c, p.center, -(1.0 + p.sigma) / 2.0);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    double x = grid.coord(static_cast<int>(i));
    if (std::abs(x - p.center) > 0.125 * grid.half_length()) continue;
    double a_true = au[i] - cnorm * amp_m *
                               profile_tail_integral(x, blo, bhi, p.center, p.c, p.sigma);
    double res = dfactor * phi[i] + a_true;
    num += res * res;
    den += a_true * a_true;
  }
  if (den == 0.0) throw std::runtime_error("separated residual: empty center region");
  return std::sqrt(num / den);
}

Field ode_limit_solution(const Field& f, double t, double m) {
  if (m < 1.0)
    throw std::invalid_argument("ode_limit_solution holds for m >= 1 only");
  if (!(t >= 0.0)) throw std::invalid_argument("ode_limit_solution needs t >= 0");
  Field out(f.grid());
  if (m == 1.0) {
    double decay = std::exp(-t);
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i] * decay;
    return out;
  }
  for (std::size_t i = 0; i < f.size(); ++i) {
    double a = std::abs(f[i]);
    if (a == 0.0) {
      out[i] = 0.0;
      continue;
    }
    double v = std::pow(std::pow(a, 1.0 - m) + (m - 1.0) * t, -1.0 / (m - 1.0));
    out[i] = std::copysign(v, f[i]);
  }
  return out;
}

}  // namespace fpml

#pragma once

#include <vector>

#include "fpml/field.hpp"
#include "fpml/operators.hpp"

namespace fpml {

/// Exact linear-flow solution on the torus: coefficients scaled by
/// e^{-|omega|^sigma t}.  sigma in (0,2].
Field linear_solution(const Field& f, double t, double sigma);

/// Separated-variables extinction solution
///   u(x,t) = b (T-t)^alpha [c + |x-a|^2]^{-(N+sigma)/2},
/// valid for m = (N-sigma)/(N+sigma).  The amplitude b and the time exponent
/// alpha are calibrated numerically, not transcribed.
struct ExtinctionProfileParams {
  double sigma = 0.5;
  int dim = 1;
  double c = 1.0;           // shape constant
  double center = 0.0;      // profile center a (per axis)
  double extinction_time = 1.0;
  double b = 0.0;           // calibrated amplitude
  double alpha = 0.0;       // calibrated time exponent
  double m() const { return (dim - sigma) / (dim + sigma); }
};

struct ExtinctionCalibration {
  double mu = 0.0;               // eigenvalue of the profile identity A(Phi^m) = mu Phi
  double ratio_cov = 0.0;        // coefficient of variation of the measured ratio
  double alpha = 0.0;            // selected exponent
  double b = 0.0;                // amplitude (mu/alpha)^alpha
  // PDE residuals for both candidate time exponents, evaluated off-center
  // times; the candidate with the smaller worst residual is selected.
  std::vector<double> candidate_alphas;
  std::vector<double> candidate_residuals;
};

/// Measures the profile eigenvalue mu = (A Phi^m)/Phi on a free-space window,
/// asserting spatial constancy of the ratio near the center (coefficient of
/// variation <= 2% inside |x-a| <= L/4), and selects the time exponent by
/// residual minimization.  Throws on calibration failure (window too small).
ExtinctionCalibration calibrate_extinction_profile(const Grid& grid, double sigma,
                                                   double c, double center);

/// Samples the separated solution at time t in [0, T).
Field separated_extinction(const Grid& grid, const ExtinctionProfileParams& p,
                           double t);

/// Relative residual of the calibrated separated solution in the discrete
/// equation du/dt + A(u^m) = 0 at time t, measured in L2 over
/// |x - a| <= L/8 with the same tail-completed window operator the
/// calibration uses.  Gauges the (b, alpha) consistency.
double separated_profile_residual(const Grid& grid, const ExtinctionProfileParams& p,
                                  double t);

/// Pointwise sigma -> 0 limit: u = (|f|^{1-m} + (m-1) t)^{-1/(m-1)} sign f
/// for m > 1, f e^{-t} for m = 1.  Rejects m < 1.
Field ode_limit_solution(const Field& f, double t, double m);

}  // namespace fpml

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "fpml/diagnostics.hpp"
#include "fpml/field.hpp"
#include "fpml/operators.hpp"

namespace fpml {

struct EnsembleSpec {
  enum class Kind { BandLimited, Bumps, SignedRough };
  Kind kind = Kind::BandLimited;
  int count = 100;
  std::uint64_t seed = 1;
  bool zero_mean = false;
};

EnsembleSpec::Kind ensemble_kind_from_string(const std::string& s);

/// Reproducible field ensemble (bit-exact given the seed).
std::vector<Field> make_ensemble(const Grid& g, const EnsembleSpec& spec);

/// Stroock-Varopoulos margin with both sides evaluated through the same
/// sub-Markovian kernel operator:
///   h^N <|v|^{q-2} v, A v> - (4(q-1)/q^2) h^N <|v|^{q/2}, A |v|^{q/2}>.
/// Nonnegative for nonnegative pairwise weights; exact equality at q = 2.
double sv_margin(const FracOperator& kernel_op, const Field& v, double q);

/// Generalized form for a compatible pair psi' = (Psi')^2.
double generalized_sv_margin(const FracOperator& kernel_op, const Field& v,
                             const std::function<double(double)>& psi,
                             const std::function<double(double)>& Psi);

/// Smoothed sign-function pair (p, j) with j' = sqrt(p'): p ramps 0 -> 1 over
/// (0, eps); j ramps 0 -> sqrt(eps).
struct FunctionPair {
  std::function<double(double)> psi;
  std::function<double(double)> Psi;
};
FunctionPair sign_approx_pair(double eps);

/// Exponent arithmetic: r2 = N (r p + r - p) / (r (N - gamma)), alpha = p(r-1)/r.
struct NgnExponents {
  double r2;
  double alpha;
};
NgnExponents ngn_exponents(int dim, double r, double p, double gamma);

/// r1 = N r / (N - gamma r); throws when N <= gamma r.
double hls_conjugate(int dim, double r, double gamma);

/// ||v||_{r2}^{alpha+1} / (||A v||_r ||v||_p^alpha) with the symbol operator.
double ngn_ratio(const Field& v, double p, double r, double gamma);

/// ||v||_{r1} / ||A v||_r with the symbol operator.
double hls_ratio(const Field& v, double r, double gamma);

/// Discrete energy identity over a trajectory:
///   sum_k tau <phi(u_k), A phi(u_k)>_h + ||u(T)||_{m+1}^{m+1}/(m+1)
///   = ||f||_{m+1}^{m+1}/(m+1) + O(tau).
Verdict check_energy_identity(const Trajectory& traj, double rel_tol = 0.03);

}  // namespace fpml

#pragma once

#include <complex>
#include <string>
#include <vector>

#include "fpml/field.hpp"
#include "fpml/grid.hpp"

namespace fpml {

/// Discrete hypersingular kernel realization of (-Delta)^{sigma/2}.
///
/// Off-diagonal pairwise weights are the midpoint-rule quadrature
/// C_{N,sigma} h^N / |x_i - x_j|^{N+sigma}; the singular cell is replaced by
/// its quadratic Taylor surrogate, which lands as extra nearest-neighbour
/// weights c(sigma) h^{-sigma}.  All weights are nonnegative, so the discrete
/// operator is sub-Markovian.
///
/// Torus mode periodizes the kernel over `images` periods plus an analytic
/// closure of the remaining image sum (Euler-Maclaurin in 1D, a polar
/// far-field integral in 2D).  Free-space mode keeps the bare kernel and adds
/// the exact exterior-of-window weight kappa_i (the zero-exterior Dirichlet
/// condition), so constants leak mass through the window boundary.
class KernelTable {
public:
  static KernelTable build(const Grid& grid, double sigma, int images = 4,
                           bool freespace = false);

  const Grid& grid() const { return grid_; }
  double sigma() const { return sigma_; }
  int images() const { return images_; }
  bool freespace() const { return freespace_; }

  /// A u for the assembled weights.  Evaluated as a (circular / zero-padded)
  /// convolution, identical to the pairwise sum up to rounding.
  Field apply(const Field& u) const;

  /// Operator eigenvalues in FFT bin order (torus mode only).
  const std::vector<double>& eigenvalues() const;

  /// Exterior confinement weights kappa_i (free-space mode only).
  const std::vector<double>& kappa() const;

  /// Real-space pairwise weight for a lattice offset (bin order on the torus,
  /// centered displacement d in [-(M-1), M-1]^N in free-space mode).
  const std::vector<double>& stencil() const { return stencil_; }

  /// Binary cache, keyed by (N, M, L, sigma, mode, images); layout documented
  /// in the README.
  void save(const std::string& path) const;
  static KernelTable load(const std::string& path);

  /// Cache lookup in cache_dir with the key encoded in the filename; builds
  /// and stores the table on a miss, and rejects stale files whose recorded
  /// key disagrees with the request.
  static KernelTable load_or_build(const Grid& grid, double sigma, int images,
                                   bool freespace, const std::string& cache_dir);

private:
  KernelTable() = default;
  void finalize();  // derive eigenvalues / padded transform from the stencil

  Grid grid_;
  double sigma_ = 1.0;
  int images_ = 4;
  bool freespace_ = false;

  // Torus: stencil_[bin] over lattice offsets, stencil_[0] = 0.
  // Free-space: stencil_ on the padded lattice (size pad_^N, bin order).
  std::vector<double> stencil_;
  std::vector<double> eigen_;                      // torus
  std::vector<double> diag_;                       // free-space: rowsum + kappa
  std::vector<double> kappa_;                      // free-space
  std::vector<std::complex<double>> padded_hat_;   // free-space
  int pad_ = 0;
};

}  // namespace fpml

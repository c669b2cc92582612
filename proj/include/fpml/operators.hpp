#pragma once

#include <memory>
#include <string>

#include "fpml/field.hpp"
#include "fpml/grid.hpp"
#include "fpml/kernel_table.hpp"

namespace fpml {

enum class OperatorMode { Symbol, KernelTorus, KernelFreeSpace, Dirichlet };

std::string to_string(OperatorMode m);
OperatorMode operator_mode_from_string(const std::string& s);

/// Fourier-multiplier realization: coefficients scaled by |omega|^sigma.
/// Torus grids only; exact on trigonometric polynomials.
Field apply_symbol(const Field& u, double sigma);

/// General multiplier |omega|^s (used for the sigma/4 half powers).
Field apply_symbol_power(const Field& u, double exponent);

/// Spectral Dirichlet realization: sine coefficients scaled by
/// lambda_k^{sigma/2}, lambda_k = sum_axes (pi k / 2L)^2.
Field apply_dirichlet(const Field& u, double sigma);

/// Linear evolution kernel K_sigma(.,t) sampled on the torus: inverse
/// transform of e^{-|omega|^sigma t}.  Unit discrete mass.  sigma in (0,2]
/// (the endpoint is the Gaussian).
Field heat_kernel(const Grid& g, double sigma, double t);

/// One interface over the four discrete realizations of (-Delta)^{sigma/2}.
/// Symbol, torus-kernel and Dirichlet modes are diagonal in their transform
/// basis, which gives exact shifted solves; the free-space mode exposes an
/// approximate spectral shift used as a preconditioner.
class FracOperator {
public:
  FracOperator(const Grid& grid, double sigma, OperatorMode mode, int kernel_images = 4);

  const Grid& grid() const { return grid_; }
  double sigma() const { return sigma_; }
  OperatorMode mode() const { return mode_; }
  bool diagonal_in_transform() const { return mode_ != OperatorMode::KernelFreeSpace; }

  Field apply(const Field& u) const;

  /// h^N <v, A v>  (the discrete homogeneous-Sobolev seminorm squared).
  double quad_form(const Field& v) const;

  /// (I + alpha A)^{-1} rhs.  Exact for diagonal modes; for the free-space
  /// kernel this is the spectral surrogate used for preconditioning only.
  Field solve_shifted(const Field& rhs, double alpha) const;

  const KernelTable* kernel() const { return kernel_.get(); }

private:
  Grid grid_;
  double sigma_;
  OperatorMode mode_;
  std::shared_ptr<const KernelTable> kernel_;
  double kappa_mean_ = 0.0;  // free-space preconditioner shift
};

}  // namespace fpml

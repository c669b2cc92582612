#pragma once

#include "fpml/field.hpp"

namespace fpml {

/// Forward discrete transform.  Torus/free-space grids: Fourier-series
/// coefficients c_k = M^{-N} sum_j u_j e^{-i omega_k x_j}.  Dirichlet grids:
/// sine coefficients.  Round trip with inverse_transform reproduces the
/// input to machine precision.
Spectrum forward_transform(const Field& u);
Field inverse_transform(const Spectrum& s);

/// Low-level complex DFT on the grid's node lattice (unnormalized FFTW
/// conventions, bin order).  sign = -1 forward, +1 backward.
void raw_dft(const Grid& g, std::complex<double>* data, int sign);

/// Same, for an arbitrary square lattice of size n per axis.
void raw_dft_n(int dim, int n_per_axis, std::complex<double>* data, int sign);

/// Low-level DST-I along each axis (FFTW RODFT00, unnormalized).
void raw_dst(const Grid& g, double* data);

}  // namespace fpml

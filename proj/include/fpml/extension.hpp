#pragma once

#include <complex>
#include <vector>

#include "fpml/field.hpp"
#include "fpml/grid.hpp"

namespace fpml {

/// Discrete solution of the weighted extension problem
///   (y^{1-sigma} w')' = y^{1-sigma} omega^2 w  per Fourier mode,
///   w(0) = g_hat(omega), w(Y) = 0,
/// on the graded mesh y_j = Y (j/J)^{1 + 2/sigma}.  The flux coefficients are
/// harmonic averages of y^{1-sigma}, which integrate the c1 + c2 y^sigma
/// boundary layer exactly.
struct ExtensionSolution {
  Grid grid;
  double sigma = 1.0;
  std::vector<double> ymesh;                    // y_0 = 0 .. y_J = Y
  std::vector<std::complex<double>> profiles;   // bin-major: [bin * (J+1) + j]
  // w(y_1) - w(y_0) per mode, taken from the increment-variable solve; the
  // stored profiles would lose it to cancellation on strongly graded meshes
  std::vector<std::complex<double>> first_increment;
  bool truncation_warning = false;              // Y * min|omega| < 3

  int levels() const { return static_cast<int>(ymesh.size()) - 1; }
  std::complex<double> at(std::size_t bin, int level) const {
    return profiles[bin * ymesh.size() + level];
  }
};

/// Solves the extension of a torus field.  Y > 0, J >= 32.
ExtensionSolution extend(const Field& g, double sigma, double height, int levels);

/// Default truncation height 8 / omega_min.
double default_extension_height(const Grid& g);

/// Dirichlet-to-Neumann flux -mu_sigma lim y^{1-sigma} dw/dy, evaluated from
/// the first graded cell's exact-flux stencil.  Realizes (-Delta)^{sigma/2}.
Field dtn_flux(const ExtensionSolution& ext);

/// Discrete weighted energy form sum_modes (2L)^N int y^{1-sigma}
/// (a' conj(b)' + omega^2 a conj(b)) dy, assembled with the same fluxes as
/// the scheme; the discrete solution is orthogonal to zero-trace functions
/// in this form.
double energy_form(const ExtensionSolution& a, const ExtensionSolution& b);

/// mu_sigma * energy_form(w, w); converges to the H^{sigma/2} seminorm
/// squared of the boundary datum under (J, Y) refinement.
double weighted_energy(const ExtensionSolution& w);

struct CrossValidationReport {
  std::vector<double> mode_ratios;  // flux / (|omega|^sigma g_hat), significant modes
  std::vector<double> mode_omegas;
  double max_rel_error = 0.0;
  bool truncation_warning = false;
};

/// Compares the DtN flux against the Fourier symbol on every significant mode.
CrossValidationReport cross_validate(const Field& g, double sigma, double height,
                                     int levels);

}  // namespace fpml

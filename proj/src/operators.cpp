#include "fpml/operators.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fpml/fft.hpp"
#include "fpml/frac_params.hpp"

namespace fpml {

std::string to_string(OperatorMode m) {
  switch (m) {
    case OperatorMode::Symbol: return "symbol";
    case OperatorMode::KernelTorus: return "kernel-torus";
    case OperatorMode::KernelFreeSpace: return "kernel-freespace";
    case OperatorMode::Dirichlet: return "dirichlet";
  }
  return "?";
}

OperatorMode operator_mode_from_string(const std::string& s) {
  if (s == "symbol") return OperatorMode::Symbol;
  if (s == "kernel-torus") return OperatorMode::KernelTorus;
  if (s == "kernel-freespace") return OperatorMode::KernelFreeSpace;
  if (s == "dirichlet") return OperatorMode::Dirichlet;
  throw std::invalid_argument("unknown operator mode: " + s);
}

namespace {

void require_torus(const Grid& g, const char* what) {
  if (g.boundary() != Boundary::PeriodicTorus)
    throw std::invalid_argument(std::string(what) + " requires a PeriodicTorus grid");
}

double omega_sq(const Grid& g, std::size_t bin) {
  if (g.dim() == 1) {
    double w = g.omega(static_cast<int>(bin));
    return w * w;
  }
  int m = g.points_per_dim();
  double w0 = g.omega(static_cast<int>(bin) / m);
  double w1 = g.omega(static_cast<int>(bin) % m);
  return w0 * w0 + w1 * w1;
}

double sine_lambda(const Grid& g, std::size_t idx) {
  if (g.dim() == 1) {
    double r = g.sine_rate(static_cast<int>(idx) + 1);
    return r * r;
  }
  int n = g.nodes_per_dim();
  double r0 = g.sine_rate(static_cast<int>(idx) / n + 1);
  double r1 = g.sine_rate(static_cast<int>(idx) % n + 1);
  return r0 * r0 + r1 * r1;
}

}  // namespace

Field apply_symbol_power(const Field& u, double exponent) {
  require_torus(u.grid(), "apply_symbol");
  Spectrum s = forward_transform(u);
  auto& c = s.fourier_coeffs();
  for (std::size_t i = 0; i < c.size(); ++i) {
    double w2 = omega_sq(u.grid(), i);
    c[i] *= w2 == 0.0 ? 0.0 : std::pow(w2, 0.5 * exponent);
  }
  return inverse_transform(s);
}

Field apply_symbol(const Field& u, double sigma) {
  if (!(sigma > 0.0 && sigma < 2.0))
    throw std::invalid_argument("apply_symbol needs sigma in (0,2)");
  return apply_symbol_power(u, sigma);
}

Field apply_dirichlet(const Field& u, double sigma) {
  if (!(sigma > 0.0 && sigma < 2.0))
    throw std::invalid_argument("apply_dirichlet needs sigma in (0,2)");
  if (u.grid().boundary() != Boundary::DirichletBox)
    throw std::invalid_argument("apply_dirichlet requires a DirichletBox grid");
  Spectrum s = forward_transform(u);
  auto& c = s.sine_coeffs();
  for (std::size_t i = 0; i < c.size(); ++i)
    c[i] *= std::pow(sine_lambda(u.grid(), i), 0.5 * sigma);
  return inverse_transform(s);
}

Field heat_kernel(const Grid& g, double sigma, double t) {
  require_torus(g, "heat_kernel");
  if (!(t > 0.0)) throw std::invalid_argument("heat_kernel needs t > 0");
  if (!(sigma > 0.0 && sigma <= 2.0))
    throw std::invalid_argument("heat_kernel needs sigma in (0,2]");
  std::vector<std::complex<double>> c(g.node_count());
  double inv_vol = 1.0 / g.domain_volume();
  for (std::size_t i = 0; i < c.size(); ++i) {
    double w2 = omega_sq(g, i);
    double lam = w2 == 0.0 ? 0.0 : std::pow(w2, 0.5 * sigma);
    c[i] = std::exp(-lam * t) * inv_vol;
  }
  return inverse_transform(Spectrum::make_fourier(g, std::move(c)));
}

FracOperator::FracOperator(const Grid& grid, double sigma, OperatorMode mode,
                           int kernel_images)
    : grid_(grid), sigma_(sigma), mode_(mode) {
  if (!(sigma > 0.0 && sigma < 2.0))
    throw std::invalid_argument("operator needs sigma in (0,2)");
  switch (mode) {
    case OperatorMode::Symbol:
      require_torus(grid, "symbol mode");
      break;
    case OperatorMode::KernelTorus:
      require_torus(grid, "kernel-torus mode");
      kernel_ = std::make_shared<KernelTable>(
          KernelTable::build(grid, sigma, kernel_images, false));
      break;
    case OperatorMode::KernelFreeSpace: {
      if (grid.boundary() != Boundary::FreeSpaceWindow)
        throw std::invalid_argument("kernel-freespace mode requires a FreeSpaceWindow grid");
      kernel_ = std::make_shared<KernelTable>(
          KernelTable::build(grid, sigma, kernel_images, true));
      const auto& k = kernel_->kappa();
      kappa_mean_ = std::accumulate(k.begin(), k.end(), 0.0) / k.size();
      break;
    }
    case OperatorMode::Dirichlet:
      if (grid.boundary() != Boundary::DirichletBox)
        throw std::invalid_argument("dirichlet mode requires a DirichletBox grid");
      break;
  }
}

Field FracOperator::apply(const Field& u) const {
  if (!(u.grid() == grid_)) throw std::invalid_argument("operator grid mismatch");
  switch (mode_) {
    case OperatorMode::Symbol: return apply_symbol_power(u, sigma_);
    case OperatorMode::KernelTorus:
    case OperatorMode::KernelFreeSpace: return kernel_->apply(u);
    case OperatorMode::Dirichlet: return apply_dirichlet(u, sigma_);
  }
  throw std::logic_error("unreachable");
}

double FracOperator::quad_form(const Field& v) const {
  Field av = apply(v);
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += v[i] * av[i];
  return grid_.cell_volume() * s;
}

Field FracOperator::solve_shifted(const Field& rhs, double alpha) const {
  if (!(rhs.grid() == grid_)) throw std::invalid_argument("operator grid mismatch");
  if (mode_ == OperatorMode::Dirichlet) {
    Spectrum s = forward_transform(rhs);
    auto& c = s.sine_coeffs();
    for (std::size_t i = 0; i < c.size(); ++i)
      c[i] /= 1.0 + alpha * std::pow(sine_lambda(grid_, i), 0.5 * sigma_);
    return inverse_transform(s);
  }
  Spectrum s = forward_transform(rhs);
  auto& c = s.fourier_coeffs();
  for (std::size_t i = 0; i < c.size(); ++i) {
    double lam;
    switch (mode_) {
      case OperatorMode::Symbol: {
        double w2 = omega_sq(grid_, i);
        lam = w2 == 0.0 ? 0.0 : std::pow(w2, 0.5 * sigma_);
        break;
      }
      case OperatorMode::KernelTorus:
        lam = kernel_->eigenvalues()[i];
        break;
      default: {  // free-space preconditioner surrogate
        double w2 = omega_sq(grid_, i);
        lam = (w2 == 0.0 ? 0.0 : std::pow(w2, 0.5 * sigma_)) + kappa_mean_;
        break;
      }
    }
    c[i] /= 1.0 + alpha * lam;
  }
  return inverse_transform(s);
}

}  // namespace fpml

#include "fpml/kernel_table.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "fpml/fft.hpp"
#include "fpml/frac_params.hpp"
#include "quadrature.hpp"

namespace fpml {
namespace {

constexpr double kPi = std::numbers::pi;

double integrate_gl(double a, double b, int order, const auto& f) {
  return quad::integrate(a, b, order, f);
}

// Exit distance of the ray p + t (cos th, sin th) from the box [lo,hi]^2;
// p must lie strictly inside.
double ray_box_exit(double px, double py, double lox, double hix, double loy,
                    double hiy, double th) {
  double cx = std::cos(th), cy = std::sin(th);
  double t = std::numeric_limits<double>::infinity();
  if (cx > 0)
    t = std::min(t, (hix - px) / cx);
  else if (cx < 0)
    t = std::min(t, (lox - px) / cx);
  if (cy > 0)
    t = std::min(t, (hiy - py) / cy);
  else if (cy < 0)
    t = std::min(t, (loy - py) / cy);
  return t;
}

// int_0^{2pi} rho(theta)^{-sigma} dtheta for the box exit distance rho, split
// at the corner directions where rho has kinks.
double box_angular_integral(double px, double py, double lox, double hix,
                            double loy, double hiy, double sigma) {
  double cs[4] = {std::atan2(loy - py, lox - px), std::atan2(loy - py, hix - px),
                  std::atan2(hiy - py, lox - px), std::atan2(hiy - py, hix - px)};
  std::vector<double> cuts(cs, cs + 4);
  for (double& c : cuts)
    if (c < 0) c += 2.0 * kPi;
  std::sort(cuts.begin(), cuts.end());
  cuts.push_back(cuts.front() + 2.0 * kPi);
  double total = 0.0;
  for (int a = 0; a < 4; ++a) {
    total += integrate_gl(cuts[a], cuts[a + 1], 32, [&](double th) {
      return std::pow(ray_box_exit(px, py, lox, hix, loy, hiy, th), -sigma);
    });
  }
  return total;
}

// Nearest-neighbour weight of the singular-cell Taylor surrogate: replacing
// the integrand on the cell |z|_inf < h/2 by its quadratic term yields
// c(sigma) h^{-sigma} times the second difference along each axis.
double singular_cell_weight(int dim, double sigma, double h, double c_nsigma) {
  if (dim == 1)
    return c_nsigma * std::pow(2.0, sigma - 2.0) * std::pow(h, -sigma) / (2.0 - sigma);
  // J = int_0^{pi/4} cos(th)^{sigma-2} dth from the square-cell polar integral
  double j = integrate_gl(0.0, 0.25 * kPi, 64,
                          [&](double th) { return std::pow(std::cos(th), sigma - 2.0); });
  return c_nsigma * std::pow(2.0, sigma - 1.0) * j * std::pow(h, -sigma) / (2.0 - sigma);
}

}  // namespace

KernelTable KernelTable::build(const Grid& grid, double sigma, int images,
                               bool freespace) {
  if (freespace && grid.boundary() != Boundary::FreeSpaceWindow)
    throw std::invalid_argument("free-space kernel table needs a FreeSpaceWindow grid");
  if (!freespace && grid.boundary() != Boundary::PeriodicTorus)
    throw std::invalid_argument("torus kernel table needs a PeriodicTorus grid");
  if (images < 1) throw std::invalid_argument("kernel images must be >= 1");
  const int dim = grid.dim();
  const int m = grid.points_per_dim();
  const double l = grid.half_length();
  const double h = grid.spacing();
  const double c = normalization_constant(dim, sigma);
  const double hn = grid.cell_volume();

  KernelTable t;
  t.grid_ = grid;
  t.sigma_ = sigma;
  t.images_ = images;
  t.freespace_ = freespace;

  const double wc = singular_cell_weight(dim, sigma, h, c);

  if (!freespace) {
    const double period = 2.0 * l;
    const double edge = period * (images + 0.5);
    auto centered = [&](int d) { return d <= m / 2 ? d * h : (d - m) * h; };
    if (dim == 1) {
      t.stencil_.assign(m, 0.0);
      for (int d = 1; d < m; ++d) {
        double delta = centered(d);
        double s = 0.0;
        for (int k = -images; k <= images; ++k)
          s += std::pow(std::abs(delta + period * k), -1.0 - sigma);
        // analytic closure of the image sum: midpoint Euler-Maclaurin tail
        for (double a : {edge + delta, edge - delta}) {
          s += std::pow(a, -sigma) / (period * sigma) -
               (1.0 + sigma) * period * std::pow(a, -2.0 - sigma) / 24.0;
        }
        t.stencil_[d] = c * hn * s;
      }
      t.stencil_[1] += wc;
      t.stencil_[m - 1] += wc;
    } else {
      t.stencil_.assign(static_cast<std::size_t>(m) * m, 0.0);
      for (int d0 = 0; d0 < m; ++d0) {
        for (int d1 = 0; d1 < m; ++d1) {
          if (d0 == 0 && d1 == 0) continue;
          double dx = centered(d0), dy = centered(d1);
          double s = 0.0;
          for (int k0 = -images; k0 <= images; ++k0) {
            double zx = dx + period * k0;
            for (int k1 = -images; k1 <= images; ++k1) {
              double zy = dy + period * k1;
              s += std::pow(zx * zx + zy * zy, -(2.0 + sigma) / 2.0);
            }
          }
          s += box_angular_integral(0.0, 0.0, dx - edge, dx + edge, dy - edge,
                                    dy + edge, sigma) /
               (sigma * period * period);
          t.stencil_[static_cast<std::size_t>(d0) * m + d1] = c * hn * s;
        }
      }
      t.stencil_[1] += wc;
      t.stencil_[m - 1] += wc;
      t.stencil_[static_cast<std::size_t>(1) * m] += wc;
      t.stencil_[static_cast<std::size_t>(m - 1) * m] += wc;
    }
  } else {
    const int pad = 2 * m;
    t.pad_ = pad;
    const double blo = -l - 0.5 * h;   // window covered by the node cells
    const double bhi = l - 0.5 * h;
    auto wrap = [pad](int d) { return d >= 0 ? d : d + pad; };
    if (dim == 1) {
      t.stencil_.assign(pad, 0.0);
      for (int d = -(m - 1); d <= m - 1; ++d) {
        if (d == 0) continue;
        t.stencil_[wrap(d)] = c * hn * std::pow(std::abs(d) * h, -1.0 - sigma);
      }
      t.stencil_[wrap(1)] += wc;
      t.stencil_[wrap(-1)] += wc;
      t.kappa_.assign(m, 0.0);
      for (int i = 0; i < m; ++i) {
        double x = grid.coord(i);
        t.kappa_[i] = (c / sigma) * (std::pow(bhi - x, -sigma) + std::pow(x - blo, -sigma));
      }
    } else {
      t.stencil_.assign(static_cast<std::size_t>(pad) * pad, 0.0);
      for (int d0 = -(m - 1); d0 <= m - 1; ++d0) {
        for (int d1 = -(m - 1); d1 <= m - 1; ++d1) {
          if (d0 == 0 && d1 == 0) continue;
          double r2 = (d0 * d0 + d1 * d1) * h * h;
          t.stencil_[static_cast<std::size_t>(wrap(d0)) * pad + wrap(d1)] =
              c * hn * std::pow(r2, -(2.0 + sigma) / 2.0);
        }
      }
      auto at = [&](int d0, int d1) -> double& {
        return t.stencil_[static_cast<std::size_t>(wrap(d0)) * pad + wrap(d1)];
      };
      at(1, 0) += wc;
      at(-1, 0) += wc;
      at(0, 1) += wc;
      at(0, -1) += wc;
      t.kappa_.assign(grid.node_count(), 0.0);
      for (int i0 = 0; i0 < m; ++i0) {
        double x = grid.coord(i0);
        for (int i1 = 0; i1 < m; ++i1) {
          double y = grid.coord(i1);
          t.kappa_[static_cast<std::size_t>(i0) * m + i1] =
              (c / sigma) * box_angular_integral(x, y, blo, bhi, blo, bhi, sigma);
        }
      }
    }
  }

  t.finalize();
  return t;
}

void KernelTable::finalize() {
  const int dim = grid_.dim();
  const int m = grid_.points_per_dim();
  if (!freespace_) {
    double total = 0.0;
    for (double w : stencil_) total += w;
    std::vector<std::complex<double>> buf(stencil_.begin(), stencil_.end());
    raw_dft_n(dim, m, buf.data(), -1);
    eigen_.resize(stencil_.size());
    for (std::size_t i = 0; i < buf.size(); ++i)
      eigen_[i] = std::max(total - buf[i].real(), 0.0);
    eigen_[0] = 0.0;
    return;
  }
  // free-space: transform of the padded stencil plus per-node diagonal
  const int pad = pad_;
  const std::size_t pn = stencil_.size();
  padded_hat_.assign(stencil_.begin(), stencil_.end());
  raw_dft_n(dim, pad, padded_hat_.data(), -1);
  // row sums via convolution with the window indicator
  std::vector<std::complex<double>> ones(pn, 0.0);
  if (dim == 1) {
    for (int i = 0; i < m; ++i) ones[i] = 1.0;
  } else {
    for (int i0 = 0; i0 < m; ++i0)
      for (int i1 = 0; i1 < m; ++i1) ones[static_cast<std::size_t>(i0) * pad + i1] = 1.0;
  }
  raw_dft_n(dim, pad, ones.data(), -1);
  for (std::size_t i = 0; i < pn; ++i) ones[i] *= padded_hat_[i];
  raw_dft_n(dim, pad, ones.data(), +1);
  double scale = 1.0 / static_cast<double>(pn);
  diag_.assign(grid_.node_count(), 0.0);
  if (dim == 1) {
    for (int i = 0; i < m; ++i) diag_[i] = ones[i].real() * scale + kappa_[i];
  } else {
    for (int i0 = 0; i0 < m; ++i0)
      for (int i1 = 0; i1 < m; ++i1)
        diag_[static_cast<std::size_t>(i0) * m + i1] =
            ones[static_cast<std::size_t>(i0) * pad + i1].real() * scale +
            kappa_[static_cast<std::size_t>(i0) * m + i1];
  }
}

Field KernelTable::apply(const Field& u) const {
  if (!(u.grid() == grid_))
    throw std::invalid_argument("kernel table built for a different grid");
  const int dim = grid_.dim();
  const int m = grid_.points_per_dim();
  if (!freespace_) {
    std::vector<std::complex<double>> buf(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) buf[i] = u[i];
    raw_dft_n(dim, m, buf.data(), -1);
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] *= eigen_[i];
    raw_dft_n(dim, m, buf.data(), +1);
    Field out(grid_);
    double scale = 1.0 / static_cast<double>(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = buf[i].real() * scale;
    return out;
  }
  const int pad = pad_;
  const std::size_t pn = padded_hat_.size();
  std::vector<std::complex<double>> buf(pn, 0.0);
  if (dim == 1) {
    for (int i = 0; i < m; ++i) buf[i] = u[i];
  } else {
    for (int i0 = 0; i0 < m; ++i0)
      for (int i1 = 0; i1 < m; ++i1)
        buf[static_cast<std::size_t>(i0) * pad + i1] =
            u[static_cast<std::size_t>(i0) * m + i1];
  }
  raw_dft_n(dim, pad, buf.data(), -1);
  for (std::size_t i = 0; i < pn; ++i) buf[i] *= padded_hat_[i];
  raw_dft_n(dim, pad, buf.data(), +1);
  double scale = 1.0 / static_cast<double>(pn);
  Field out(grid_);
  if (dim == 1) {
    for (int i = 0; i < m; ++i) out[i] = diag_[i] * u[i] - buf[i].real() * scale;
  } else {
    for (int i0 = 0; i0 < m; ++i0)
      for (int i1 = 0; i1 < m; ++i1) {
        std::size_t fi = static_cast<std::size_t>(i0) * m + i1;
        out[fi] = diag_[fi] * u[fi] -
                  buf[static_cast<std::size_t>(i0) * pad + i1].real() * scale;
      }
  }
  return out;
}

const std::vector<double>& KernelTable::eigenvalues() const {
  if (freespace_) throw std::logic_error("free-space kernel has no torus eigenvalues");
  return eigen_;
}

const std::vector<double>& KernelTable::kappa() const {
  if (!freespace_) throw std::logic_error("torus kernel has no exterior weights");
  return kappa_;
}

namespace {
constexpr std::uint32_t kMagic = 0x4B4D5046;  // "FPMK"
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
void get(std::istream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
}
}  // namespace

void KernelTable::save(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  put(os, kMagic);
  put(os, kVersion);
  put(os, static_cast<std::int32_t>(grid_.dim()));
  put(os, static_cast<std::int32_t>(grid_.points_per_dim()));
  put(os, grid_.half_length());
  put(os, sigma_);
  put(os, static_cast<std::int32_t>(freespace_ ? 1 : 0));
  put(os, static_cast<std::int32_t>(images_));
  put(os, static_cast<std::uint64_t>(stencil_.size()));
  os.write(reinterpret_cast<const char*>(stencil_.data()),
           static_cast<std::streamsize>(stencil_.size() * sizeof(double)));
  put(os, static_cast<std::uint64_t>(kappa_.size()));
  os.write(reinterpret_cast<const char*>(kappa_.data()),
           static_cast<std::streamsize>(kappa_.size() * sizeof(double)));
  if (!os) throw std::runtime_error("short write to " + path);
}

KernelTable KernelTable::load_or_build(const Grid& grid, double sigma, int images,
                                       bool freespace, const std::string& cache_dir) {
  char name[160];
  std::snprintf(name, sizeof(name), "kernel-N%d-M%d-L%.17g-s%.17g-%s-K%d.bin",
                grid.dim(), grid.points_per_dim(), grid.half_length(), sigma,
                freespace ? "free" : "torus", images);
  std::string path = cache_dir + "/" + name;
  if (std::ifstream probe(path, std::ios::binary); probe) {
    KernelTable t = load(path);
    if (!(t.grid() == grid) || t.sigma() != sigma || t.images() != images ||
        t.freespace() != freespace)
      throw std::runtime_error("kernel cache key mismatch in " + path);
    return t;
  }
  KernelTable t = build(grid, sigma, images, freespace);
  t.save(path);
  return t;
}

KernelTable KernelTable::load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::uint32_t magic = 0, version = 0;
  get(is, magic);
  get(is, version);
  if (magic != kMagic || version != kVersion)
    throw std::runtime_error("not a kernel table cache: " + path);
  std::int32_t dim = 0, m = 0, fs = 0, images = 0;
  double l = 0.0, sigma = 0.0;
  get(is, dim);
  get(is, m);
  get(is, l);
  get(is, sigma);
  get(is, fs);
  get(is, images);
  KernelTable t;
  t.grid_ = Grid::make(dim, l, m, fs ? Boundary::FreeSpaceWindow : Boundary::PeriodicTorus);
  t.sigma_ = sigma;
  t.images_ = images;
  t.freespace_ = fs != 0;
  t.pad_ = fs ? 2 * m : 0;
  std::uint64_t n = 0;
  get(is, n);
  t.stencil_.resize(n);
  is.read(reinterpret_cast<char*>(t.stencil_.data()),
          static_cast<std::streamsize>(n * sizeof(double)));
  get(is, n);
  t.kappa_.resize(n);
  is.read(reinterpret_cast<char*>(t.kappa_.data()),
          static_cast<std::streamsize>(n * sizeof(double)));
  if (!is) throw std::runtime_error("truncated kernel table cache: " + path);
  t.finalize();
  return t;
}

}  // namespace fpml

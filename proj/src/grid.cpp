#include "fpml/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fpml {

std::string to_string(Boundary b) {
  switch (b) {
    case Boundary::PeriodicTorus: return "torus";
    case Boundary::FreeSpaceWindow: return "freespace";
    case Boundary::DirichletBox: return "dirichlet";
  }
  return "?";
}

Boundary boundary_from_string(const std::string& s) {
  if (s == "torus" || s == "PeriodicTorus") return Boundary::PeriodicTorus;
  if (s == "freespace" || s == "FreeSpaceWindow") return Boundary::FreeSpaceWindow;
  if (s == "dirichlet" || s == "DirichletBox") return Boundary::DirichletBox;
  throw std::invalid_argument("unknown boundary mode: " + s);
}

Grid Grid::make(int dim, double half_length, int points_per_dim, Boundary boundary) {
  if (dim != 1 && dim != 2)
    throw std::invalid_argument("grid dim must be 1 or 2, got " + std::to_string(dim));
  if (!(half_length > 0.0) || !std::isfinite(half_length))
    throw std::invalid_argument("grid half_length must be positive");
  if (points_per_dim < 8)
    throw std::invalid_argument("grid needs at least 8 points per dimension");
  if (points_per_dim % 2 != 0)
    throw std::invalid_argument("grid points_per_dim must be even, got " +
                                std::to_string(points_per_dim));
  Grid g;
  g.dim_ = dim;
  g.half_length_ = half_length;
  g.points_ = points_per_dim;
  g.boundary_ = boundary;
  return g;
}

std::size_t Grid::node_count() const {
  std::size_t n = static_cast<std::size_t>(nodes_per_dim());
  return dim_ == 1 ? n : n * n;
}

double Grid::cell_volume() const {
  double h = spacing();
  return dim_ == 1 ? h : h * h;
}

double Grid::domain_volume() const {
  double s = 2.0 * half_length_;
  return dim_ == 1 ? s : s * s;
}

double Grid::coord(int axis_index) const {
  double h = spacing();
  if (boundary_ == Boundary::DirichletBox)
    return -half_length_ + (axis_index + 1) * h;
  return -half_length_ + axis_index * h;
}

int Grid::freq_index(int bin) const {
  return bin < points_ / 2 ? bin : bin - points_;
}

double Grid::omega(int bin) const {
  return std::numbers::pi * freq_index(bin) / half_length_;
}

double Grid::sine_rate(int mode) const {
  return std::numbers::pi * mode / (2.0 * half_length_);
}

}  // namespace fpml

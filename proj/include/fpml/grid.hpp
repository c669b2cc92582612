#pragma once

#include <cstddef>
#include <string>

namespace fpml {

enum class Boundary { PeriodicTorus, FreeSpaceWindow, DirichletBox };

std::string to_string(Boundary b);
Boundary boundary_from_string(const std::string& s);

/// Uniform mesh on the box [-L, L)^N, N in {1,2}.
///
/// Torus and free-space grids sample the M^N points x_i = -L + i h with
/// h = 2L/M.  A Dirichlet grid keeps the (M-1)^N interior points of the
/// closed box; the boundary values are pinned to zero by the sine basis.
class Grid {
public:
  Grid() = default;

  /// Validates dim in {1,2}, even M >= 8, L > 0.  Throws std::invalid_argument.
  static Grid make(int dim, double half_length, int points_per_dim, Boundary boundary);

  int dim() const { return dim_; }
  double half_length() const { return half_length_; }
  int points_per_dim() const { return points_; }
  Boundary boundary() const { return boundary_; }
  double spacing() const { return 2.0 * half_length_ / points_; }

  int nodes_per_dim() const {
    return boundary_ == Boundary::DirichletBox ? points_ - 1 : points_;
  }
  std::size_t node_count() const;
  double cell_volume() const;    // h^N
  double domain_volume() const;  // (2L)^N

  /// Node coordinate along one axis, index in [0, nodes_per_dim()).
  double coord(int axis_index) const;

  /// Torus frequencies: FFT bin j in [0, M) carries the integer mode
  /// k = j < M/2 ? j : j - M, i.e. k in [-M/2, M/2), and omega = pi k / L.
  int freq_index(int bin) const;
  double omega(int bin) const;

  /// Dirichlet sine-mode rate sqrt(lambda_k) = pi k / (2L), k in [1, M-1].
  double sine_rate(int mode) const;

  bool operator==(const Grid&) const = default;

private:
  int dim_ = 1;
  double half_length_ = 1.0;
  int points_ = 8;
  Boundary boundary_ = Boundary::PeriodicTorus;
};

}  // namespace fpml

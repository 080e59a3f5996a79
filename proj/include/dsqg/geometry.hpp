#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <numbers>
#include <optional>
#include <vector>

namespace dsqg {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Constants of the two-sided bound c0 d(x) <= w1(x) <= C0 d(x), fitted on unmasked nodes.
struct GroundStateBounds {
  double lower = 0.0;  // c0
  double upper = 0.0;  // C0
};

class Geometry;
using GeometryPtr = std::shared_ptr<const Geometry>;

/// The square (0,L)^2 discretized on the interior nodes x_i = i L / N, i = 1..N-1.
///
/// Dirichlet eigenpairs are w_{m,n}(x,y) = (2/L) sin(m pi x/L) sin(n pi y/L) with
/// lambda_{m,n} = (m^2 + n^2)(pi/L)^2 for 1 <= m,n <= N-1. Immutable once built.
class Geometry {
 public:
  int grid_size() const { return n_; }
  /// Modes per axis, also the number of interior nodes per axis.
  int modes() const { return n_ - 1; }
  std::size_t size() const { return static_cast<std::size_t>(modes()) * modes(); }
  double side_length() const { return side_; }
  double spacing() const { return side_ / n_; }
  double corner_radius() const { return corner_radius_; }
  double area() const { return side_ * side_; }

  /// Coordinate of node index i (1-based; 0 and N are the boundary).
  double node(int i) const { return i * spacing(); }
  Point point(int i, int j) const { return {node(i), node(j)}; }
  /// Flat row-major offset of interior node (i,j), both 1-based. Also used for mode (m,n).
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i - 1) * modes() + static_cast<std::size_t>(j - 1);
  }

  double wavenumber(int m) const { return m * std::numbers::pi / side_; }
  double eigenvalue(int m, int n) const;
  double lambda1() const { return eigenvalue(1, 1); }
  /// All eigenvalues in ascending order (with multiplicity).
  std::vector<double> sorted_eigenvalues() const;

  double eigenfunction(int m, int n, Point p) const;
  double ground_state(Point p) const { return eigenfunction(1, 1, p); }
  double distance_to_boundary(Point p) const;
  bool in_corner(Point p) const;

  /// w1 sampled at the interior nodes.
  const std::vector<double>& ground_state() const { return w1_; }
  /// d(x) sampled at the interior nodes.
  const std::vector<double>& distance() const { return dist_; }
  /// 1 where the node lies within corner_radius of a corner.
  const std::vector<std::uint8_t>& corner_mask() const { return mask_; }
  const GroundStateBounds& ground_state_bounds() const { return bounds_; }

  /// Same square and corner radius with factor times as many cells per axis.
  GeometryPtr refined(int factor) const;

  bool same_grid(const Geometry& other) const {
    return n_ == other.n_ && side_ == other.side_;
  }

 private:
  friend GeometryPtr build_square_geometry(int, double, std::optional<double>);
  Geometry() = default;

  int n_ = 0;
  double side_ = 0.0;
  double corner_radius_ = 0.0;
  std::vector<double> w1_;
  std::vector<double> dist_;
  std::vector<std::uint8_t> mask_;
  GroundStateBounds bounds_;
};

/// Requires N >= 8, side_length > 0 and 0 <= corner_radius < side_length/4.
/// The corner radius defaults to 0.05 side_length.
GeometryPtr build_square_geometry(int n, double side_length = std::numbers::pi,
                                  std::optional<double> corner_radius = std::nullopt);

/// c0 = min, C0 = max of w1/d over unmasked interior nodes.
GroundStateBounds fit_ground_state_equivalence(const Geometry& geometry);

}  // namespace dsqg

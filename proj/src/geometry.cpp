#include "dsqg/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dsqg/errors.hpp"

namespace dsqg {

double Geometry::eigenvalue(int m, int n) const {
  const double k = std::numbers::pi / side_;
  return (static_cast<double>(m) * m + static_cast<double>(n) * n) * k * k;
}

std::vector<double> Geometry::sorted_eigenvalues() const {
  std::vector<double> out;
  out.reserve(size());
  for (int m = 1; m <= modes(); ++m)
    for (int n = 1; n <= modes(); ++n) out.push_back(eigenvalue(m, n));
  std::sort(out.begin(), out.end());
  return out;
}

double Geometry::eigenfunction(int m, int n, Point p) const {
  return (2.0 / side_) * std::sin(wavenumber(m) * p.x) * std::sin(wavenumber(n) * p.y);
}

double Geometry::distance_to_boundary(Point p) const {
  return std::min({p.x, p.y, side_ - p.x, side_ - p.y});
}

bool Geometry::in_corner(Point p) const {
  if (corner_radius_ <= 0.0) return false;
  const double dx = std::min(p.x, side_ - p.x);
  const double dy = std::min(p.y, side_ - p.y);
  return std::hypot(dx, dy) < corner_radius_;
}

GeometryPtr Geometry::refined(int factor) const {
  if (factor < 1) throw ConfigurationError("refinement factor must be >= 1");
  return build_square_geometry(n_ * factor, side_, corner_radius_);
}

GeometryPtr build_square_geometry(int n, double side_length, std::optional<double> corner_radius) {
  const double radius = corner_radius.value_or(0.05 * side_length);
  if (n < 8) throw ConfigurationError("N >= 8 required, got " + std::to_string(n));
  if (!(side_length > 0.0) || !std::isfinite(side_length))
    throw ConfigurationError("side_length must be positive and finite");
  if (!(radius >= 0.0) || !(radius < side_length / 4.0))
    throw ConfigurationError("corner_radius must lie in [0, side_length/4)");

  auto g = std::shared_ptr<Geometry>(new Geometry());
  g->n_ = n;
  g->side_ = side_length;
  g->corner_radius_ = radius;

  const int k = n - 1;
  const double h = side_length / n;
  std::vector<double> s(k);
  for (int i = 1; i <= k; ++i) s[i - 1] = std::sin(std::numbers::pi * i / n);

  g->w1_.resize(g->size());
  g->dist_.resize(g->size());
  g->mask_.resize(g->size());
  for (int i = 1; i <= k; ++i) {
    for (int j = 1; j <= k; ++j) {
      const std::size_t idx = g->index(i, j);
      g->w1_[idx] = (2.0 / side_length) * s[i - 1] * s[j - 1];
      // integer form keeps d exactly symmetric under the dihedral group
      g->dist_[idx] = std::min({i, n - i, j, n - j}) * h;
      g->mask_[idx] = g->in_corner(g->point(i, j)) ? 1 : 0;
    }
  }
  g->bounds_ = fit_ground_state_equivalence(*g);
  return g;
}

GroundStateBounds fit_ground_state_equivalence(const Geometry& geometry) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  const auto& w1 = geometry.ground_state();
  const auto& d = geometry.distance();
  const auto& mask = geometry.corner_mask();
  for (std::size_t idx = 0; idx < w1.size(); ++idx) {
    if (mask[idx]) continue;
    const double r = w1[idx] / d[idx];
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  if (!std::isfinite(lo)) throw ConfigurationError("every interior node is corner-masked");
  return {lo, hi};
}

}  // namespace dsqg

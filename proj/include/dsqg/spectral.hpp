#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dsqg/geometry.hpp"

namespace dsqg {

/// Values at the interior collocation nodes, row-major with x as the slow index.
/// Boundary values are implicitly zero.
class GridField {
 public:
  explicit GridField(GeometryPtr geometry);
  GridField(GeometryPtr geometry, std::vector<double> values);

  static GridField sample(GeometryPtr geometry, const std::function<double(Point)>& fn);

  const Geometry& geometry() const { return *geometry_; }
  const GeometryPtr& geometry_ptr() const { return geometry_; }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }
  double& at(int i, int j) { return values_[geometry_->index(i, j)]; }
  double at(int i, int j) const { return values_[geometry_->index(i, j)]; }

  double max_abs() const;

  GridField& operator+=(const GridField& other);
  GridField& operator-=(const GridField& other);
  GridField& operator*=(double s);

 private:
  GeometryPtr geometry_;
  std::vector<double> values_;
};

GridField operator+(GridField a, const GridField& b);
GridField operator-(GridField a, const GridField& b);
GridField operator*(double s, GridField a);
/// Pointwise product of grid samples.
GridField pointwise(const GridField& a, const GridField& b);

/// Coefficients a_{m,n} on the Dirichlet eigenbasis, f = sum a_{m,n} w_{m,n}.
class SpectralField {
 public:
  explicit SpectralField(GeometryPtr geometry, std::string tag = {});
  SpectralField(GeometryPtr geometry, std::vector<double> coefficients, std::string tag = {});

  /// amplitude * w_{m,n}
  static SpectralField mode(GeometryPtr geometry, int m, int n, double amplitude = 1.0);

  const Geometry& geometry() const { return *geometry_; }
  const GeometryPtr& geometry_ptr() const { return geometry_; }
  const std::string& tag() const { return tag_; }
  void set_tag(std::string tag) { tag_ = std::move(tag); }

  std::vector<double>& coefficients() { return coeffs_; }
  const std::vector<double>& coefficients() const { return coeffs_; }
  double& at(int m, int n) { return coeffs_[geometry_->index(m, n)]; }
  double at(int m, int n) const { return coeffs_[geometry_->index(m, n)]; }

  /// ||f||_{L^2} through Parseval.
  double l2_norm() const;
  /// Point evaluation by direct summation.
  double evaluate(Point p) const;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double s);

 private:
  GeometryPtr geometry_;
  std::string tag_;
  std::vector<double> coeffs_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

void require_same_geometry(const Geometry& a, const Geometry& b);

/// a_{m,n} = discrete <f, w_{m,n}>; exact inverse of inverse().
SpectralField forward(const GridField& field);
GridField inverse(const SpectralField& field);

/// Spectral partial derivatives sampled at the interior nodes.
std::pair<GridField, GridField> gradient(const SpectralField& field);

/// Exact L^2 projection of f*g onto the retained modes.
///
/// The product of two sine series is a cosine series of degree 2N-2 per axis; its cosine
/// coefficients are recovered without aliasing on a 2N-cell grid and projected onto the
/// sine modes with the closed-form integrals of cos(j t) sin(m t).
SpectralField dealiased_product(const SpectralField& f, const SpectralField& g);

/// Samples of d^a/dx^a d^b/dy^b f (a,b in {0,1,2}) at the interior nodes of an M-cell grid.
std::vector<double> sample_derivative(const SpectralField& f, int cells, int order_x, int order_y);

/// Sine coefficients of interior samples on an M-cell grid, truncated to the geometry's modes.
SpectralField project_samples(GeometryPtr geometry, std::span<const double> values, int cells,
                              std::string tag = {});

/// Subsamples values on a (factor*N)-cell grid at the nodes of the N-cell grid.
GridField restrict_to_grid(GeometryPtr geometry, std::span<const double> fine_values, int factor);

}  // namespace dsqg

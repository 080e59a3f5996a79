#include "dsqg/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dsqg/errors.hpp"
#include "dsqg/transforms.hpp"

namespace dsqg {

// ---------------------------------------------------------------- GridField

GridField::GridField(GeometryPtr geometry)
    : geometry_(std::move(geometry)), values_(geometry_->size(), 0.0) {}

GridField::GridField(GeometryPtr geometry, std::vector<double> values)
    : geometry_(std::move(geometry)), values_(std::move(values)) {
  if (values_.size() != geometry_->size()) throw ShapeError("grid values do not match the geometry");
}

GridField GridField::sample(GeometryPtr geometry, const std::function<double(Point)>& fn) {
  GridField out(geometry);
  const int k = geometry->modes();
  for (int i = 1; i <= k; ++i)
    for (int j = 1; j <= k; ++j) out.at(i, j) = fn(geometry->point(i, j));
  return out;
}

double GridField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

GridField& GridField::operator+=(const GridField& other) {
  require_same_geometry(*geometry_, other.geometry());
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

GridField& GridField::operator-=(const GridField& other) {
  require_same_geometry(*geometry_, other.geometry());
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

GridField& GridField::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

GridField operator+(GridField a, const GridField& b) { return a += b; }
GridField operator-(GridField a, const GridField& b) { return a -= b; }
GridField operator*(double s, GridField a) { return a *= s; }

GridField pointwise(const GridField& a, const GridField& b) {
  require_same_geometry(a.geometry(), b.geometry());
  GridField out(a.geometry_ptr());
  for (std::size_t i = 0; i < out.values().size(); ++i) out.values()[i] = a.values()[i] * b.values()[i];
  return out;
}

// ------------------------------------------------------------ SpectralField

SpectralField::SpectralField(GeometryPtr geometry, std::string tag)
    : geometry_(std::move(geometry)), tag_(std::move(tag)), coeffs_(geometry_->size(), 0.0) {}

SpectralField::SpectralField(GeometryPtr geometry, std::vector<double> coefficients, std::string tag)
    : geometry_(std::move(geometry)), tag_(std::move(tag)), coeffs_(std::move(coefficients)) {
  if (coeffs_.size() != geometry_->size()) throw ShapeError("coefficients do not match the geometry");
}

SpectralField SpectralField::mode(GeometryPtr geometry, int m, int n, double amplitude) {
  const int k = geometry->modes();
  if (m < 1 || n < 1 || m > k || n > k) throw ConfigurationError("mode index out of range");
  SpectralField out(std::move(geometry));
  out.at(m, n) = amplitude;
  return out;
}

double SpectralField::l2_norm() const {
  double s = 0.0;
  for (double a : coeffs_) s += a * a;
  return std::sqrt(s);
}

double SpectralField::evaluate(Point p) const {
  const int k = geometry_->modes();
  std::vector<double> sx(k), sy(k);
  for (int m = 1; m <= k; ++m) {
    sx[m - 1] = std::sin(geometry_->wavenumber(m) * p.x);
    sy[m - 1] = std::sin(geometry_->wavenumber(m) * p.y);
  }
  double total = 0.0;
  for (int m = 1; m <= k; ++m) {
    double row = 0.0;
    for (int n = 1; n <= k; ++n) row += at(m, n) * sy[n - 1];
    total += row * sx[m - 1];
  }
  return total * 2.0 / geometry_->side_length();
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  require_same_geometry(*geometry_, other.geometry());
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  require_same_geometry(*geometry_, other.geometry());
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (double& a : coeffs_) a *= s;
  return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

void require_same_geometry(const Geometry& a, const Geometry& b) {
  if (!a.same_grid(b)) throw ShapeError("fields live on different geometries");
}

// ---------------------------------------------------------------- transforms

SpectralField forward(const GridField& field) {
  for (double v : field.values())
    if (!std::isfinite(v)) throw NumericError("forward transform of a non-finite grid field");
  const auto& g = field.geometry();
  return project_samples(field.geometry_ptr(), field.values(), g.grid_size());
}

GridField inverse(const SpectralField& field) {
  const auto& g = field.geometry();
  return GridField(field.geometry_ptr(), sample_derivative(field, g.grid_size(), 0, 0));
}

std::vector<double> sample_derivative(const SpectralField& f, int cells, int order_x, int order_y) {
  const Geometry& g = f.geometry();
  const int k = g.modes();
  if (cells < g.grid_size()) throw ConfigurationError("sampling grid coarser than the field");
  if (order_x < 0 || order_x > 2 || order_y < 0 || order_y > 2)
    throw ConfigurationError("derivative order must be 0, 1 or 2");

  const Parity px = order_x == 1 ? Parity::kCosine : Parity::kSine;
  const Parity py = order_y == 1 ? Parity::kCosine : Parity::kSine;
  const int cx = coefficient_count(px, k);
  const int cy = coefficient_count(py, k);
  const int offx = px == Parity::kCosine ? 0 : 1;  // coefficient row r holds mode r + offx
  const int offy = py == Parity::kCosine ? 0 : 1;

  auto factor = [&](int mode, int order) {
    const double kw = g.wavenumber(mode);
    return order == 0 ? 1.0 : (order == 1 ? kw : -kw * kw);
  };

  std::vector<double> block(static_cast<std::size_t>(cx) * cy, 0.0);
  const double norm = 2.0 / g.side_length();
  for (int m = 1; m <= k; ++m) {
    const double fx = factor(m, order_x) * norm;
    for (int n = 1; n <= k; ++n) {
      block[static_cast<std::size_t>(m - offx) * cy + (n - offy)] = f.at(m, n) * fx * factor(n, order_y);
    }
  }
  std::vector<double> full = synthesize(block, k, px, py, cells);

  if (px == Parity::kSine && py == Parity::kSine) return full;
  const int sy = sample_count(py, cells);
  const int bx = px == Parity::kCosine ? 1 : 0;  // skip boundary rows
  const int by = py == Parity::kCosine ? 1 : 0;
  std::vector<double> interior(static_cast<std::size_t>(cells - 1) * (cells - 1));
  for (int i = 0; i < cells - 1; ++i)
    for (int j = 0; j < cells - 1; ++j)
      interior[static_cast<std::size_t>(i) * (cells - 1) + j] =
          full[static_cast<std::size_t>(i + bx) * sy + (j + by)];
  return interior;
}

SpectralField project_samples(GeometryPtr geometry, std::span<const double> values, int cells,
                              std::string tag) {
  const int k = geometry->modes();
  const int kept = std::min(k, cells - 1);
  std::vector<double> c = analyze(values, Parity::kSine, Parity::kSine, cells, kept);
  SpectralField out(geometry, std::move(tag));
  const double scale = geometry->side_length() / 2.0;
  for (int m = 1; m <= kept; ++m)
    for (int n = 1; n <= kept; ++n)
      out.at(m, n) = c[static_cast<std::size_t>(m - 1) * kept + (n - 1)] * scale;
  return out;
}

GridField restrict_to_grid(GeometryPtr geometry, std::span<const double> fine_values, int factor) {
  const int k = geometry->modes();
  const int fine = geometry->grid_size() * factor - 1;
  if (fine_values.size() != static_cast<std::size_t>(fine) * fine)
    throw ShapeError("fine grid samples have the wrong size");
  GridField out(geometry);
  for (int i = 1; i <= k; ++i)
    for (int j = 1; j <= k; ++j)
      out.at(i, j) = fine_values[static_cast<std::size_t>(i * factor - 1) * fine + (j * factor - 1)];
  return out;
}

std::pair<GridField, GridField> gradient(const SpectralField& field) {
  const int n = field.geometry().grid_size();
  return {GridField(field.geometry_ptr(), sample_derivative(field, n, 1, 0)),
          GridField(field.geometry_ptr(), sample_derivative(field, n, 0, 1))};
}

SpectralField dealiased_product(const SpectralField& f, const SpectralField& g) {
  require_same_geometry(f.geometry(), g.geometry());
  const Geometry& geo = f.geometry();
  const int k = geo.modes();
  const int cells = 2 * geo.grid_size();

  const std::vector<double> fv = sample_derivative(f, cells, 0, 0);
  const std::vector<double> gv = sample_derivative(g, cells, 0, 0);
  const int full = cells + 1;
  std::vector<double> prod(static_cast<std::size_t>(full) * full, 0.0);  // boundary rows stay zero
  for (int i = 1; i < cells; ++i)
    for (int j = 1; j < cells; ++j) {
      const std::size_t src = static_cast<std::size_t>(i - 1) * (cells - 1) + (j - 1);
      prod[static_cast<std::size_t>(i) * full + j] = fv[src] * gv[src];
    }
  // product = sum_{j,l} gamma_{jl} cos(j pi x/L) cos(l pi y/L), exactly, since degree <= 2N-2 <= cells
  const std::vector<double> gamma = analyze(prod, Parity::kCosine, Parity::kCosine, cells, cells);

  // I[m][j] = int_0^pi cos(j t) sin(m t) dt
  std::vector<double> proj(static_cast<std::size_t>(k) * full, 0.0);
  for (int m = 1; m <= k; ++m)
    for (int j = (m + 1) % 2; j <= cells; j += 2)
      proj[static_cast<std::size_t>(m - 1) * full + j] =
          2.0 * m / (static_cast<double>(m) * m - static_cast<double>(j) * j);

  // contract the y axis: t[j][n] = sum_l gamma[j][l] I[n][l]
  std::vector<double> t(static_cast<std::size_t>(full) * k, 0.0);
  for (int j = 0; j <= cells; ++j) {
    const double* grow = &gamma[static_cast<std::size_t>(j) * full];
    for (int n = 1; n <= k; ++n) {
      const double* prow = &proj[static_cast<std::size_t>(n - 1) * full];
      double s = 0.0;
      for (int l = (n + 1) % 2; l <= cells; l += 2) s += grow[l] * prow[l];
      t[static_cast<std::size_t>(j) * k + (n - 1)] = s;
    }
  }
  const double scale =
      (2.0 / geo.side_length()) * std::pow(geo.side_length() / std::numbers::pi, 2);
  SpectralField out(f.geometry_ptr(), "product");
  for (int m = 1; m <= k; ++m) {
    const double* prow = &proj[static_cast<std::size_t>(m - 1) * full];
    for (int n = 1; n <= k; ++n) {
      double s = 0.0;
      for (int j = (m + 1) % 2; j <= cells; j += 2) s += prow[j] * t[static_cast<std::size_t>(j) * k + (n - 1)];
      out.at(m, n) = s * scale;
    }
  }
  return out;
}

}  // namespace dsqg

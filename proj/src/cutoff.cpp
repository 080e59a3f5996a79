#include "dsqg/cutoff.hpp"

#include <cmath>
#include <sstream>

#include "dsqg/errors.hpp"
#include "dsqg/operators.hpp"

namespace dsqg {

namespace {
constexpr double kInner = 5.0 / 16.0;
constexpr double kOuter = 7.0 / 16.0;
constexpr double kBand = kOuter - kInner;
}  // namespace

double cutoff_profile(double z) {
  if (z <= kInner) return 1.0;
  if (z >= kOuter) return 0.0;
  const double s = (z - kInner) / kBand;
  return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

double cutoff_profile_derivative(double z) {
  if (z <= kInner || z >= kOuter) return 0.0;
  const double s = (z - kInner) / kBand;
  return -30.0 * s * s * (1.0 - s) * (1.0 - s) / kBand;
}

CutoffPair standard_cutoff(GeometryPtr geometry, Point center, double scale, std::optional<double> max_scale) {
  const double l0 = max_scale.value_or(geometry->side_length() / 4.0);
  if (!(scale > 0.0) || scale > l0) {
    std::ostringstream msg;
    msg << "cutoff scale " << scale << " must lie in (0, " << l0 << "]";
    throw PreconditionError(msg.str());
  }
  const double d0 = geometry->distance_to_boundary(center);
  if (d0 < 2.0 * scale) {
    std::ostringstream msg;
    msg << "cutoff needs d(x0) >= 2 l, got d(x0) = " << d0 << " and l = " << scale;
    throw PreconditionError(msg.str());
  }
  CutoffPair c{center, scale, GridField(geometry), GridField(geometry), GridField(geometry)};
  const int k = geometry->modes();
  for (int i = 1; i <= k; ++i)
    for (int j = 1; j <= k; ++j) {
      const Point p = geometry->point(i, j);
      const double r = std::hypot(p.x - center.x, p.y - center.y);
      c.phi.at(i, j) = cutoff_profile(r / scale);
      c.chi.at(i, j) = cutoff_profile(r / (2.0 * scale));
      c.chi_gradient.at(i, j) = std::abs(cutoff_profile_derivative(r / (2.0 * scale))) / (2.0 * scale);
    }
  return c;
}

double Displacement::length(double spacing) const { return std::hypot(di, dj) * spacing; }

Displacement commensurate_displacement(const Geometry& geometry, double hx, double hy) {
  const double h = geometry.spacing();
  auto steps = [&](double v) {
    const double q = v / h;
    const double r = std::round(q);
    if (std::abs(q - r) > 1e-9 * std::max(1.0, std::abs(q))) {
      std::ostringstream msg;
      msg << "displacement component " << v << " is not a multiple of the grid spacing " << h;
      throw ConfigurationError(msg.str());
    }
    return static_cast<int>(r);
  };
  return {steps(hx), steps(hy)};
}

MaskedGridField finite_difference(const GridField& f, Displacement h) {
  const Geometry& g = f.geometry();
  const int k = g.modes();
  MaskedGridField out{GridField(f.geometry_ptr()), std::vector<std::uint8_t>(g.size(), 0)};
  for (int i = 1; i <= k; ++i) {
    const int ii = i + h.di;
    if (ii < 1 || ii > k) continue;
    for (int j = 1; j <= k; ++j) {
      const int jj = j + h.dj;
      if (jj < 1 || jj > k) continue;
      out.values.at(i, j) = f.at(ii, jj) - f.at(i, j);
      out.valid[g.index(i, j)] = 1;
    }
  }
  return out;
}

MaskedGridField finite_difference(const SpectralField& f, Displacement h) {
  return finite_difference(inverse(f), h);
}

GridField commutator(const SpectralField& theta, const CutoffPair& cutoff, Displacement h) {
  require_same_geometry(theta.geometry(), cutoff.phi.geometry());
  const Geometry& g = theta.geometry();
  if (h.length(g.spacing()) > cutoff.scale / 16.0 * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "commutator needs |h| <= l/16, got |h| = " << h.length(g.spacing()) << " and l = " << cutoff.scale;
    throw PreconditionError(msg.str());
  }
  GridField out(theta.geometry_ptr());
  if (h.di == 0 && h.dj == 0) return out;

  const MaskedGridField dl = finite_difference(apply_lambda_power(theta, 1.0), h);
  const MaskedGridField dt = finite_difference(theta, h);
  GridField localized = pointwise(cutoff.chi, dt.values);
  const GridField lambda_localized = inverse(apply_lambda_power(forward(localized), 1.0));
  for (std::size_t i = 0; i < out.values().size(); ++i)
    out.values()[i] = cutoff.phi.values()[i] * (dl.values.values()[i] - lambda_localized.values()[i]);
  return out;
}

GridField commutator(const SpectralField& theta, Point center, double scale, Displacement h) {
  return commutator(theta, standard_cutoff(theta.geometry_ptr(), center, scale), h);
}

}  // namespace dsqg

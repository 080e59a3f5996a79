#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dsqg/spectral.hpp"

namespace dsqg {

/// Nonincreasing profile: 1 on z <= 5/16, 0 on z >= 7/16, quintic smoothstep in between.
double cutoff_profile(double z);
/// d/dz of cutoff_profile.
double cutoff_profile_derivative(double z);

/// phi = Psi(|x - x0| / l) and its companion chi = Psi(|x - x0| / (2 l)), sampled at the nodes.
struct CutoffPair {
  Point center;
  double scale = 0.0;
  GridField phi;
  GridField chi;
  /// |grad chi| at the nodes, from the closed-form profile derivative.
  GridField chi_gradient;
};

/// Requires d(x0) >= 2 l and 0 < l <= l0. l0 defaults to L/4.
CutoffPair standard_cutoff(GeometryPtr geometry, Point center, double scale,
                           std::optional<double> max_scale = std::nullopt);

/// Grid-commensurate displacement h = (di, dj) * spacing.
struct Displacement {
  int di = 0;
  int dj = 0;

  double length(double spacing) const;
  Displacement operator-() const { return {-di, -dj}; }
};

/// Converts a physical displacement to grid steps. Throws ConfigurationError unless each
/// component is an integer multiple of the spacing (to 1e-9 relative).
Displacement commensurate_displacement(const Geometry& geometry, double hx, double hy);

/// Grid values with a per-node validity flag.
struct MaskedGridField {
  GridField values;
  std::vector<std::uint8_t> valid;
};

/// delta_h f(x) = f(x + h) - f(x) where x + h is an interior node; invalid (and 0) elsewhere.
MaskedGridField finite_difference(const GridField& f, Displacement h);
MaskedGridField finite_difference(const SpectralField& f, Displacement h);

/// C_h(theta) = phi delta_h(Lambda theta) - phi Lambda(chi delta_h theta).
///
/// chi delta_h theta is transformed on the collocation grid before Lambda is applied. Requires
/// |h| <= l/16 and the cutoff preconditions; throws PreconditionError otherwise.
GridField commutator(const SpectralField& theta, const CutoffPair& cutoff, Displacement h);
GridField commutator(const SpectralField& theta, Point center, double scale, Displacement h);

}  // namespace dsqg

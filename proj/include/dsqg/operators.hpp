#pragma once

#include <functional>
#include <string>

#include "dsqg/spectral.hpp"

namespace dsqg {

/// Lambda^s f: multiplies a_{m,n} by lambda_{m,n}^{s/2}. Requires s in [-1, 2].
SpectralField apply_lambda_power(const SpectralField& f, double s);

/// e^{t Delta} f. Requires t >= 0.
SpectralField heat_semigroup(const SpectralField& f, double t);

struct HeatQuadrature {
  double tolerance = 1e-12;
  int max_doublings = 6;
};

/// c_s * integral_0^inf (f - e^{t Delta} f) t^{-1-s/2} dt for s in (0, 2).
///
/// Evaluated in u = log t on [t_min, t_max] by composite Gauss-Legendre; the tail above t_max
/// is added analytically for the f term and dropped for the decayed term. Throws NumericError
/// when doubling the panel count does not settle the result to the requested tolerance.
SpectralField lambda_via_heat(const SpectralField& f, double s, const HeatQuadrature& quadrature = {});

/// c_s such that lambda_via_heat reproduces lambda^{s/2} on w_1, calibrated numerically.
double heat_representation_constant(const Geometry& geometry, double s,
                                    const HeatQuadrature& quadrature = {});

/// Grid samples of a velocity u = J grad(psi), J the rotation by rotation_sign * pi/2.
struct VelocityField {
  GridField ux;
  GridField uy;
  SpectralField stream;
  int rotation_sign = 1;
  /// max |div u| over all nodes including the boundary, evaluated from the coefficients.
  double max_divergence = 0.0;
  /// max |u . n| over boundary nodes, by direct summation on each side.
  double max_normal_trace = 0.0;

  double max_speed() const;
};

VelocityField velocity_from_stream(const SpectralField& psi, int rotation_sign = 1);

/// u = J grad Lambda^{-1} theta.
VelocityField riesz_velocity(const SpectralField& theta, int rotation_sign = 1);

/// Mode multiplier c * integral_0^tau t^{-1/2} e^{-t lambda} dt with c = pi^{-1/2} applied to
/// theta before J grad, so the result tends to riesz_velocity as tau grows.
VelocityField short_time_velocity(const SpectralField& theta, double tau, int rotation_sign = 1);

/// Samples g(f) on a 2N-cell grid and returns its discrete sine coefficients on the retained
/// modes. Exact when g(f) is a sine polynomial of degree below 2N per axis (g odd and linear,
/// or g(f) = f h with h a cosine polynomial of low degree); otherwise a quadrature of the
/// projection.
SpectralField compose(const SpectralField& f, const std::function<double(double)>& g);

/// D(f) = f Lambda f - 1/2 Lambda(f^2) at the grid nodes, with f^2 dealiased.
GridField nonlinear_dissipation(const SpectralField& f);

/// Scalar function with its first two derivatives, used as the convex Phi.
struct ConvexFunction {
  std::string name;
  std::function<double(double)> value;
  std::function<double(double)> first;
  std::function<double(double)> second;

  static ConvexFunction linear(double slope = 1.0);
  static ConvexFunction square();
  static ConvexFunction half_square();
  /// C^2 version of (z - B)_+: equal to it outside [B - s, B + s], with Phi'' = (s - |z - B|)_+ / s^2.
  /// Shifted so that Phi(0) = 0 when B < s.
  static ConvexFunction smoothed_hinge(double threshold, double sharpness);
  /// z -> -Phi(z); concave whenever Phi is convex.
  ConvexFunction reflected() const;
};

/// Throws PreconditionError if Phi(0) != 0 or Phi'' < 0 somewhere in [lo, hi].
void require_convex(const ConvexFunction& phi, double lo, double hi);

struct WeightedConvexityTerms {
  GridField lhs;       // Phi'(b) Lambda(w b) - Lambda(w Phi(b))
  GridField rhs_core;  // (Lambda w) (b Phi'(b) - Phi(b))
  GridField defect;    // lhs - rhs_core
  GridField ratio;     // b = theta / w at the nodes
};

/// Terms of the weighted convexity identity for b = theta / w.
///
/// w Phi(b) is sampled on a 2N-cell grid and projected, so the result is exact whenever
/// w Phi(b) is a sine polynomial of degree below 2N (for instance w = w_1 and Phi = z^2).
/// Throws DomainError if w <= 0 at any sampled node and PreconditionError if Phi fails
/// require_convex on the sampled range of b. Set check_convexity to false to evaluate
/// a concave Phi.
WeightedConvexityTerms weighted_convexity_terms(const SpectralField& theta, const SpectralField& w,
                                                const ConvexFunction& phi, bool check_convexity = true);

}  // namespace dsqg

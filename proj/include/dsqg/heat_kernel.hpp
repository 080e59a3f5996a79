#pragma once

#include <array>

#include "dsqg/geometry.hpp"

namespace dsqg {

/// H_D(t, x, y) = sum_j e^{-t lambda_j} w_j(x) w_j(y), truncated to m, n <= modes.
struct HeatKernelSample {
  Point x;
  Point y;
  double t = 0.0;
  double value = 0.0;
  int modes = 0;
  /// Bound on the omitted part of the eigensum.
  double tail_bound = 0.0;
  /// Set when tail_bound exceeds the requested tolerance.
  bool truncation_warning = false;
};

/// Value and spatial derivatives of H_D, differentiated term by term.
struct HeatKernelJet {
  double value = 0.0;
  std::array<double, 2> grad_x{};
  std::array<double, 2> grad_y{};
  /// d^2 H / dx_i dx_j
  std::array<std::array<double, 2>, 2> hess_xx{};
  /// d^2 H / dx_i dy_j
  std::array<std::array<double, 2>, 2> hess_xy{};
};

/// Modes per axis needed for the 1D eigensum tail to fall below tol at time t.
int heat_kernel_modes(double side_length, double t, double tol);

/// Pass modes = 0 to pick heat_kernel_modes(L, t, tol). Throws DomainError for t <= 0 and
/// ConfigurationError for negative modes. Modes are not limited by the grid size since the
/// eigenfunctions are evaluated in closed form.
HeatKernelSample heat_kernel(const Geometry& geometry, Point x, Point y, double t, int modes = 0,
                             double tol = 1e-12);

HeatKernelJet heat_kernel_jet(const Geometry& geometry, Point x, Point y, double t, int modes = 0,
                              double tol = 1e-12);

/// (e^{t Delta} 1)(a) on the interval (0, L), by images for short times and by the sine
/// series for long times.
double heat_of_unity_1d(double t, double a, double side_length);

/// (Lambda 1)(x) = c_1 integral_0^inf (1 - e^{t Delta} 1)(x) t^{-3/2} dt on the square,
/// with c_1 = 1/(2 sqrt(pi)), evaluated by quadrature in log t.
double lambda_of_unity(const Geometry& geometry, Point x, double tol = 1e-12);

}  // namespace dsqg

#include "dsqg/heat_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "dsqg/errors.hpp"
#include "dsqg/numerics.hpp"

namespace dsqg {

namespace {

// Dirichlet heat kernel of (0, L) and its derivatives in the two arguments a and b.
struct AxisKernel {
  double k = 0.0, ka = 0.0, kb = 0.0, kaa = 0.0, kab = 0.0;
};

AxisKernel axis_kernel(double t, double a, double b, double side, int modes, bool derivatives) {
  AxisKernel out;
  const double base = std::numbers::pi / side;
  for (int j = 1; j <= modes; ++j) {
    const double kappa = j * base;
    const double e = std::exp(-t * kappa * kappa);
    if (e == 0.0) break;
    const double sa = std::sin(kappa * a), sb = std::sin(kappa * b);
    out.k += e * (sa * sb);
    if (!derivatives) continue;
    const double ca = std::cos(kappa * a), cb = std::cos(kappa * b);
    out.ka += e * kappa * (ca * sb);
    out.kb += e * kappa * (sa * cb);
    out.kaa -= e * kappa * kappa * (sa * sb);
    out.kab += e * kappa * kappa * (ca * cb);
  }
  const double c = 2.0 / side;
  out.k *= c;
  out.ka *= c;
  out.kb *= c;
  out.kaa *= c;
  out.kab *= c;
  return out;
}

// Bound on (2/L) sum_{j > modes} e^{-t kappa_j^2}.
double axis_tail(double t, double side, int modes) {
  const double base = std::numbers::pi / side;
  const double first = std::exp(-t * std::pow((modes + 1) * base, 2));
  const double ratio = std::exp(-t * base * base * (2.0 * modes + 3.0));
  return (2.0 / side) * first / (1.0 - ratio);
}

// Bound on (2/L) sum_j e^{-t kappa_j^2}, the sup of the 1D kernel.
double axis_sup(double t, double side) {
  const double base = std::numbers::pi / side;
  return (2.0 / side) * (std::exp(-t * base * base) + 0.5 / (base * std::sqrt(t)) * std::sqrt(std::numbers::pi));
}

void check_time(double t) {
  if (!(t > 0.0)) throw DomainError("heat kernel needs t > 0");
}

int resolve_modes(double side, double t, int modes, double tol) {
  if (modes < 0) throw ConfigurationError("heat kernel mode count must be >= 0");
  return modes == 0 ? heat_kernel_modes(side, t, tol) : modes;
}

// 1 - (e^{t Delta} 1)(a) on (0, L), written with erfc only so short times keep full precision.
double heat_loss_1d(double t, double a, double side) {
  if (t == 0.0) return 0.0;
  if (t <= 0.05 * side * side) {
    // 1 - S = 2 * (heat flow of the indicators of the odd reflected cells (nL, (n+1)L))
    const double r = 2.0 * std::sqrt(t);
    double loss = 0.0;
    constexpr int kImages = 7;
    for (int n = 1; n <= kImages; n += 2) {
      loss += std::erfc((n * side - a) / r) - std::erfc(((n + 1) * side - a) / r);
      loss += std::erfc((a + (n - 1) * side) / r) - std::erfc((a + n * side) / r);
    }
    return loss;
  }
  const double base = std::numbers::pi / side;
  double s = 0.0;
  for (int k = 1;; k += 2) {
    const double e = std::exp(-t * std::pow(k * base, 2));
    if (e < 1e-18) break;
    s += e * std::sin(k * base * a) / k;
  }
  return 1.0 - 4.0 / std::numbers::pi * s;
}

}  // namespace

int heat_kernel_modes(double side_length, double t, double tol) {
  check_time(t);
  if (!(tol > 0.0 && tol < 1.0)) throw ConfigurationError("heat kernel tolerance must lie in (0, 1)");
  return static_cast<int>(std::ceil(side_length / std::numbers::pi * std::sqrt(std::log(1.0 / tol) / t))) + 4;
}

HeatKernelSample heat_kernel(const Geometry& geometry, Point x, Point y, double t, int modes, double tol) {
  check_time(t);
  const double side = geometry.side_length();
  const int m = resolve_modes(side, t, modes, tol);
  const AxisKernel k1 = axis_kernel(t, x.x, y.x, side, m, false);
  const AxisKernel k2 = axis_kernel(t, x.y, y.y, side, m, false);
  HeatKernelSample s;
  s.x = x;
  s.y = y;
  s.t = t;
  s.modes = m;
  s.value = k1.k * k2.k;
  const double tail = axis_tail(t, side, m);
  s.tail_bound = 2.0 * axis_sup(t, side) * tail + tail * tail;
  s.truncation_warning = s.tail_bound > tol;
  return s;
}

HeatKernelJet heat_kernel_jet(const Geometry& geometry, Point x, Point y, double t, int modes, double tol) {
  check_time(t);
  const double side = geometry.side_length();
  const int m = resolve_modes(side, t, modes, tol);
  const AxisKernel a = axis_kernel(t, x.x, y.x, side, m, true);
  const AxisKernel b = axis_kernel(t, x.y, y.y, side, m, true);
  HeatKernelJet j;
  j.value = a.k * b.k;
  j.grad_x = {a.ka * b.k, a.k * b.ka};
  j.grad_y = {a.kb * b.k, a.k * b.kb};
  j.hess_xx = {{{a.kaa * b.k, a.ka * b.ka}, {a.ka * b.ka, a.k * b.kaa}}};
  j.hess_xy = {{{a.kab * b.k, a.ka * b.kb}, {a.kb * b.ka, a.k * b.kab}}};
  return j;
}

double heat_of_unity_1d(double t, double a, double side_length) {
  if (!(t >= 0.0)) throw DomainError("heat flow needs t >= 0");
  return 1.0 - heat_loss_1d(t, a, side_length);
}

double lambda_of_unity(const Geometry& geometry, Point x, double tol) {
  const double side = geometry.side_length();
  const double d = geometry.distance_to_boundary(x);
  if (!(d > 0.0)) throw DomainError("Lambda 1 is evaluated at interior points only");
  if (!(tol > 0.0 && tol < 1.0)) throw ConfigurationError("tolerance must lie in (0, 1)");

  // below t_min the loss is under erfc(sqrt(-log tol)); above t_max it is 1 to within tol
  const double t_min = d * d / (4.0 * std::log(1.0 / tol));
  const double t_max = std::log(4.0 / tol) / geometry.lambda1();
  auto integral = [&](int panels) {
    const QuadratureRule rule = composite_gauss(std::log(t_min), std::log(t_max), panels);
    double s = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double t = std::exp(rule.nodes[q]);
      const double qx = heat_loss_1d(t, x.x, side), qy = heat_loss_1d(t, x.y, side);
      s += rule.weights[q] * (qx + qy - qx * qy) / std::sqrt(t);
    }
    return s + 2.0 / std::sqrt(t_max);
  };
  int panels = std::max(8, static_cast<int>(std::ceil(2.0 * std::log(t_max / t_min))));
  double coarse = integral(panels);
  for (int doubling = 0; doubling < 6; ++doubling) {
    panels *= 2;
    const double fine = integral(panels);
    if (std::abs(fine - coarse) <= tol * std::abs(fine))
      return fine / (2.0 * std::sqrt(std::numbers::pi));
    coarse = fine;
  }
  std::ostringstream msg;
  msg << "Lambda 1 quadrature did not converge at (" << x.x << ", " << x.y << ")";
  throw NumericError(msg.str());
}

}  // namespace dsqg

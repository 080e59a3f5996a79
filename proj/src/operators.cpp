#include "dsqg/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "dsqg/errors.hpp"
#include "dsqg/numerics.hpp"
#include "dsqg/transforms.hpp"

namespace dsqg {

namespace {

template <typename Multiplier>
SpectralField apply_multiplier(const SpectralField& f, Multiplier&& mult) {
  const Geometry& g = f.geometry();
  SpectralField out(f.geometry_ptr(), f.tag());
  const int k = g.modes();
  for (int m = 1; m <= k; ++m)
    for (int n = 1; n <= k; ++n) out.at(m, n) = mult(g.eigenvalue(m, n)) * f.at(m, n);
  return out;
}

// integral over [t_min, inf) of (1 - e^{-t lambda}) t^{-1-a} dt for each requested lambda
std::vector<double> heat_integrals(const std::vector<double>& lambdas, double a, double t_min,
                                   double t_max, int panels) {
  const QuadratureRule rule = composite_gauss(std::log(t_min), std::log(t_max), panels);
  std::vector<double> t(rule.nodes.size()), w(rule.nodes.size());
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    t[q] = std::exp(rule.nodes[q]);
    w[q] = rule.weights[q] * std::pow(t[q], -a);  // dt/t absorbed by the log substitution
  }
  const double tail = std::pow(t_max, -a) / a;
  std::vector<double> out(lambdas.size());
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    double s = 0.0;
    for (std::size_t q = 0; q < t.size(); ++q) s += w[q] * -std::expm1(-t[q] * lambdas[i]);
    out[i] = s + tail;
  }
  return out;
}

struct HeatWindow {
  double t_min;
  double t_max;
  int panels;
};

HeatWindow heat_window(const Geometry& g, double a, double tol) {
  const double lambda_max = g.eigenvalue(g.modes(), g.modes());
  HeatWindow w;
  // the omitted head is below lambda t_min^{1-a}/(1-a), relative to lambda^a
  w.t_min = std::pow(tol * (1.0 - a), 1.0 / (1.0 - a)) / lambda_max;
  w.t_max = std::log(1.0 / tol) / g.lambda1();
  w.panels = std::max(4, static_cast<int>(std::ceil(std::log(w.t_max / w.t_min))));
  return w;
}

// Integrals for the requested eigenvalues, doubling the panel count until two rules agree.
std::vector<double> converged_heat_integrals(const Geometry& g, const std::vector<double>& lambdas,
                                             double a, const HeatQuadrature& q) {
  if (!(q.tolerance > 0.0) || q.tolerance >= 1.0)
    throw ConfigurationError("quadrature tolerance must lie in (0, 1)");
  HeatWindow w = heat_window(g, a, q.tolerance);
  std::vector<double> coarse = heat_integrals(lambdas, a, w.t_min, w.t_max, w.panels);
  double residual = 0.0;
  for (int d = 0; d <= q.max_doublings; ++d) {
    w.panels *= 2;
    std::vector<double> fine = heat_integrals(lambdas, a, w.t_min, w.t_max, w.panels);
    residual = 0.0;
    for (std::size_t i = 0; i < fine.size(); ++i)
      residual = std::max(residual, std::abs(fine[i] - coarse[i]) / std::abs(fine[i]));
    if (residual <= q.tolerance) return fine;
    coarse = std::move(fine);
  }
  std::ostringstream msg;
  msg << "heat representation quadrature did not converge: relative residual " << residual
      << " after " << w.panels << " panels (tolerance " << q.tolerance << ")";
  throw NumericError(msg.str());
}

void check_lambda_exponent(double s) {
  if (!(s > 0.0 && s < 2.0)) throw ConfigurationError("heat representation needs s in (0, 2)");
}

}  // namespace

SpectralField apply_lambda_power(const SpectralField& f, double s) {
  if (!(s >= -1.0 && s <= 2.0)) throw ConfigurationError("Lambda^s needs s in [-1, 2]");
  if (s == 0.0) return f;
  if (s == 1.0) return apply_multiplier(f, [](double lambda) { return std::sqrt(lambda); });
  if (s == 2.0) return apply_multiplier(f, [](double lambda) { return lambda; });
  if (s == -1.0) return apply_multiplier(f, [](double lambda) { return 1.0 / std::sqrt(lambda); });
  const double half = 0.5 * s;
  return apply_multiplier(f, [half](double lambda) { return std::pow(lambda, half); });
}

SpectralField heat_semigroup(const SpectralField& f, double t) {
  if (!(t >= 0.0)) throw DomainError("heat semigroup needs t >= 0");
  if (t == 0.0) return f;
  return apply_multiplier(f, [t](double lambda) { return std::exp(-t * lambda); });
}

double heat_representation_constant(const Geometry& geometry, double s, const HeatQuadrature& quadrature) {
  check_lambda_exponent(s);
  const double a = 0.5 * s;
  const double lambda1 = geometry.lambda1();
  const std::vector<double> integral = converged_heat_integrals(geometry, {lambda1}, a, quadrature);
  return std::pow(lambda1, a) / integral[0];
}

SpectralField lambda_via_heat(const SpectralField& f, double s, const HeatQuadrature& quadrature) {
  check_lambda_exponent(s);
  const Geometry& g = f.geometry();
  const int k = g.modes();
  const double a = 0.5 * s;

  // one integral per distinct m^2 + n^2 carried by f, plus lambda_1 for the calibration
  std::vector<int> slot(2 * k * k + 1, -1);
  std::vector<double> lambdas{g.lambda1()};
  slot[2] = 0;
  for (int m = 1; m <= k; ++m)
    for (int n = 1; n <= k; ++n) {
      const int q = m * m + n * n;
      if (f.at(m, n) != 0.0 && slot[q] < 0) {
        slot[q] = static_cast<int>(lambdas.size());
        lambdas.push_back(g.eigenvalue(m, n));
      }
    }
  const std::vector<double> integral = converged_heat_integrals(g, lambdas, a, quadrature);
  const double c = std::pow(g.lambda1(), a) / integral[0];

  SpectralField out(f.geometry_ptr(), f.tag());
  for (int m = 1; m <= k; ++m)
    for (int n = 1; n <= k; ++n) {
      const double coeff = f.at(m, n);
      if (coeff != 0.0) out.at(m, n) = c * integral[slot[m * m + n * n]] * coeff;
    }
  return out;
}

// ---------------------------------------------------------------- velocity

double VelocityField::max_speed() const {
  double best = 0.0;
  for (std::size_t i = 0; i < ux.values().size(); ++i)
    best = std::max(best, std::hypot(ux.values()[i], uy.values()[i]));
  return best;
}

VelocityField velocity_from_stream(const SpectralField& psi, int rotation_sign) {
  if (rotation_sign != 1 && rotation_sign != -1) throw ConfigurationError("rotation sign must be +1 or -1");
  const Geometry& g = psi.geometry();
  const int n = g.grid_size();
  const int k = g.modes();
  const double sign = rotation_sign;

  // J(a, b) = sign * (-b, a)
  GridField dpsi_dx(psi.geometry_ptr(), sample_derivative(psi, n, 1, 0));
  GridField dpsi_dy(psi.geometry_ptr(), sample_derivative(psi, n, 0, 1));
  VelocityField v{-sign * dpsi_dy, sign * dpsi_dx, psi, rotation_sign};

  // divergence as d/dx u_x + d/dy u_y, each synthesized separately on the closed grid
  const double norm = 2.0 / g.side_length();
  std::vector<double> dxux(static_cast<std::size_t>(k + 1) * (k + 1), 0.0);
  std::vector<double> dyuy(dxux.size(), 0.0);
  for (int m = 1; m <= k; ++m)
    for (int q = 1; q <= k; ++q) {
      const double a = psi.at(m, q) * norm;
      const std::size_t idx = static_cast<std::size_t>(m) * (k + 1) + q;
      dxux[idx] = -sign * (a * g.wavenumber(q)) * g.wavenumber(m);
      dyuy[idx] = sign * (a * g.wavenumber(m)) * g.wavenumber(q);
    }
  const std::vector<double> div_x = synthesize(dxux, k, Parity::kCosine, Parity::kCosine, n);
  const std::vector<double> div_y = synthesize(dyuy, k, Parity::kCosine, Parity::kCosine, n);
  for (std::size_t i = 0; i < div_x.size(); ++i)
    v.max_divergence = std::max(v.max_divergence, std::abs(div_x[i] + div_y[i]));

  // normal component on each side: collapse the sine sum at the side, then sum along it
  std::vector<double> cos_table(2 * n);
  for (int j = 0; j < 2 * n; ++j) cos_table[j] = std::cos(std::numbers::pi * j / n);
  std::vector<double> r(k);
  for (int side = 0; side < 4; ++side) {
    const bool vertical = side < 2;  // x = 0 or x = L, normal along x
    const double pos = (side % 2 == 0) ? 0.0 : g.side_length();
    for (int q = 1; q <= k; ++q) {
      double s = 0.0;
      for (int m = 1; m <= k; ++m) {
        const double c = vertical ? psi.at(m, q) : psi.at(q, m);
        s += c * std::sin(g.wavenumber(m) * pos);
      }
      // u_x = -sign d psi/dy on vertical sides, u_y = sign d psi/dx on horizontal sides
      r[q - 1] = (vertical ? -sign : sign) * norm * g.wavenumber(q) * s;
    }
    for (int j = 0; j <= n; ++j) {
      double s = 0.0;
      for (int q = 1; q <= k; ++q) s += r[q - 1] * cos_table[(static_cast<long>(q) * j) % (2 * n)];
      v.max_normal_trace = std::max(v.max_normal_trace, std::abs(s));
    }
  }
  return v;
}

VelocityField riesz_velocity(const SpectralField& theta, int rotation_sign) {
  return velocity_from_stream(apply_lambda_power(theta, -1.0), rotation_sign);
}

VelocityField short_time_velocity(const SpectralField& theta, double tau, int rotation_sign) {
  if (!(tau > 0.0)) throw DomainError("short-time velocity needs tau > 0");
  SpectralField psi = apply_multiplier(theta, [tau](double lambda) {
    return std::erf(std::sqrt(tau * lambda)) / std::sqrt(lambda);
  });
  return velocity_from_stream(psi, rotation_sign);
}

// ------------------------------------------------------------- dissipation

SpectralField compose(const SpectralField& f, const std::function<double(double)>& g) {
  const int cells = 2 * f.geometry().grid_size();
  std::vector<double> values = sample_derivative(f, cells, 0, 0);
  for (double& v : values) v = g(v);
  return project_samples(f.geometry_ptr(), values, cells);
}

GridField nonlinear_dissipation(const SpectralField& f) {
  const GridField fg = inverse(f);
  const GridField lf = inverse(apply_lambda_power(f, 1.0));
  const GridField lf2 = inverse(apply_lambda_power(dealiased_product(f, f), 1.0));
  GridField d(f.geometry_ptr());
  for (std::size_t i = 0; i < d.values().size(); ++i)
    d.values()[i] = fg.values()[i] * lf.values()[i] - 0.5 * lf2.values()[i];
  return d;
}

// ---------------------------------------------------------- convex functions

ConvexFunction ConvexFunction::linear(double slope) {
  return {"linear", [slope](double z) { return slope * z; }, [slope](double) { return slope; },
          [](double) { return 0.0; }};
}

ConvexFunction ConvexFunction::square() {
  return {"square", [](double z) { return z * z; }, [](double z) { return 2.0 * z; },
          [](double) { return 2.0; }};
}

ConvexFunction ConvexFunction::half_square() {
  return {"half_square", [](double z) { return 0.5 * z * z; }, [](double z) { return z; },
          [](double) { return 1.0; }};
}

ConvexFunction ConvexFunction::smoothed_hinge(double threshold, double sharpness) {
  if (!(sharpness > 0.0)) throw ConfigurationError("hinge sharpness must be positive");
  const double s = sharpness;
  // (z - B)_+ outside [B - s, B + s]; Phi'' is the hat (s - |z - B|)_+ / s^2 inside
  auto shape = [s](double z) {
    if (z <= -s) return 0.0;
    if (z >= s) return z;
    const double u = z + s;
    if (z <= 0.0) return u * u * u / (6 * s * s);
    const double v = s - z;
    return z + v * v * v / (6 * s * s);
  };
  auto slope = [s](double z) {
    if (z <= -s) return 0.0;
    if (z >= s) return 1.0;
    if (z <= 0.0) return (z + s) * (z + s) / (2 * s * s);
    return 1.0 - (s - z) * (s - z) / (2 * s * s);
  };
  const double offset = shape(-threshold);
  return {"smoothed_hinge",
          [=](double z) { return shape(z - threshold) - offset; },
          [=](double z) { return slope(z - threshold); },
          [=](double z) { return std::max(0.0, s - std::abs(z - threshold)) / (s * s); }};
}

ConvexFunction ConvexFunction::reflected() const {
  auto v = value;
  auto d1 = first;
  auto d2 = second;
  return {"reflected_" + name, [v](double z) { return -v(z); }, [d1](double z) { return -d1(z); },
          [d2](double z) { return -d2(z); }};
}

void require_convex(const ConvexFunction& phi, double lo, double hi) {
  if (std::abs(phi.value(0.0)) > 1e-14) throw PreconditionError("Phi(0) must vanish for " + phi.name);
  if (hi < lo) std::swap(lo, hi);
  constexpr int kSamples = 257;
  for (int i = 0; i < kSamples; ++i) {
    const double z = lo + (hi - lo) * i / (kSamples - 1);
    if (phi.second(z) < -1e-12) {
      std::ostringstream msg;
      msg << phi.name << " is not convex on [" << lo << ", " << hi << "]: Phi''(" << z
          << ") = " << phi.second(z);
      throw PreconditionError(msg.str());
    }
  }
}

WeightedConvexityTerms weighted_convexity_terms(const SpectralField& theta, const SpectralField& w,
                                                const ConvexFunction& phi, bool check_convexity) {
  require_same_geometry(theta.geometry(), w.geometry());
  const GeometryPtr& geo = theta.geometry_ptr();
  const int cells = 2 * geo->grid_size();

  const std::vector<double> ts = sample_derivative(theta, cells, 0, 0);
  const std::vector<double> ws = sample_derivative(w, cells, 0, 0);
  std::vector<double> b(ts.size());
  double lo = 0.0, hi = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (!(ws[i] > 0.0)) throw DomainError("weight must be positive at every interior node");
    b[i] = ts[i] / ws[i];
    lo = std::min(lo, b[i]);
    hi = std::max(hi, b[i]);
  }
  if (check_convexity) require_convex(phi, lo, hi);
  else if (std::abs(phi.value(0.0)) > 1e-14) throw PreconditionError("Phi(0) must vanish");

  std::vector<double> wphi(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) wphi[i] = ws[i] * phi.value(b[i]);
  const GridField lambda_wphi = inverse(apply_lambda_power(project_samples(geo, wphi, cells), 1.0));
  const GridField lambda_theta = inverse(apply_lambda_power(theta, 1.0));
  const GridField lambda_w = inverse(apply_lambda_power(w, 1.0));
  const GridField ratio = restrict_to_grid(geo, b, 2);

  WeightedConvexityTerms out{GridField(geo), GridField(geo), GridField(geo), ratio};
  for (std::size_t i = 0; i < ratio.values().size(); ++i) {
    const double bi = ratio.values()[i];
    const double d1 = phi.first(bi);
    out.lhs.values()[i] = d1 * lambda_theta.values()[i] - lambda_wphi.values()[i];
    out.rhs_core.values()[i] = lambda_w.values()[i] * (bi * d1 - phi.value(bi));
    out.defect.values()[i] = out.lhs.values()[i] - out.rhs_core.values()[i];
  }
  return out;
}

}  // namespace dsqg

#include "dsqg/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "dsqg/errors.hpp"

namespace dsqg {

GridField boundary_ratio(const SpectralField& theta) {
  const Geometry& g = theta.geometry();
  GridField b = inverse(theta);
  const auto& w1 = g.ground_state();
  for (std::size_t i = 0; i < w1.size(); ++i) b.values()[i] /= w1[i];
  return b;
}

std::vector<double> boundary_ratio_closed(const SpectralField& theta) {
  const Geometry& g = theta.geometry();
  const int n = g.grid_size();
  const int k = g.modes();
  const double side = g.side_length();
  const double norm = 2.0 / side;
  const double base = std::numbers::pi / side;
  const std::size_t stride = n + 1;
  std::vector<double> out(stride * stride, 0.0);

  const GridField interior = boundary_ratio(theta);
  for (int i = 1; i <= k; ++i)
    for (int j = 1; j <= k; ++j) out[i * stride + j] = interior.at(i, j);

  std::vector<double> sin_table(2 * n);
  for (int j = 0; j < 2 * n; ++j) sin_table[j] = std::sin(std::numbers::pi * j / n);
  auto parity = [](int m, bool far) { return (far && (m % 2 == 1)) ? -1.0 : 1.0; };

  // Sides: theta and w_1 both vanish, so b_1 is the ratio of inward normal derivatives.
  for (int axis = 0; axis < 2; ++axis) {
    for (int far = 0; far < 2; ++far) {
      std::vector<double> r(k, 0.0);
      for (int q = 1; q <= k; ++q) {
        double s = 0.0;
        for (int m = 1; m <= k; ++m) {
          const double c = axis == 0 ? theta.at(m, q) : theta.at(q, m);
          s += c * m * parity(m, far);
        }
        r[q - 1] = s * norm * base;
      }
      const double w_normal = norm * base * (far ? -1.0 : 1.0);
      for (int j = 1; j <= k; ++j) {
        double num = 0.0;
        for (int q = 1; q <= k; ++q) num += r[q - 1] * sin_table[(static_cast<long>(q) * j) % (2 * n)];
        const double value = num / (w_normal * sin_table[j]);
        const int edge = far ? n : 0;
        if (axis == 0) out[edge * stride + j] = value;
        else out[j * stride + edge] = value;
      }
    }
  }
  // Corners: ratio of mixed second derivatives.
  for (int fx = 0; fx < 2; ++fx)
    for (int fy = 0; fy < 2; ++fy) {
      double num = 0.0;
      for (int m = 1; m <= k; ++m)
        for (int q = 1; q <= k; ++q) num += theta.at(m, q) * m * q * parity(m, fx) * parity(q, fy);
      const double w = (fx ? -1.0 : 1.0) * (fy ? -1.0 : 1.0);
      out[(fx ? n : 0) * stride + (fy ? n : 0)] = num / w;
    }
  return out;
}

double b1_norm(const SpectralField& theta, double p) {
  if (!(p >= 1.0)) throw ConfigurationError("b1 norm needs p >= 1");
  const Geometry& g = theta.geometry();
  const std::vector<double> b = boundary_ratio_closed(theta);
  const int n = g.grid_size();
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : b) m = std::max(m, std::abs(v));
    return m;
  }
  const double h = g.spacing();
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double wi = (i == 0 || i == n) ? 0.5 : 1.0;
    for (int j = 0; j <= n; ++j) {
      const double wj = (j == 0 || j == n) ? 0.5 : 1.0;
      s += wi * wj * std::pow(std::abs(b[static_cast<std::size_t>(i) * (n + 1) + j]), p);
    }
  }
  return std::pow(s * h * h, 1.0 / p);
}

double weighted_norm(const SpectralField& theta, int m) {
  if (m < 1) throw ConfigurationError("weighted norm needs m >= 1");
  const Geometry& g = theta.geometry();
  GridField integrand = boundary_ratio(theta);
  const auto& w1 = g.ground_state();
  for (std::size_t i = 0; i < w1.size(); ++i) integrand.values()[i] = w1[i] * std::pow(integrand.values()[i], 2 * m);
  // integrate the sine interpolant exactly: int w_{m,n} = (2/L)(2L/(pi m))(2L/(pi n)) for odd m, n
  const SpectralField c = forward(integrand);
  const double side = g.side_length();
  double s = 0.0;
  for (int a = 1; a <= g.modes(); a += 2)
    for (int b = 1; b <= g.modes(); b += 2) s += c.at(a, b) / (static_cast<double>(a) * b);
  s *= 8.0 * side / (std::numbers::pi * std::numbers::pi);
  return std::pow(std::max(s, 0.0), 1.0 / (2.0 * m));
}

double interior_lipschitz(const SpectralField& theta) {
  const auto [gx, gy] = gradient(theta);
  const auto& d = theta.geometry().distance();
  double m = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) m = std::max(m, d[i] * std::hypot(gx.values()[i], gy.values()[i]));
  return m;
}

HolderResult holder_seminorm(const SpectralField& theta, double alpha, std::optional<double> max_step) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigurationError("Holder exponent must lie in (0, 1)");
  const Geometry& g = theta.geometry();
  const GridField f = inverse(theta);
  const int n = g.grid_size();
  const int k = g.modes();
  const double h = g.spacing();
  const double cap = max_step.value_or(std::numeric_limits<double>::infinity());
  static constexpr int kDirs[8][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}};

  HolderResult r;
  for (int i = 1; i <= k; ++i)
    for (int j = 1; j <= k; ++j) {
      const double limit = std::min(std::min({i, n - i, j, n - j}) * h / 32.0, cap);
      bool any = false;
      const double fx = f.at(i, j);
      for (const auto& dir : kDirs) {
        const double unit = (dir[0] != 0 && dir[1] != 0) ? std::numbers::sqrt2 * h : h;
        for (int s = 1; s * unit <= limit * (1.0 + 1e-12); s *= 2) {
          const double len = s * unit;
          const double q = std::abs(f.at(i + s * dir[0], j + s * dir[1]) - fx) / std::pow(len, alpha);
          r.value = std::max(r.value, q);
          ++r.pairs;
          any = true;
        }
      }
      if (!any) ++r.skipped;
    }
  return r;
}

TangentFrame tangent_frame(const GeometryPtr& geometry, std::optional<double> smoothing_time) {
  const double radius = geometry->corner_radius() > 0.0 ? geometry->corner_radius() : 0.05 * geometry->side_length();
  const double eps = smoothing_time.value_or(std::pow(radius / 4.0, 2));
  if (!(eps > 0.0)) throw ConfigurationError("smoothing time must be positive");
  GridField dist(geometry, geometry->distance());
  const SpectralField psi = heat_semigroup(forward(dist), eps);
  const auto [px, py] = gradient(psi);

  TangentFrame t{-1.0 * py, px, px, py, eps, 0.0, 0.0, 0.0};
  const int n = geometry->grid_size();
  const std::vector<double> pxx = sample_derivative(psi, n, 2, 0);
  const std::vector<double> pxy = sample_derivative(psi, n, 1, 1);
  const std::vector<double> pyy = sample_derivative(psi, n, 0, 2);
  for (std::size_t i = 0; i < pxx.size(); ++i) {
    t.t_sup = std::max(t.t_sup, std::hypot(px.values()[i], py.values()[i]));
    t.grad_t_sup = std::max(t.grad_t_sup, std::sqrt(pxx[i] * pxx[i] + 2.0 * pxy[i] * pxy[i] + pyy[i] * pyy[i]));
  }
  t.boundary_leak = velocity_from_stream(psi).max_normal_trace;
  return t;
}

ShellProfile shell_maxima(const Geometry& geometry, const std::vector<double>& quantity, double l0,
                          double min_distance) {
  if (quantity.size() != geometry.size()) throw ShapeError("shell quantity has the wrong size");
  if (!(l0 > 0.0) || !(min_distance > 0.0)) throw ConfigurationError("shell bounds must be positive");
  const auto& d = geometry.distance();
  const auto& mask = geometry.corner_mask();
  ShellProfile p;
  for (double upper = l0; upper / 2.0 >= min_distance * (1.0 - 1e-12); upper /= 2.0) {
    const double lower = upper / 2.0;
    double best = -1.0;
    for (std::size_t i = 0; i < d.size(); ++i)
      if (!mask[i] && d[i] >= lower * (1.0 - 1e-12) && d[i] < upper * (1.0 - 1e-12)) best = std::max(best, quantity[i]);
    if (best < 0.0) continue;
    p.distance.push_back(upper);
    p.value.push_back(best);
  }
  std::vector<double> lx, ly;
  for (std::size_t s = 0; s < p.value.size(); ++s)
    if (p.value[s] > 0.0) {
      lx.push_back(std::log(p.distance[s]));
      ly.push_back(std::log(p.value[s]));
    }
  if (lx.size() >= 2) p.fit = linear_fit(lx, ly);
  return p;
}

std::vector<double> normal_velocity(const VelocityField& u, const TangentFrame& frame) {
  std::vector<double> out(u.ux.values().size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = std::abs(u.ux.values()[i] * frame.nx.values()[i] + u.uy.values()[i] * frame.ny.values()[i]);
  return out;
}

DiagnosticsRecord record(const SolverState& state, const DiagnosticsParams& params, int rotation_sign) {
  const SpectralField& theta = state.theta;
  const Geometry& g = theta.geometry();
  DiagnosticsRecord r;
  r.t = state.t;
  r.sup_norm = inverse(theta).max_abs();
  const double l2 = theta.l2_norm();
  r.energy = l2 * l2;
  for (int m = 1; m <= g.modes(); ++m)
    for (int n = 1; n <= g.modes(); ++n) r.half_norm += std::sqrt(g.eigenvalue(m, n)) * theta.at(m, n) * theta.at(m, n);
  r.lipschitz = interior_lipschitz(theta);
  for (double p : params.ps) r.b1_lp[p] = b1_norm(theta, p);
  for (int m : params.ms) r.weighted_norm[m] = weighted_norm(theta, m);
  for (double a : params.alphas) {
    const HolderResult h = holder_seminorm(theta, a);
    r.holder[a] = h.value;
    r.holder_skipped = h.skipped;
  }
  const VelocityField u = state.velocity ? *state.velocity : riesz_velocity(theta, rotation_sign);
  r.u_sup = u.max_speed();
  r.normal_rate = std::numeric_limits<double>::quiet_NaN();
  if (params.normal_rate) {
    const TangentFrame frame = tangent_frame(theta.geometry_ptr());
    const double l0 = params.normal_l0 > 0.0 ? params.normal_l0 : g.side_length() / 8.0;
    const ShellProfile p = shell_maxima(g, normal_velocity(u, frame), l0, 2.0 * g.spacing());
    if (p.fit.samples >= 2) r.normal_rate = p.fit.slope;
  }
  return r;
}

HolderMonitor holder_monitor(const std::vector<DiagnosticsRecord>& records, double alpha, double p,
                             double fit_fraction) {
  if (records.empty()) throw ConfigurationError("holder monitor needs at least one record");
  HolderMonitor mon;
  mon.alpha = alpha;
  mon.p = p;
  auto holder_at = [&](const DiagnosticsRecord& r) {
    const auto it = r.holder.find(alpha);
    if (it == r.holder.end()) throw ConfigurationError("records carry no Holder value for the requested alpha");
    return it->second;
  };
  for (const auto& r : records) {
    const auto it = r.b1_lp.find(p);
    if (it == r.b1_lp.end()) throw ConfigurationError("records carry no b1 norm for the requested p");
    mon.bound_b = std::max(mon.bound_b, it->second);
    mon.bound_m = std::max(mon.bound_m, r.lipschitz);
  }
  mon.initial = holder_at(records.front());
  const double scale = mon.bound_b * (mon.bound_m + 1.0);
  const double t_fit = fit_fraction * records.back().t;
  for (const auto& r : records) {
    if (r.t > t_fit) continue;
    if (scale > 0.0) mon.k_fit = std::max(mon.k_fit, (holder_at(r) - 2.0 * mon.initial) / scale);
  }
  mon.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < records.size(); ++i) {
    const double margin = 2.0 * mon.initial + mon.k_fit * scale - holder_at(records[i]);
    mon.worst_margin = std::min(mon.worst_margin, margin);
    if (margin < -1e-12 * std::max(1.0, mon.initial) && !mon.violated) {
      mon.violated = true;
      mon.first_violation = static_cast<int>(i);
    }
  }
  return mon;
}

}  // namespace dsqg

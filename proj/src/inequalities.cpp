#include "dsqg/inequalities.hpp"

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "dsqg/cutoff.hpp"
#include "dsqg/errors.hpp"
#include "dsqg/heat_kernel.hpp"

namespace dsqg {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string indexed(const std::string& base, std::size_t k) {
  return base + "[" + std::to_string(k) + "]";
}

std::string fmt(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// d/p, zero for p = inf
double dim_over_p(double p) { return std::isinf(p) ? 0.0 : kDimension / p; }

void require_finite(InequalityReport& r, const std::string& label, double value) {
  r.add_margin(label + "_finite", std::isfinite(value) ? 1.0 : -1.0);
}

// uniform in [-1, 1) from the raw engine, so the family does not depend on the standard library
double symmetric_uniform(std::mt19937_64& rng) {
  return 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0;
}

}  // namespace

void InequalityReport::add_margin(std::string label, double value) {
  margins.push_back({std::move(label), value});
}

void InequalityReport::finalize() {
  min_margin = kInf;
  for (const auto& m : margins) min_margin = std::min(min_margin, std::isnan(m.value) ? -kInf : m.value);
  pass = margins.empty() || min_margin >= -tolerance;
}

std::vector<std::uint8_t> interior_nodes(const Geometry& geometry, double min_cells) {
  const auto& d = geometry.distance();
  const auto& mask = geometry.corner_mask();
  const double cut = min_cells * geometry.spacing() * (1.0 - 1e-12);
  std::vector<std::uint8_t> keep(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) keep[i] = !mask[i] && d[i] >= cut;
  return keep;
}

std::vector<SpectralField> random_family(const GeometryPtr& geometry, int count, int max_mode,
                                         std::uint64_t seed) {
  if (count < 0 || max_mode < 1 || max_mode > geometry->modes())
    throw ConfigurationError("random family needs count >= 0 and 1 <= max_mode <= N-1");
  std::mt19937_64 rng(seed);
  std::vector<SpectralField> out;
  for (int k = 0; k < count; ++k) {
    SpectralField f(geometry, "random");
    for (int m = 1; m <= max_mode; ++m)
      for (int n = 1; n <= max_mode; ++n) f.at(m, n) = symmetric_uniform(rng);
    out.push_back(std::move(f));
  }
  return out;
}

SpectralField truncated_constant(const GeometryPtr& geometry) {
  SpectralField f(geometry, "constant");
  const double scale = 8.0 * geometry->side_length() / (std::numbers::pi * std::numbers::pi);
  for (int m = 1; m <= geometry->modes(); m += 2)
    for (int n = 1; n <= geometry->modes(); n += 2) f.at(m, n) = scale / (static_cast<double>(m) * n);
  return f;
}

// ------------------------------------------------------------------ cordoba

InequalityReport verify_cordoba(const GeometryPtr& geometry, const std::vector<SpectralField>& family,
                                const ConvexFunction& phi) {
  InequalityReport r;
  r.name = "cordoba";
  r.tolerance = 1e-10;
  r.sample_plan = "family of " + std::to_string(family.size()) + " fields, nodes with d >= 4 dx off the corners";
  const std::vector<std::uint8_t> keep = interior_nodes(*geometry, 4.0);
  const auto& d = geometry->distance();

  double c = kInf;
  for (std::size_t k = 0; k < family.size(); ++k) {
    const SpectralField& f = family[k];
    require_same_geometry(*geometry, f.geometry());
    const GridField fg = inverse(f);
    const auto [lo, hi] = std::minmax_element(fg.values().begin(), fg.values().end());
    require_convex(phi, std::min(0.0, *lo), std::max(0.0, *hi));

    const GridField lf = inverse(apply_lambda_power(f, 1.0));
    const GridField lphi = inverse(apply_lambda_power(compose(f, phi.value), 1.0));
    const double scale = std::max(fg.max_abs() * lf.max_abs(), std::numeric_limits<double>::min());

    std::vector<double> core(d.size());
    double core_max = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double v = fg.values()[i];
      core[i] = v * phi.first(v) - phi.value(v);
      if (keep[i]) core_max = std::max(core_max, core[i]);
    }
    double positivity = kInf;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (!keep[i]) continue;
      const double v = fg.values()[i];
      const double lhs = phi.first(v) * lf.values()[i] - lphi.values()[i];
      positivity = std::min(positivity, lhs / scale);
      // ratios where the core is at roundoff level carry no information
      if (core[i] > 1e-8 * core_max) c = std::min(c, d[i] * lhs / core[i]);
      ++r.samples;
    }
    if (std::isfinite(positivity)) r.add_margin(indexed("positivity", k), positivity);
  }
  if (std::isfinite(c)) {
    r.fitted_constants["c"] = c;
    if (phi.name == "half_square" || phi.name == "square") r.fitted_constants["gamma1"] = 0.5 * c;
    r.add_margin("c", c);
  } else {
    r.notes.push_back("f Phi'(f) - Phi(f) vanishes on the sampled nodes; no ratio to fit");
  }
  r.finalize();
  return r;
}

// ------------------------------------------------------- weighted identity

InequalityReport verify_weighted_identity(const std::vector<SpectralField>& thetas, const SpectralField& w,
                                          const std::vector<ConvexFunction>& phis) {
  InequalityReport r;
  r.name = "weighted_identity";
  r.tolerance = 1e-8;
  r.sample_plan = std::to_string(thetas.size()) + " fields x " + std::to_string(phis.size()) + " convex functions";
  double worst = kInf;
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    for (const ConvexFunction& phi : phis) {
      const WeightedConvexityTerms t = weighted_convexity_terms(thetas[k], w, phi);
      const WeightedConvexityTerms flipped = weighted_convexity_terms(thetas[k], w, phi.reflected(), false);
      // sizes of the separate terms, so an identity that vanishes analytically is not scaled by roundoff
      const GridField lambda_theta = inverse(apply_lambda_power(thetas[k], 1.0));
      double first_term = 0.0, second_term = 0.0;
      for (std::size_t i = 0; i < lambda_theta.values().size(); ++i) {
        const double a = phi.first(t.ratio.values()[i]) * lambda_theta.values()[i];
        first_term = std::max(first_term, std::abs(a));
        second_term = std::max(second_term, std::abs(a - t.lhs.values()[i]));
      }
      double scale = first_term + second_term + t.rhs_core.max_abs();
      if (!(scale > 0.0)) scale = 1.0;
      double dmin = kInf, flipped_max = -kInf;
      for (std::size_t i = 0; i < t.defect.values().size(); ++i) {
        dmin = std::min(dmin, t.defect.values()[i]);
        flipped_max = std::max(flipped_max, flipped.defect.values()[i]);
      }
      r.samples += static_cast<int>(t.defect.values().size());
      const std::string tag = phi.name + "[" + std::to_string(k) + "]";
      r.add_margin("defect_" + tag, dmin / scale);
      r.add_margin("reflected_" + tag, -flipped_max / scale);
      worst = std::min(worst, dmin / scale);
    }
  }
  if (std::isfinite(worst)) r.fitted_constants["min_relative_defect"] = worst;
  r.finalize();
  return r;
}

// ------------------------------------------------------------- Lambda 1

std::vector<double> lambda_of_unity_grid(const Geometry& geometry, double tol) {
  const int n = geometry.grid_size();
  std::vector<double> out(geometry.size(), 0.0);
  // one evaluation per orbit of the dihedral group: i <= j <= N - j
  for (int i = 1; 2 * i <= n; ++i)
    for (int j = i; 2 * j <= n; ++j) {
      const double v = lambda_of_unity(geometry, geometry.point(i, j), tol);
      const int is[2] = {i, n - i}, js[2] = {j, n - j};
      for (int a : is)
        for (int b : js) {
          out[geometry.index(a, b)] = v;
          out[geometry.index(b, a)] = v;
        }
    }
  return out;
}

namespace {

double lambda_one_constant(const Geometry& g, const std::vector<double>& values) {
  const auto& w1 = g.ground_state();
  const auto& mask = g.corner_mask();
  double c0 = kInf;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!mask[i]) c0 = std::min(c0, values[i] * w1[i]);
  return c0;
}

}  // namespace

InequalityReport verify_lambda_one_lower(const GeometryPtr& geometry, double refinement_limit) {
  InequalityReport r;
  r.name = "lambda_one_lower";
  r.tolerance = 1e-9;
  const Geometry& g = *geometry;
  const int n = g.grid_size();
  r.sample_plan = "all unmasked nodes at N=" + std::to_string(n) + " and N=" + std::to_string(2 * n);

  const std::vector<double> values = lambda_of_unity_grid(g);
  const double c0 = lambda_one_constant(g, values);
  r.samples = static_cast<int>(values.size());
  r.fitted_constants["c0"] = c0;
  r.add_margin("c0", c0);

  // independent evaluations at images of off-orbit nodes
  double sym_err = 0.0;
  const int probes[3][2] = {{1, 2}, {n / 3, n / 5 + 1}, {n / 2 - 1, 3}};
  for (const auto& pr : probes) {
    const int i = pr[0], j = pr[1];
    const double ref = lambda_of_unity(g, g.point(i, j));
    const Point images[3] = {g.point(j, i), g.point(n - i, j), g.point(i, n - j)};
    for (const Point& p : images) sym_err = std::max(sym_err, std::abs(lambda_of_unity(g, p) - ref) / ref);
  }
  r.fitted_constants["symmetry_error"] = sym_err;
  r.add_margin("symmetry", 1e-10 - sym_err);

  // margin (Lambda 1) - c0 / w1 along the centerline, boundary to center
  const auto& w1 = g.ground_state();
  const int jc = n / 2;
  std::vector<double> margin;
  for (int i = 1; 2 * i <= n; ++i) {
    const std::size_t idx = g.index(i, jc);
    margin.push_back(values[idx] - c0 / w1[idx]);
  }
  // largest next to the wall, shrinking toward the center
  double step_min = kInf;
  for (std::size_t i = 0; i + 1 < margin.size(); ++i) step_min = std::min(step_min, margin[i] - margin[i + 1]);
  const double scale = std::max(max_abs(margin), 1e-300);
  r.fitted_constants["centerline_margin_boundary"] = margin.front();
  r.fitted_constants["centerline_margin_center"] = margin.back();
  if (std::isfinite(step_min)) r.add_margin("centerline_nonincreasing", step_min / scale);

  const GeometryPtr fine = g.refined(2);
  const double c0_fine = lambda_one_constant(*fine, lambda_of_unity_grid(*fine));
  const double change = std::abs(c0 - c0_fine) / c0_fine;
  r.fitted_constants["c0_refined"] = c0_fine;
  r.fitted_constants["refinement_change"] = change;
  r.add_margin("refinement", refinement_limit - change);
  r.finalize();
  return r;
}

// -------------------------------------------------------- decay envelope

GammaSchedule GammaSchedule::constant(double gamma) {
  return {[gamma](double) { return gamma; }, [gamma](double t) { return gamma * t; }};
}

double drift_gamma(const SpectralField& stream, int rotation_sign) {
  const GeometryPtr& g = stream.geometry_ptr();
  const VelocityField v = velocity_from_stream(stream, rotation_sign);
  const auto [wx, wy] = gradient(SpectralField::mode(g, 1, 1));
  const auto& w1 = g->ground_state();
  double gamma = -kInf;
  for (std::size_t i = 0; i < w1.size(); ++i) {
    const double dot = v.ux.values()[i] * wx.values()[i] + v.uy.values()[i] * wy.values()[i];
    gamma = std::max(gamma, -dot / w1[i]);
  }
  return gamma;
}

double snapshot_difference(const std::vector<SolverState>& a, const std::vector<SolverState>& b) {
  if (a.size() != b.size()) throw ShapeError("runs have different numbers of snapshots");
  double diff = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (std::abs(a[k].t - b[k].t) > 1e-9 * std::max(1.0, std::abs(a[k].t)))
      throw ShapeError("runs have different output times");
    diff = std::max(diff, inverse(a[k].theta - b[k].theta).max_abs());
  }
  return diff;
}


InequalityReport verify_decay_envelope(const std::vector<SolverState>& snapshots, const EnvelopeCheck& check) {
  if (snapshots.empty()) throw ConfigurationError("decay envelope needs at least one snapshot");
  InequalityReport r;
  r.name = "decay_envelope";
  r.tolerance = 1e-6 + check.slack;
  const GeometryPtr& geo = snapshots.front().theta.geometry_ptr();
  const auto& w1 = geo->ground_state();
  const double root = std::sqrt(geo->lambda1());
  r.sample_plan = "all nodes at " + std::to_string(snapshots.size()) + " output times";

  const GridField theta0 = inverse(snapshots.front().theta);
  for (std::size_t i = 0; i < w1.size(); ++i)
    if (std::abs(theta0.values()[i]) > check.bound_b * w1[i] * (1.0 + 1e-12) + 1e-15)
      throw PreconditionError("initial data exceeds B w1 at some node");

  if (check.drift_stream) {
    const VelocityField v = velocity_from_stream(*check.drift_stream, check.rotation_sign);
    const auto [wx, wy] = gradient(SpectralField::mode(geo, 1, 1));
    double worst = kInf, scale = 0.0;
    for (const SolverState& s : snapshots) {
      const double gamma = check.gamma.rate(s.t);
      for (std::size_t i = 0; i < w1.size(); ++i) {
        const double dot = v.ux.values()[i] * wx.values()[i] + v.uy.values()[i] * wy.values()[i];
        worst = std::min(worst, dot + gamma * w1[i]);
        scale = std::max(scale, std::abs(dot));
      }
    }
    if (worst < -1e-10 * std::max(scale, 1.0)) {
      std::ostringstream msg;
      msg << "drift violates v . grad w1 + gamma w1 >= 0 (minimum " << worst << ")";
      throw PreconditionError(msg.str());
    }
    r.fitted_constants["hypothesis_min"] = worst;
  }

  double gap = 0.0;
  for (const SolverState& s : snapshots) {
    const double factor = check.bound_b * std::exp(-s.t * root + check.gamma.integral(s.t));
    const GridField th = inverse(s.theta);
    double worst = kInf;
    for (std::size_t i = 0; i < w1.size(); ++i) {
      const double m = factor * w1[i] - std::abs(th.values()[i]);
      worst = std::min(worst, m);
      gap = std::max(gap, std::abs(m));
    }
    r.samples += static_cast<int>(w1.size());
    r.add_margin("t=" + fmt(s.t), worst);
  }
  r.fitted_constants["envelope_gap"] = gap;
  r.fitted_constants["B"] = check.bound_b;
  r.fitted_constants["slack"] = check.slack;
  r.finalize();
  return r;
}

// ------------------------------------------------------------ weighted L^p

InequalityReport verify_weighted_lp_control(const std::vector<SolverState>& snapshots, const WeightedLpCheck& check) {
  if (snapshots.empty()) throw ConfigurationError("weighted Lp control needs at least one snapshot");
  if (check.m < 1) throw ConfigurationError("m must be >= 1");
  InequalityReport r;
  r.name = "weighted_lp_control";
  r.tolerance = 1e-12;
  const GeometryPtr& geo = snapshots.front().theta.geometry_ptr();
  const int m = check.m;
  const double side = geo->side_length();
  r.sample_plan = std::to_string(snapshots.size()) + " output times, m=" + std::to_string(m);

  if (check.small_stream) {
    if (!(check.lambda_one_constant > 0.0))
      throw PreconditionError("a small drift part needs the positive constant c0 of the Lambda 1 bound");
    // sup |grad w1| = (2/L)(pi/L), reached at the side midpoints
    const double grad_w1 = 2.0 * std::numbers::pi / (side * side);
    const double threshold = check.lambda_one_constant / ((2 * m - 1) * grad_w1);
    const double vs = velocity_from_stream(*check.small_stream, check.rotation_sign).max_speed();
    r.fitted_constants["vs_sup"] = vs;
    r.fitted_constants["vs_threshold"] = threshold;
    if (vs > threshold) {
      std::ostringstream msg;
      msg << "small drift part has sup " << vs << " above the threshold " << threshold;
      throw PreconditionError(msg.str());
    }
  }
  const double gamma_r = check.regular_stream ? drift_gamma(*check.regular_stream, check.rotation_sign) : 0.0;
  r.fitted_constants["gamma_r"] = gamma_r;

  const double root = std::sqrt(geo->lambda1());
  const double i0 = std::pow(weighted_norm(snapshots.front().theta, m), 2 * m);
  double worst_ratio = 0.0;
  for (const SolverState& s : snapshots) {
    const double it = std::pow(weighted_norm(s.theta, m), 2 * m);
    const double rhs = std::exp((2 * m - 1) * (-s.t * root + gamma_r * s.t)) * i0;
    ++r.samples;
    if (rhs > 0.0) {
      worst_ratio = std::max(worst_ratio, it / rhs);
      r.add_margin("t=" + fmt(s.t), 1.0 + check.slack - it / rhs);
    } else {
      r.add_margin("t=" + fmt(s.t), -it);
    }
  }
  r.fitted_constants["max_ratio"] = worst_ratio;
  r.finalize();
  return r;
}

// ----------------------------------------------------------- norm bridge

double ground_state_negative_integral(const Geometry& geometry, int m, double p) {
  if (!(m > p && p >= 1.0)) throw ConfigurationError("A_{m,p} needs m > p >= 1");
  const double a = p / (2.0 * m - p);
  const double side = geometry.side_length();
  boost::math::quadrature::tanh_sinh<double> rule;
  // symmetric about L/2; keeping the singular end at 0 avoids cancellation in sin near L
  const double one_d =
      2.0 * rule.integrate([&](double x) { return std::pow(std::sin(std::numbers::pi * x / side), -a); }, 0.0,
                           0.5 * side);
  return std::pow(2.0 / side, -a) * one_d * one_d;
}

InequalityReport verify_weight_norm_bridge(const SpectralField& theta, int m, double p, double tolerance) {
  const bool forward_form = m > p && p >= 1.0;
  const bool converse_form = p >= 2.0 * m - 1.0 && 2 * m - 1 >= 1;
  if (!forward_form && !converse_form)
    throw ConfigurationError("norm bridge needs m > p >= 1 or p >= 2m - 1 >= 1");
  InequalityReport r;
  r.name = "weight_norm_bridge";
  r.tolerance = tolerance;
  r.sample_plan = "m=" + std::to_string(m) + " p=" + fmt(p);
  const Geometry& g = theta.geometry();
  const double bp = b1_norm(theta, p);
  const double weighted = weighted_norm(theta, m);
  r.samples = 1;
  auto relative = [](double lhs, double rhs) {
    if (rhs > 0.0) return 1.0 - lhs / rhs;
    return lhs > 0.0 ? -1.0 : 0.0;
  };
  if (forward_form) {
    const double a = ground_state_negative_integral(g, m, p);
    const double c = std::pow(a, (2.0 * m - p) / (2.0 * m * p));
    r.fitted_constants["A_mp"] = a;
    r.fitted_constants["C_mp"] = c;
    r.add_margin("unweighted_by_weighted", relative(bp, c * weighted));
  }
  if (converse_form) {
    const double sup = inverse(theta).max_abs();
    const double rhs = std::pow(sup, 1.0 / (2 * m)) * std::pow(bp, (2.0 * m - 1.0) / (2.0 * m)) *
                       std::pow(g.area(), (p + 1.0 - 2.0 * m) / (2.0 * m * p));
    r.add_margin("weighted_by_unweighted", relative(weighted, rhs));
  }
  r.fitted_constants["b1_lp"] = bp;
  r.fitted_constants["weighted_norm"] = weighted;
  r.finalize();
  return r;
}

// ------------------------------------------------------------ velocity

InequalityReport verify_velocity_log_bound(const SpectralField& theta, const VelocityLogCheck& check) {
  InequalityReport r;
  r.name = "velocity_log_bound";
  r.tolerance = 0.0;
  const Geometry& g = theta.geometry();
  const int n = g.grid_size();
  const double h = g.spacing();
  const double l0 = check.l0 > 0.0 ? check.l0 : g.side_length() / 4.0;
  r.sample_plan = "centerline shells from d=" + fmt(l0) + " down to " + fmt(check.min_cells) + " dx at N=" +
                  std::to_string(n);

  const VelocityField u = riesz_velocity(theta);
  const double u_sup = u.max_speed();
  r.fitted_constants["u_sup"] = u_sup;
  const int jc = n / 2;
  std::vector<double> x, y;
  for (double upper = l0; upper / 2.0 >= check.min_cells * h * (1.0 - 1e-12); upper /= 2.0) {
    double best = -1.0;
    for (int i = 1; 2 * i <= n; ++i) {
      const double d = i * h;
      if (d >= upper / 2.0 * (1.0 - 1e-12) && d < upper * (1.0 - 1e-12))
        best = std::max(best, std::hypot(u.ux.at(i, jc), u.uy.at(i, jc)));
    }
    if (best < 0.0) continue;
    x.push_back(std::log(1.0 / upper));
    y.push_back(best);
    r.add_margin("shell d<" + fmt(upper) + " finite", std::isfinite(best) ? 1.0 : -1.0);
  }
  r.samples = static_cast<int>(x.size());
  r.fitted_constants["shells"] = static_cast<double>(x.size());
  if (u_sup == 0.0) {
    r.notes.push_back("velocity vanishes identically");
    r.finalize();
    return r;
  }
  r.add_margin("shell_count", static_cast<double>(x.size()) - 4.0);
  if (x.size() >= 2) {
    const Regression fit = linear_fit(x, y);
    r.regression = fit;
    r.fitted_constants["A"] = fit.intercept;
    r.fitted_constants["B"] = fit.slope;
    if (check.trace == BoundaryTrace::kNonvanishing) {
      r.add_margin("slope_positive", fit.slope);
      r.add_margin("r_squared", fit.r_squared - check.min_r_squared);
    }
    // exponential integrability proxy
    const double sup = inverse(theta).max_abs();
    const double gamma = 1.0 / (2.0 * std::max({fit.slope, sup, 1e-300}));
    double integral = 0.0;
    for (std::size_t i = 0; i < u.ux.values().size(); ++i)
      integral += std::exp(gamma * std::hypot(u.ux.values()[i], u.uy.values()[i]));
    integral *= h * h;
    r.fitted_constants["exp_gamma"] = gamma;
    r.fitted_constants["exp_integral"] = integral;
    require_finite(r, "exp_integral", integral);
  }
  require_finite(r, "u_sup", u_sup);
  r.finalize();
  return r;
}

InequalityReport verify_velocity_conditional_bound(const std::vector<SpectralField>& family, double p) {
  if (!(p > kDimension)) throw ConfigurationError("conditional velocity bound needs p > 2");
  InequalityReport r;
  r.name = "velocity_conditional_bound";
  r.tolerance = 0.0;
  r.sample_plan = std::to_string(family.size()) + " fields, p=" + fmt(p);
  double c_min = kInf, c_max = 0.0;
  for (std::size_t k = 0; k < family.size(); ++k) {
    const SpectralField& theta = family[k];
    const double u = riesz_velocity(theta).max_speed();
    const double lip = interior_lipschitz(theta);
    const double sup = inverse(theta).max_abs();
    const double bp = b1_norm(theta, p);
    const double rhs = lip + sup * (1.0 + std::max(0.0, std::log(bp)));
    ++r.samples;
    if (!(rhs > 0.0)) {
      r.add_margin(indexed("zero_field", k), -u);
      continue;
    }
    const double c = u / rhs;
    r.fitted_constants[indexed("C", k)] = c;
    r.fitted_constants[indexed("b1_lp", k)] = bp;
    c_min = std::min(c_min, c);
    c_max = std::max(c_max, c);
  }
  if (c_max > 0.0) {
    r.fitted_constants["C"] = c_max;
    r.add_margin("spread", 0.5 - (c_max - c_min) / (c_max + c_min));
  }
  r.finalize();
  return r;
}

double short_time_threshold(const SpectralField& theta, double c_r) {
  if (!(c_r > 0.0)) throw ConfigurationError("c_r must be positive");
  if (riesz_velocity(theta).max_speed() <= c_r) return kInf;
  auto speed = [&](double tau) { return short_time_velocity(theta, tau).max_speed(); };
  double lo = 1e-14;
  if (speed(lo) > c_r) throw NumericError("short-time velocity exceeds c_r even at tau = 1e-14");
  double hi = 1.0;
  while (speed(hi) <= c_r) {
    lo = hi;
    hi *= 4.0;
    if (hi > 1e12) return kInf;
  }
  for (int it = 0; it < 80 && hi / lo > 1.0 + 1e-10; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (speed(mid) <= c_r) lo = mid;
    else hi = mid;
  }
  return lo;
}

InequalityReport verify_short_time_smallness(const std::vector<SpectralField>& family, double c_r) {
  InequalityReport r;
  r.name = "short_time_smallness";
  r.tolerance = 0.0;
  r.sample_plan = std::to_string(family.size()) + " fields, c_r=" + fmt(c_r);
  for (std::size_t k = 0; k < family.size(); ++k) {
    const double tau = short_time_threshold(family[k], c_r);
    ++r.samples;
    r.fitted_constants[indexed("tau", k)] = tau;
    if (std::isinf(tau)) {
      r.notes.push_back(indexed("field", k) + ": unconstrained");
      r.add_margin(indexed("bound", k), 1.0 - riesz_velocity(family[k]).max_speed() / c_r);
      continue;
    }
    r.add_margin(indexed("tau_positive", k), tau);
    r.add_margin(indexed("bound", k), 1.0 - short_time_velocity(family[k], tau).max_speed() / c_r);
  }
  r.finalize();
  return r;
}

// ------------------------------------------------- finite differences of u

InequalityReport verify_finite_difference_velocity(const SpectralField& theta, const FiniteDifferenceCheck& check) {
  if (check.epsilons.empty()) throw ConfigurationError("need at least one epsilon");
  for (double e : check.epsilons)
    if (!(e > 0.0)) throw ConfigurationError("epsilons must be positive");
  InequalityReport r;
  r.name = "finite_difference_velocity";
  r.tolerance = 1e-12;
  const GeometryPtr& geo = theta.geometry_ptr();
  const double h = geo->spacing();
  const CutoffPair cut = standard_cutoff(geo, check.center, check.scale);
  const double dcenter = geo->distance_to_boundary(check.center);
  for (const Displacement& s : check.steps)
    if (s.length(h) > dcenter / 16.0 * (1.0 + 1e-12)) throw PreconditionError("|h| must not exceed d(x0)/16");
  r.sample_plan = "support of phi at x0=(" + fmt(check.center.x) + ", " + fmt(check.center.y) + "), l=" +
                  fmt(check.scale) + ", " + std::to_string(check.steps.size()) + " steps";

  const VelocityField u = riesz_velocity(theta);
  const double bp = b1_norm(theta, check.p);
  const double dp = dim_over_p(check.p);
  const auto& d = geo->distance();

  struct Sample {
    double lhs, diss, far, local;
  };
  std::vector<Sample> samples;
  double min_d = kInf;
  for (const Displacement& s : check.steps) {
    const MaskedGridField dux = finite_difference(u.ux, s);
    const MaskedGridField duy = finite_difference(u.uy, s);
    const MaskedGridField dth = finite_difference(theta, s);
    GridField local(geo);
    for (std::size_t i = 0; i < local.values().size(); ++i)
      local.values()[i] = dth.valid[i] ? cut.chi.values()[i] * dth.values.values()[i] : 0.0;
    const GridField diss = nonlinear_dissipation(forward(local));
    const double len = s.length(h);
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double phi = cut.phi.values()[i];
      if (!(phi > 0.0)) continue;
      if (!dux.valid[i]) throw PreconditionError("x + h leaves the grid on the support of phi");
      min_d = std::min(min_d, diss.values()[i]);
      samples.push_back({phi * std::hypot(dux.values.values()[i], duy.values.values()[i]),
                         d[i] * std::max(diss.values()[i], 0.0), len * std::pow(d[i], -dp) * bp,
                         phi * std::abs(dth.values.values()[i])});
    }
  }
  r.samples = static_cast<int>(samples.size());
  if (std::isfinite(min_d)) r.fitted_constants["min_dissipation"] = min_d;

  std::vector<double> eps = check.epsilons;
  std::sort(eps.begin(), eps.end(), std::greater<>());
  // a local term at roundoff level cannot carry the remainder; C_eps must cover those nodes alone
  double local_max = 0.0;
  for (const Sample& s : samples) local_max = std::max(local_max, s.local);
  const double local_floor = 1e-12 * local_max;
  double need = 0.0, need_bare = 0.0;
  for (const Sample& s : samples) {
    if (!(s.far > 0.0)) continue;
    need = std::max(need, std::max(s.lhs - std::sqrt(eps.front() * s.diss), 0.0) / s.far);
    if (s.local <= local_floor)
      for (double e : eps) need_bare = std::max(need_bare, e * std::max(s.lhs - std::sqrt(e * s.diss), 0.0) / s.far);
  }
  const double kappa = std::max(0.5 * eps.front() * need, need_bare);
  r.fitted_constants["kappa"] = kappa;

  std::vector<double> delta;
  for (double e : eps) {
    const double c_eps = kappa / e;
    double dl = 0.0, uncovered = 0.0;
    for (const Sample& s : samples) {
      const double rest = s.lhs - std::sqrt(e * s.diss) - c_eps * s.far;
      if (rest <= 0.0) continue;
      if (s.local > local_floor) dl = std::max(dl, rest / s.local);
      else uncovered = std::max(uncovered, rest);
    }
    r.fitted_constants["C_eps[" + fmt(e) + "]"] = c_eps;
    r.fitted_constants["delta[" + fmt(e) + "]"] = dl;
    r.add_margin("covered[" + fmt(e) + "]", -uncovered);
    delta.push_back(dl);
  }
  for (std::size_t k = 0; k + 1 < delta.size(); ++k)
    r.add_margin("delta_nonincreasing[" + fmt(eps[k + 1]) + "]", delta[k] - delta[k + 1]);
  r.finalize();
  return r;
}

// ------------------------------------------------------- normal velocity

InequalityReport verify_normal_velocity_rate(const SpectralField& theta, const NormalVelocityCheck& check) {
  InequalityReport r;
  r.name = "normal_velocity_rate";
  r.tolerance = 0.0;
  const GeometryPtr& geo = theta.geometry_ptr();
  const double h = geo->spacing();
  const double l0 = check.l0 > 0.0 ? check.l0 : geo->side_length() / 8.0;
  r.sample_plan = "shells from d=" + fmt(l0) + " down to " + fmt(check.min_cells) + " dx at N=" +
                  std::to_string(geo->grid_size());

  const TangentFrame frame = tangent_frame(geo, check.smoothing_time);
  r.fitted_constants["smoothing_time"] = frame.smoothing_time;
  r.fitted_constants["tangent_leak"] = frame.boundary_leak;
  const VelocityField u = riesz_velocity(theta);
  const std::vector<double> q = normal_velocity(u, frame);
  if (max_abs(q) == 0.0) {
    r.notes.push_back("u . N vanishes identically");
    r.finalize();
    return r;
  }
  const ShellProfile prof = shell_maxima(*geo, q, l0, check.min_cells * h);
  r.samples = static_cast<int>(prof.value.size());
  r.add_margin("shell_count", static_cast<double>(prof.value.size()) - 4.0);
  const double dp = dim_over_p(check.p);
  const double target = std::min(1.0 - dp, check.alpha) - check.slope_slack;
  if (prof.fit.samples >= 2) {
    r.regression = prof.fit;
    r.fitted_constants["slope"] = prof.fit.slope;
    r.add_margin("slope", prof.fit.slope - target);
  } else {
    r.add_margin("slope", -1.0);
  }
  r.fitted_constants["slope_target"] = target;

  const double bp = b1_norm(theta, check.p);
  const double holder = inverse(theta).max_abs() + holder_seminorm(theta, check.alpha).value;
  const auto& d = geo->distance();
  const auto& mask = geo->corner_mask();
  double c = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (mask[i] || d[i] > l0 || d[i] < check.min_cells * h * (1.0 - 1e-12)) continue;
    const double rhs = (std::pow(d[i], 1.0 - dp) * bp + std::pow(d[i], check.alpha) * holder) * frame.t_sup +
                       std::pow(d[i], 2.0 - dp) * bp * frame.grad_t_sup;
    if (rhs > 0.0) c = std::max(c, q[i] / rhs);
  }
  r.fitted_constants["C"] = c;
  require_finite(r, "C", c);
  r.finalize();
  return r;
}

// ------------------------------------------------------------ commutator

InequalityReport verify_commutator_scaling(const SpectralField& theta, const CommutatorCheck& check) {
  InequalityReport r;
  r.name = "commutator_scaling";
  r.tolerance = 0.0;
  const GeometryPtr& geo = theta.geometry_ptr();
  const double dx = geo->spacing();
  const double mid = geo->side_length() / 2.0;
  r.sample_plan = std::to_string(check.distances.size()) + " centers (d, L/2) at N=" + std::to_string(geo->grid_size());
  const double bp = b1_norm(theta, check.p);
  const double dp = dim_over_p(check.p);

  std::vector<double> x, y;
  double gamma0 = 0.0;
  for (double dist : check.distances) {
    const int steps = std::max(1, static_cast<int>(std::floor(dist / (32.0 * dx) + 1e-9)));
    const Displacement s{steps, 0};
    const GridField c = commutator(theta, Point{dist, mid}, dist / 2.0, s);
    const double norm = c.max_abs();
    const double len = s.length(dx);
    ++r.samples;
    r.fitted_constants["norm[d=" + fmt(dist) + "]"] = norm;
    r.fitted_constants["h[d=" + fmt(dist) + "]"] = len;
    if (bp > 0.0) gamma0 = std::max(gamma0, norm * dist * std::pow(dist, dp) / (len * bp));
    if (norm > 0.0) {
      x.push_back(std::log(dist));
      y.push_back(std::log(norm / len));
    }
  }
  r.fitted_constants["Gamma0"] = gamma0;
  require_finite(r, "Gamma0", gamma0);
  if (x.empty()) {
    r.notes.push_back("commutator vanishes at every center");
    r.finalize();
    return r;
  }
  r.add_margin("shell_count", static_cast<double>(x.size()) - 4.0);
  if (x.size() >= 2) {
    const Regression fit = linear_fit(x, y);
    r.regression = fit;
    r.add_margin("slope_lower", fit.slope + (1.0 + dp) + check.slope_slack);
    r.add_margin("slope_upper", -fit.slope);
    r.add_margin("r_squared", fit.r_squared - check.min_r_squared);
  }
  r.finalize();
  return r;
}

// ---------------------------------------------------------- kernel bounds

InequalityReport verify_kernel_bounds(const GeometryPtr& geometry, const KernelSamplePlan& plan) {
  if (plan.samples < 2 || !(plan.t_min > 0.0) || !(plan.t_max > plan.t_min))
    throw ConfigurationError("kernel sample plan needs >= 2 samples and 0 < t_min < t_max");
  InequalityReport r;
  r.name = "kernel_bounds";
  r.tolerance = 0.0;
  r.seed = plan.seed;
  const Geometry& g = *geometry;
  const double side = g.side_length();
  r.sample_plan = "latin hypercube of " + std::to_string(plan.samples) + " (log t, x, y), t in [" + fmt(plan.t_min) +
                  ", " + fmt(plan.t_max) + "], seed " + std::to_string(plan.seed);

  const auto design = latin_hypercube(plan.samples, 5, plan.seed);
  std::vector<double> gx, gy_up;       // Gaussian: r^2/t vs log(H / base)
  std::vector<double> hx, hy;          // Hessian: r^2/t vs log(|D_x D_x H| / form)
  std::vector<double> c1x, c1y;        // cancellation: d(x)^2/t vs log(|(D_x + D_y) H| t^{3/2})
  std::vector<double> c2x, c2y;        // d(x)^2/t vs log(|D_x (D_x + D_y) H| t^2)
  double grad_c = 0.0, grad_cy = 0.0, sym_err = 0.0;
  int used = 0;
  for (const auto& u : design) {
    const double t = plan.t_min * std::pow(plan.t_max / plan.t_min, u[0]);
    const Point x{u[1] * side, u[2] * side}, y{u[3] * side, u[4] * side};
    const double rr = std::hypot(x.x - y.x, x.y - y.y);
    const double dxp = g.distance_to_boundary(x), dyp = g.distance_to_boundary(y);
    if (!(rr > 0.0) || !(dxp > 0.0) || !(dyp > 0.0)) continue;
    const HeatKernelJet jet = heat_kernel_jet(g, x, y, t);
    const double H = jet.value;
    if (!(H > plan.floor)) continue;
    ++used;
    const double mx = std::min(g.ground_state(x) / rr, 1.0), my = std::min(g.ground_state(y) / rr, 1.0);
    gx.push_back(rr * rr / t);
    gy_up.push_back(std::log(H * t / (mx * my)));

    // gradient bounds in x and, by the symmetric formula, in y
    auto grad_form = [&](double dist) {
      return std::sqrt(t) >= dist ? 1.0 / dist : (1.0 + rr / std::sqrt(t)) / std::sqrt(t);
    };
    const double gnx = std::hypot(jet.grad_x[0], jet.grad_x[1]);
    const double gny = std::hypot(jet.grad_y[0], jet.grad_y[1]);
    grad_c = std::max(grad_c, gnx / H / grad_form(dxp));
    grad_cy = std::max(grad_cy, gny / H / grad_form(dyp));
    const HeatKernelJet swapped = heat_kernel_jet(g, y, x, t);
    sym_err = std::max(sym_err, std::hypot(swapped.grad_x[0] - jet.grad_y[0], swapped.grad_x[1] - jet.grad_y[1]) /
                                    std::max(gny, 1e-300));

    double hess = 0.0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) hess += jet.hess_xx[a][b] * jet.hess_xx[a][b];
    hess = std::sqrt(hess);
    const double form = t <= dxp * dxp ? 1.0 / (t * t) : 1.0 / (dxp * dxp * t);
    if (hess > plan.floor) {
      hx.push_back(rr * rr / t);
      hy.push_back(std::log(hess / form));
    }
    if (t <= dxp * dxp) {
      const double c1 = std::hypot(jet.grad_x[0] + jet.grad_y[0], jet.grad_x[1] + jet.grad_y[1]);
      double c2 = 0.0;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          const double v = jet.hess_xx[a][b] + jet.hess_xy[a][b];
          c2 += v * v;
        }
      c2 = std::sqrt(c2);
      if (c1 > plan.floor) {
        c1x.push_back(dxp * dxp / t);
        c1y.push_back(std::log(c1 * std::pow(t, 1.5)));
      }
      if (c2 > plan.floor) {
        c2x.push_back(dxp * dxp / t);
        c2y.push_back(std::log(c2 * t * t));
      }
    }
  }
  r.samples = used;
  r.fitted_constants["samples_above_floor"] = used;

  auto rate = [](const Regression& fit) { return fit.slope < 0.0 ? -1.0 / fit.slope : kInf; };
  if (gx.size() >= 2) {
    const Regression up = supporting_line(gx, gy_up, true);
    const Regression lo = supporting_line(gx, gy_up, false);
    const double big_k = rate(up), small_k = rate(lo);
    r.fitted_constants["C"] = std::exp(up.intercept);
    r.fitted_constants["K"] = big_k;
    r.fitted_constants["c"] = std::exp(lo.intercept);
    r.fitted_constants["k"] = small_k;
    r.regression = up;
    require_finite(r, "K", big_k);
    require_finite(r, "k", small_k);
    require_finite(r, "C", std::exp(up.intercept));
    r.add_margin("c_positive", std::exp(lo.intercept));
    r.add_margin("K_at_least_1", big_k - 1.0);
    r.add_margin("K_at_most_16", 16.0 - big_k);
  } else {
    r.add_margin("gaussian_samples", -1.0);
  }
  r.fitted_constants["C_grad_x"] = grad_c;
  r.fitted_constants["C_grad_y"] = grad_cy;
  require_finite(r, "C_grad_x", grad_c);
  require_finite(r, "C_grad_y", grad_cy);
  r.fitted_constants["grad_symmetry_error"] = sym_err;
  r.add_margin("grad_symmetry", 1e-10 - sym_err);
  if (hx.size() >= 2) {
    const Regression fit = supporting_line(hx, hy, true);
    r.fitted_constants["C_hess"] = std::exp(fit.intercept);
    r.fitted_constants["K_tilde"] = rate(fit);
    require_finite(r, "K_tilde", rate(fit));
  }
  if (c1x.size() >= 2) {
    const Regression fit = supporting_line(c1x, c1y, true);
    r.fitted_constants["C_cancel1"] = std::exp(fit.intercept);
    r.fitted_constants["K_cancel1"] = rate(fit);
  }
  if (c2x.size() >= 2) {
    const Regression fit = supporting_line(c2x, c2y, true);
    r.fitted_constants["C_cancel2"] = std::exp(fit.intercept);
    r.fitted_constants["K_cancel2"] = rate(fit);
  }

  // translation invariance far from the boundary: x at the center, t = 0.01 d^2, |x - y| = sqrt(t)
  const Point center{side / 2.0, side / 2.0};
  const double dc = g.distance_to_boundary(center);
  const double tc = 0.01 * dc * dc;
  const HeatKernelJet jc = heat_kernel_jet(g, center, Point{center.x + std::sqrt(tc), center.y}, tc);
  const double cancel = std::hypot(jc.grad_x[0] + jc.grad_y[0], jc.grad_x[1] + jc.grad_y[1]);
  const double ratio = cancel / std::hypot(jc.grad_x[0], jc.grad_x[1]);
  r.fitted_constants["interior_cancellation_ratio"] = ratio;
  r.add_margin("interior_cancellation", 1.0 - ratio / 1e-6);
  r.finalize();
  return r;
}

}  // namespace dsqg

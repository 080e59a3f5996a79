// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero if any line fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "dsqg/inequalities.hpp"
#include "dsqg/run.hpp"

using namespace dsqg;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs < budget_s;
  const bool ok = o.pass && in_time;
  if (!ok) ++failures;
  std::printf("%s %2d %s: %s; runtime %.2f s (budget %.0f s%s)\n", ok ? "PASS" : "FAIL", id, title,
              o.detail.c_str(), secs, budget_s, in_time ? "" : ", exceeded");
  std::fflush(stdout);
}

std::string num(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

double constant_of(const InequalityReport& r, const std::string& key) {
  const auto it = r.fitted_constants.find(key);
  return it == r.fitted_constants.end() ? std::nan("") : it->second;
}

double envelope_b(const SpectralField& theta) {
  const GridField v = inverse(theta);
  const auto& w = theta.geometry().ground_state();
  double b = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) b = std::max(b, std::abs(v.values()[i]) / w[i]);
  return b;
}

SolverConfig sqg_config(double t_end, double dt, double interval) {
  SolverConfig c;
  c.t_end = t_end;
  c.dt = dt;
  c.output_interval = interval;
  return c;
}

DiagnosticsParams no_diagnostics() {
  DiagnosticsParams p;
  p.alphas.clear();
  p.ps.clear();
  p.ms.clear();
  return p;
}

// ------------------------------------------------------------------------

Outcome criterion_spectral_exactness() {
  const GeometryPtr geo = build_square_geometry(128);
  const int modes[][2] = {{1, 1}, {1, 2}, {3, 5}, {17, 4}, {40, 63}, {127, 127}};
  double worst = 0.0;
  for (double s : {-1.0, 0.5, 1.0, 2.0})
    for (const auto& mn : modes) {
      const SpectralField out = apply_lambda_power(SpectralField::mode(geo, mn[0], mn[1]), s);
      const double expect = std::pow(mn[0] * mn[0] + mn[1] * mn[1], s / 2.0);
      for (int m = 1; m <= geo->modes(); ++m)
        for (int n = 1; n <= geo->modes(); ++n) {
          const double target = (m == mn[0] && n == mn[1]) ? expect : 0.0;
          worst = std::max(worst, std::abs(out.at(m, n) - target) / expect);
        }
    }
  double heat_err = 0.0;
  for (const auto& mn : {std::array<int, 2>{1, 1}, std::array<int, 2>{2, 3}, std::array<int, 2>{7, 1}}) {
    const SpectralField f = SpectralField::mode(geo, mn[0], mn[1]);
    const double expect = std::sqrt(double(mn[0] * mn[0] + mn[1] * mn[1]));
    heat_err = std::max(heat_err, std::abs(lambda_via_heat(f, 1.0).at(mn[0], mn[1]) - expect) / expect);
  }
  return {worst < 1e-12 && heat_err < 1e-8,
          "max rel err " + num(worst) + " (< 1e-12), lambda_via_heat rel err " + num(heat_err) + " (< 1e-8)"};
}

Outcome criterion_cordoba() {
  const GeometryPtr coarse = build_square_geometry(128);
  const GeometryPtr fine = build_square_geometry(256);
  const ConvexFunction phi = ConvexFunction::half_square();
  const InequalityReport a = verify_cordoba(coarse, random_family(coarse, 10, 6, 2024), phi);
  const InequalityReport b = verify_cordoba(fine, random_family(fine, 10, 6, 2024), phi);
  double positivity = std::numeric_limits<double>::infinity();
  for (const auto& m : a.margins)
    if (m.label.rfind("positivity", 0) == 0) positivity = std::min(positivity, m.value);
  const double g1 = constant_of(a, "gamma1"), g2 = constant_of(b, "gamma1");
  const double drift = std::abs(g2 - g1) / g1;
  return {a.pass && positivity > 0.0 && g1 > 0.0 && drift <= 0.2,
          "min scaled d D(f)/f^2 positivity " + num(positivity) + ", gamma1 " + num(g1) + " -> " + num(g2) +
              " under N 128 -> 256 (change " + num(100 * drift) + "% <= 20%)"};
}

Outcome criterion_weighted_identity() {
  // at N = 128 the hinge kink (s = 0.05, |b| up to ~100) is under-resolved
  const GeometryPtr geo = build_square_geometry(256);
  const auto family = random_family(geo, 10, 6, 2024);
  const SpectralField w = SpectralField::mode(geo, 1, 1);
  const InequalityReport r =
      verify_weighted_identity(family, w, {ConvexFunction::square(), ConvexFunction::smoothed_hinge(0.5, 0.05)});
  double linear = 0.0;
  for (const auto& theta : family) {
    const WeightedConvexityTerms t = weighted_convexity_terms(theta, w, ConvexFunction::linear());
    linear = std::max(linear, t.defect.max_abs());
  }
  return {r.pass && r.min_margin >= -1e-8 && linear < 1e-10,
          "min defect/scale " + num(r.min_margin) + " (>= -1e-8) for z^2 and smoothed hinge at N=256, linear |D| " +
              num(linear) + " (< 1e-10)"};
}

Outcome criterion_decay_envelope() {
  const GeometryPtr geo = build_square_geometry(128);
  const Solver solver(sqg_config(1.0, 0.0025, 0.5));
  const RunResult exact = run(solver, SpectralField::mode(geo, 1, 1), no_diagnostics());
  double worst = 0.0;
  for (const SolverState& s : exact.snapshots) {
    if (s.t < 0.25) continue;
    const GridField v = inverse(s.theta);
    const double decay = std::exp(-std::numbers::sqrt2 * s.t);
    const auto& w = geo->ground_state();
    for (std::size_t i = 0; i < w.size(); ++i) worst = std::max(worst, std::abs(v.values()[i] - decay * w[i]));
  }
  const SpectralField theta0 = SpectralField::mode(geo, 1, 1) + SpectralField::mode(geo, 1, 2, 0.3);
  const RunResult perturbed = run(Solver(sqg_config(1.0, 0.0025, 0.1)), theta0, no_diagnostics());
  EnvelopeCheck check;
  check.bound_b = envelope_b(theta0);
  const InequalityReport r = verify_decay_envelope(perturbed.snapshots, check);
  return {worst <= 1e-8 && r.pass,
          "w1 run max |theta - e^{-sqrt2 t} w1| " + num(worst) + " (<= 1e-8) at t in {0.5, 1}; perturbed run B " +
              num(check.bound_b) + ", min envelope margin " + num(r.min_margin) + " (>= -1e-6)"};
}

Outcome criterion_weighted_lp() {
  const GeometryPtr geo = build_square_geometry(128);
  const SpectralField theta0 = SpectralField::mode(geo, 1, 1) + SpectralField::mode(geo, 1, 2, 0.3);
  const RunResult res = run(Solver(sqg_config(1.0, 0.0025, 0.1)), theta0, no_diagnostics());
  WeightedLpCheck check;
  check.m = 2;
  check.slack = 0.05;
  const InequalityReport r = verify_weighted_lp_control(res.snapshots, check);
  return {r.pass, "max ratio I(t)/bound " + num(constant_of(r, "max_ratio")) + " (<= 1.05) over " +
                      std::to_string(r.samples) + " output times"};
}

Outcome criterion_velocity_dichotomy() {
  const GeometryPtr geo = build_square_geometry(256);
  const InequalityReport flat = verify_velocity_log_bound(truncated_constant(geo));
  VelocityLogCheck vanishing;
  vanishing.trace = BoundaryTrace::kVanishing;
  const InequalityReport ground = verify_velocity_log_bound(SpectralField::mode(geo, 1, 1), vanishing);
  const double s1 = flat.regression ? flat.regression->slope : std::nan("");
  const double r2 = flat.regression ? flat.regression->r_squared : std::nan("");
  const double s2 = ground.regression ? ground.regression->slope : std::nan("");
  const double u2 = constant_of(ground, "u_sup");
  const bool ok = flat.pass && ground.pass && s1 > 0.0 && r2 >= 0.9 && std::isfinite(u2) &&
                  std::abs(s2) <= 0.1 * s1;
  return {ok, "truncated constant slope " + num(s1) + " r^2 " + num(r2) + " (>= 0.9); w1 sup|u| " + num(u2) +
                  ", slope " + num(s2) + " (|.| <= " + num(0.1 * s1) + ")"};
}

Outcome criterion_commutator() {
  const GeometryPtr geo = build_square_geometry(2048);
  const InequalityReport r = verify_commutator_scaling(SpectralField::mode(geo, 1, 1));
  const double slope = r.regression ? r.regression->slope : std::nan("");
  const double r2 = r.regression ? r.regression->r_squared : std::nan("");
  return {r.pass && slope >= -1.3 && slope <= 0.0 && r2 >= 0.85 && r.samples >= 4,
          "slope " + num(slope) + " in [-1.3, 0], r^2 " + num(r2) + " (>= 0.85), " + std::to_string(r.samples) +
              " shells at N=2048"};
}

Outcome criterion_normal_velocity() {
  const GeometryPtr geo = build_square_geometry(256);
  NormalVelocityCheck check;
  check.alpha = 0.8;
  const InequalityReport r = verify_normal_velocity_rate(SpectralField::mode(geo, 1, 1), check);
  const double slope = constant_of(r, "slope");
  const double target = constant_of(r, "slope_target");
  return {r.pass && slope >= target, "shell slope " + num(slope) + " (>= min(1 - 2/p, 0.8) - 0.15 = " +
                                         num(target) + " with p = inf), tangent leak " +
                                         num(constant_of(r, "tangent_leak"))};
}

Outcome criterion_solver_integrity() {
  const GeometryPtr geo = build_square_geometry(128);
  const SpectralField theta0 = SpectralField::mode(geo, 1, 1) + SpectralField::mode(geo, 1, 2, 0.3);
  const RunResult full = run(Solver(sqg_config(1.0, 0.0025, 0.1)), theta0, no_diagnostics());

  // fixed-step runs to t = 0.5 for the order estimate
  std::vector<SpectralField> ends;
  for (double dt : {0.01, 0.005, 0.0025}) {
    SolverConfig c = sqg_config(0.5, dt, 0.5);
    c.max_halvings = 0;
    ends.push_back(run(Solver(c), theta0, no_diagnostics()).snapshots.back().theta);
  }
  const double e1 = (ends[0] + (-1.0) * ends[1]).l2_norm();
  const double e2 = (ends[1] + (-1.0) * ends[2]).l2_norm();
  const double order = std::log2(e1 / e2);
  const bool ok = std::abs(full.ledger_residual) <= 1e-6 && full.max_overshoot <= 0.01 && order >= 1.8;
  return {ok, "ledger residual " + num(full.ledger_residual) + " (<= 1e-6), overshoot " + num(full.max_overshoot) +
                  " (<= 0.01), observed order " + num(order) + " (>= 1.8)"};
}

Outcome criterion_holder_persistence() {
  const GeometryPtr geo = build_square_geometry(128);
  const SpectralField theta0 = SpectralField::mode(geo, 1, 1) + SpectralField::mode(geo, 1, 2, 0.3);
  DiagnosticsParams params = no_diagnostics();
  params.alphas = {0.4};
  params.ps = {4.0};
  const RunResult res = run(Solver(sqg_config(1.0, 0.0025, 0.1)), theta0, params);
  const HolderMonitor m = holder_monitor(res.records, 0.4, 4.0);
  return {!m.violated, "B " + num(m.bound_b) + ", M " + num(m.bound_m) + ", K_fit " + num(m.k_fit) +
                           ", worst margin " + num(m.worst_margin) +
                           (m.violated ? ", first violation at record " + std::to_string(m.first_violation) : "")};
}

Outcome criterion_kernel_bounds() {
  const InequalityReport r = verify_kernel_bounds(build_square_geometry(128));
  const double k = constant_of(r, "K"), c = constant_of(r, "c");
  return {r.pass && k >= 1.0 && k <= 16.0 && c > 0.0,
          "fitted K " + num(k) + " in [1, 16] (free-space rate 4), lower c " + num(c) + " > 0, " +
              std::to_string(r.samples) + " of 500 samples above the floor"};
}

}  // namespace

int main() {
  criterion(1, "spectral exactness", 1, criterion_spectral_exactness);
  criterion(2, "Cordoba positivity", 30, criterion_cordoba);
  criterion(3, "weighted identity defect", 30, criterion_weighted_identity);
  criterion(4, "decay envelope", 60, criterion_decay_envelope);
  criterion(5, "weighted Lp control", 60, criterion_weighted_lp);
  criterion(6, "velocity dichotomy", 60, criterion_velocity_dichotomy);
  criterion(7, "commutator scaling", 120, criterion_commutator);
  criterion(8, "normal velocity vanishing", 60, criterion_normal_velocity);
  criterion(9, "solver integrity", 120, criterion_solver_integrity);
  criterion(10, "Holder persistence monitor", 120, criterion_holder_persistence);
  criterion(11, "kernel bounds", 60, criterion_kernel_bounds);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

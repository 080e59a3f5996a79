#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "dsqg/errors.hpp"
#include "dsqg/inequalities.hpp"
#include "dsqg/run.hpp"

using namespace dsqg;
using std::numbers::pi;

namespace {

double constant(const InequalityReport& r, const std::string& key) {
  const auto it = r.fitted_constants.find(key);
  REQUIRE(it != r.fitted_constants.end());
  return it->second;
}

DiagnosticsParams bare() {
  DiagnosticsParams p;
  p.alphas.clear();
  p.ps.clear();
  p.ms.clear();
  return p;
}

std::vector<SolverState> drift_run(const SpectralField& theta0, const SpectralField& stream, double t_end = 1.0) {
  SolverConfig c;
  c.t_end = t_end;
  c.dt = 0.01;
  c.output_interval = 0.25;
  c.mode = DriftMode::kPrescribed;
  c.drift_stream = stream;
  return run(Solver(c), theta0, bare()).snapshots;
}

double sup_ratio(const SpectralField& theta) {
  const GridField v = inverse(theta);
  double b = 0.0;
  for (std::size_t i = 0; i < v.values().size(); ++i)
    b = std::max(b, std::abs(v.values()[i]) / theta.geometry().ground_state()[i]);
  return b;
}

}  // namespace

TEST_CASE("random family and truncated constant") {
  const GeometryPtr g = build_square_geometry(32);
  const auto a = random_family(g, 3, 4, 99), b = random_family(g, 3, 4, 99);
  for (int k = 0; k < 3; ++k) CHECK(a[k].coefficients() == b[k].coefficients());
  CHECK(a[0].at(5, 1) == 0.0);
  const SpectralField one = truncated_constant(g);
  CHECK(one.at(1, 1) == doctest::Approx(8.0 * pi / (pi * pi)).epsilon(1e-14));
  CHECK(one.at(2, 1) == 0.0);
  CHECK(one.evaluate({pi / 2, pi / 2}) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("Cordoba: positivity, linear case, homogeneity") {
  const GeometryPtr g = build_square_geometry(64);
  std::vector<SpectralField> family{SpectralField::mode(g, 1, 1), SpectralField::mode(g, 1, 2),
                                    random_family(g, 1, 5, 3).front()};
  const InequalityReport r = verify_cordoba(g, family, ConvexFunction::half_square());
  CHECK(r.pass);
  CHECK(r.min_margin > 0.0);
  CHECK(constant(r, "gamma1") > 0.0);

  const InequalityReport lin = verify_cordoba(g, {SpectralField::mode(g, 1, 1)}, ConvexFunction::linear());
  CHECK(lin.pass);

  for (SpectralField& f : family) f *= 10.0;
  const InequalityReport scaled = verify_cordoba(g, family, ConvexFunction::half_square());
  CHECK(constant(scaled, "gamma1") == doctest::Approx(constant(r, "gamma1")).epsilon(1e-10));

  const InequalityReport again = verify_cordoba(g, family, ConvexFunction::half_square());
  CHECK(again.min_margin == scaled.min_margin);
}

TEST_CASE("weighted identity: square, hinge above the range, linear") {
  const GeometryPtr g = build_square_geometry(64);
  const std::vector<SpectralField> thetas = random_family(g, 3, 6, 17);
  const SpectralField w = SpectralField::mode(g, 1, 1);
  const InequalityReport sq = verify_weighted_identity(thetas, w, {ConvexFunction::square()});
  CHECK(sq.pass);
  CHECK(sq.min_margin >= -1e-8);

  double sup_b = 0.0;
  for (const SpectralField& t : thetas) sup_b = std::max(sup_b, boundary_ratio(t).max_abs());
  const double s = 0.05;
  const InequalityReport hinge =
      verify_weighted_identity(thetas, w, {ConvexFunction::smoothed_hinge(sup_b + 20 * s, s)});
  CHECK(hinge.pass);
  for (const MarginSample& m : hinge.margins) CHECK(std::abs(m.value) < 1e-8);

  const InequalityReport lin = verify_weighted_identity(thetas, w, {ConvexFunction::linear(2.0)});
  CHECK(lin.pass);
  for (const MarginSample& m : lin.margins) CHECK(std::abs(m.value) < 1e-10);
}

TEST_CASE("Lambda 1 lower bound") {
  const GeometryPtr g = build_square_geometry(128);
  const InequalityReport r = verify_lambda_one_lower(g);
  CHECK(r.pass);
  CHECK(constant(r, "c0") > 0.0);
  CHECK(constant(r, "symmetry_error") <= 1e-10);
  CHECK(constant(r, "centerline_margin_boundary") > constant(r, "centerline_margin_center"));
}

TEST_CASE("decay envelope") {
  const GeometryPtr g = build_square_geometry(32);
  const SpectralField zero(g);
  EnvelopeCheck exact;
  const InequalityReport r = verify_decay_envelope(drift_run(SpectralField::mode(g, 1, 1), zero), exact);
  CHECK(r.pass);
  CHECK(constant(r, "envelope_gap") < 1e-10);

  const SpectralField theta0 = SpectralField::mode(g, 1, 1) + SpectralField::mode(g, 1, 2, 0.3);
  EnvelopeCheck perturbed;
  perturbed.bound_b = sup_ratio(theta0);
  CHECK(verify_decay_envelope(drift_run(theta0, zero), perturbed).pass);

  EnvelopeCheck small_b;
  small_b.bound_b = 0.5 * perturbed.bound_b;
  CHECK_THROWS_AS(verify_decay_envelope(drift_run(theta0, zero, 0.25), small_b), PreconditionError);
}

TEST_CASE("weighted Lp control") {
  const GeometryPtr g = build_square_geometry(32);
  const SpectralField zero(g);
  WeightedLpCheck check;
  const InequalityReport one = verify_weighted_lp_control(drift_run(SpectralField::mode(g, 1, 1), zero), check);
  CHECK(one.pass);
  // b1(t) = e^{-sqrt2 t}: I(t)/bound(t) = e^{-4 sqrt2 t} / e^{-3 sqrt2 t}
  for (const MarginSample& m : one.margins) {
    const double t = std::stod(m.label.substr(2));
    CHECK(m.value == doctest::Approx(1.0 + check.slack - std::exp(-std::numbers::sqrt2 * t)).epsilon(1e-8));
  }
  CHECK(verify_weighted_lp_control(drift_run(zero, zero), check).pass);

  // small part under c0 / ((2m-1) sup|grad w1|) with c0 of the Lambda 1 bound
  check.lambda_one_constant = 0.0634;
  const SpectralField small = SpectralField::mode(g, 2, 1, 0.005);
  check.small_stream = small;
  const SpectralField theta0 = SpectralField::mode(g, 1, 1) + SpectralField::mode(g, 1, 2, 0.3);
  const InequalityReport r = verify_weighted_lp_control(drift_run(theta0, small), check);
  CHECK(r.pass);
  CHECK(constant(r, "vs_sup") <= constant(r, "vs_threshold"));

  check.small_stream = SpectralField::mode(g, 2, 1, 0.5);
  CHECK_THROWS_AS(verify_weighted_lp_control(drift_run(theta0, *check.small_stream, 0.25), check), PreconditionError);
}

TEST_CASE("weight-norm bridge") {
  const GeometryPtr g = build_square_geometry(64);
  const SpectralField w = SpectralField::mode(g, 1, 1);
  const InequalityReport fwd = verify_weight_norm_bridge(w, 4, 3.0);
  CHECK(fwd.pass);
  CHECK(constant(fwd, "b1_lp") == doctest::Approx(std::cbrt(pi * pi)).epsilon(1e-12));
  CHECK(constant(fwd, "weighted_norm") == doctest::Approx(std::pow(8.0 / pi, 1.0 / 8)).epsilon(1e-10));
  CHECK(verify_weight_norm_bridge(w, 2, 3.0).pass);

  const InequalityReport big = verify_weight_norm_bridge(10.0 * w, 4, 3.0);
  CHECK(constant(big, "b1_lp") == doctest::Approx(10.0 * constant(fwd, "b1_lp")).epsilon(1e-12));
  CHECK(constant(big, "weighted_norm") == doctest::Approx(10.0 * constant(fwd, "weighted_norm")).epsilon(1e-12));
  CHECK(big.min_margin == doctest::Approx(fwd.min_margin).epsilon(1e-10));

  for (const SpectralField& f : random_family(g, 3, 6, 8)) {
    CHECK(verify_weight_norm_bridge(f, 4, 3.0).pass);
    CHECK(verify_weight_norm_bridge(f, 2, 3.0).pass);
  }
  CHECK_THROWS_AS(verify_weight_norm_bridge(w, 2, 2.0), ConfigurationError);
}

TEST_CASE("A_{m,p} against the Beta-function closed form") {
  const GeometryPtr g = build_square_geometry(16);
  for (auto [m, p] : {std::pair{2, 1.0}, std::pair{4, 3.0}, std::pair{3, 2.5}}) {
    const double a = p / (2 * m - p);
    const double one_d = std::sqrt(pi) * std::tgamma((1 - a) / 2) / std::tgamma(1 - a / 2);
    const double expect = std::pow(2.0 / pi, -a) * one_d * one_d;
    CHECK(ground_state_negative_integral(*g, m, p) == doctest::Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("velocity log bound") {
  const GeometryPtr g = build_square_geometry(256);
  const InequalityReport zero = verify_velocity_log_bound(SpectralField(g));
  CHECK(zero.pass);
  const InequalityReport flat = verify_velocity_log_bound(truncated_constant(g));
  CHECK(flat.pass);
  REQUIRE(flat.regression);
  CHECK(flat.regression->slope > 0.0);
  CHECK(flat.regression->r_squared >= 0.9);
  VelocityLogCheck vanishing;
  vanishing.trace = BoundaryTrace::kVanishing;
  const InequalityReport ground = verify_velocity_log_bound(SpectralField::mode(g, 1, 1), vanishing);
  CHECK(ground.pass);
  CHECK(std::isfinite(constant(ground, "u_sup")));
  CHECK(std::abs(constant(ground, "B")) <= 0.1 * constant(flat, "B"));
}

TEST_CASE("conditional velocity bound") {
  const GeometryPtr g = build_square_geometry(64);
  const SpectralField w = SpectralField::mode(g, 1, 1);
  CHECK(riesz_velocity(2.0 * w).max_speed() == doctest::Approx(2.0 * riesz_velocity(w).max_speed()).epsilon(1e-14));
  std::vector<SpectralField> family;
  for (int k = 0; k < 5; ++k) family.push_back(w + SpectralField::mode(g, 3 + k, 2, 0.05 * (k + 1)));
  const InequalityReport r = verify_velocity_conditional_bound(family, 4.0);
  CHECK(r.pass);
  CHECK(std::isfinite(constant(r, "C")));
  CHECK_THROWS_AS(verify_velocity_conditional_bound(family, 2.0), ConfigurationError);
}

TEST_CASE("short-time smallness") {
  const GeometryPtr g = build_square_geometry(64);
  const SpectralField w = SpectralField::mode(g, 1, 1);
  const double u = riesz_velocity(w).max_speed();
  const double tau = short_time_threshold(w, 0.1 * u);
  CHECK(tau > 0.0);
  CHECK(std::isfinite(tau));
  CHECK(short_time_threshold(w, 0.05 * u) <= tau);
  CHECK(std::isinf(short_time_threshold(w, 1.01 * u)));
  const InequalityReport r = verify_short_time_smallness({w}, 1.01 * u);
  CHECK(r.pass);
  CHECK(!r.notes.empty());
}

TEST_CASE("finite-difference velocity bound") {
  const GeometryPtr g = build_square_geometry(128);
  const SpectralField w = SpectralField::mode(g, 1, 1);
  FiniteDifferenceCheck check;
  check.center = g->point(64, 64);
  check.scale = (pi / 2) / 4;
  check.steps = {Displacement{1, 0}, Displacement{2, 0}};
  const InequalityReport r = verify_finite_difference_velocity(w, check);
  CHECK(r.pass);
  CHECK(std::isfinite(constant(r, "kappa")));
  check.steps = {Displacement{0, 0}};
  CHECK(verify_finite_difference_velocity(w, check).pass);
}

TEST_CASE("normal velocity rate") {
  const GeometryPtr g = build_square_geometry(256);
  const InequalityReport zero = verify_normal_velocity_rate(SpectralField(g));
  CHECK(zero.pass);
  const InequalityReport r = verify_normal_velocity_rate(SpectralField::mode(g, 1, 1));
  CHECK(r.pass);
  REQUIRE(r.regression);
  CHECK(r.regression->slope >= 0.8 - 0.15);
  CHECK(verify_normal_velocity_rate(SpectralField::mode(g, 1, 1) + SpectralField::mode(g, 2, 1, 0.2)).pass);
}

TEST_CASE("commutator scaling is linear in theta") {
  // d = 0.25 needs dx <= d/32
  const GeometryPtr g = build_square_geometry(512);
  CommutatorCheck check;
  check.distances = {0.5, 0.25};
  const SpectralField w = SpectralField::mode(g, 1, 1);
  const InequalityReport a = verify_commutator_scaling(w, check), b = verify_commutator_scaling(2.0 * w, check);
  CHECK(constant(b, "norm[d=0.5]") == doctest::Approx(2.0 * constant(a, "norm[d=0.5]")).epsilon(1e-12));
  CHECK(constant(b, "Gamma0") == doctest::Approx(constant(a, "Gamma0")).epsilon(1e-12));
  CHECK(std::isfinite(constant(a, "Gamma0")));
}

TEST_CASE("kernel bounds on a small sample") {
  const GeometryPtr g = build_square_geometry(32);
  KernelSamplePlan plan;
  plan.samples = 120;
  const InequalityReport r = verify_kernel_bounds(g, plan), again = verify_kernel_bounds(g, plan);
  CHECK(r.pass);
  CHECK(constant(r, "c") > 0.0);
  CHECK(constant(r, "K") >= 1.0);
  CHECK(constant(r, "K") <= 16.0);
  CHECK(constant(r, "grad_symmetry_error") <= 1e-10);
  CHECK(r.fitted_constants == again.fitted_constants);
}

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dsqg/inequalities.hpp"
#include "dsqg/run.hpp"
#include "dsqg/solver.hpp"

using namespace dsqg;
using std::numbers::pi;

namespace {

SolverConfig config(double t_end, double dt, double interval) {
  SolverConfig c;
  c.t_end = t_end;
  c.dt = dt;
  c.output_interval = interval;
  return c;
}

DiagnosticsParams sup_only() {
  DiagnosticsParams p;
  p.alphas.clear();
  p.ps.clear();
  p.ms.clear();
  return p;
}

double coefficient_distance(const SpectralField& a, const SpectralField& b) {
  double e = 0.0;
  for (std::size_t k = 0; k < a.coefficients().size(); ++k)
    e = std::max(e, std::abs(a.coefficients()[k] - b.coefficients()[k]));
  return e;
}

double grad_l2(const SpectralField& f) {
  double s = 0.0;
  const int n = f.geometry().modes();
  for (int m = 1; m <= n; ++m)
    for (int k = 1; k <= n; ++k) s += f.geometry().eigenvalue(m, k) * f.at(m, k) * f.at(m, k);
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("solver: zero stays zero") {
  const GeometryPtr g = build_square_geometry(32);
  const RunResult r = run(Solver(config(0.5, 0.01, 0.25)), SpectralField(g), sup_only());
  for (const SolverState& s : r.snapshots) CHECK(s.theta.l2_norm() == 0.0);
}

TEST_CASE("solver: pure dissipation is exact when the drift vanishes") {
  const GeometryPtr g = build_square_geometry(32);
  SolverConfig c = config(1.0, 0.01, 0.5);
  c.mode = DriftMode::kPrescribed;
  c.drift_stream = SpectralField(g);
  const Solver solver(c);
  for (auto [m, n] : {std::pair{1, 1}, std::pair{3, 2}, std::pair{7, 5}}) {
    const SolverState s0 = solver.initial_state(SpectralField::mode(g, m, n));
    const SolverState s1 = solver.step(s0, 0.01);
    const SpectralField expect = SpectralField::mode(g, m, n, std::exp(-0.01 * std::sqrt(m * m + n * n)));
    CHECK(coefficient_distance(s1.theta, expect) < 1e-10);
  }
}

TEST_CASE("solver: a single SQG mode decays without advection") {
  const GeometryPtr g = build_square_geometry(64);
  const RunResult r = run(Solver(config(1.0, 0.01, 0.5)), SpectralField::mode(g, 1, 1), sup_only());
  for (const SolverState& s : r.snapshots) {
    const SpectralField expect = SpectralField::mode(g, 1, 1, std::exp(-std::numbers::sqrt2 * s.t));
    CHECK(coefficient_distance(s.theta, expect) < 1e-8);
  }
}

TEST_CASE("advection term is skew-symmetric") {
  const GeometryPtr g = build_square_geometry(32);
  const std::vector<SpectralField> family = random_family(g, 4, 8, 11);
  for (const SpectralField& theta : family) {
    const SpectralField psi = apply_lambda_power(theta, -1.0);
    const SpectralField adv = advection_term(theta, psi, 1, 48);
    double dot = 0.0;
    for (std::size_t k = 0; k < adv.coefficients().size(); ++k) dot += adv.coefficients()[k] * theta.coefficients()[k];
    const double scale = velocity_from_stream(psi).max_speed() * theta.l2_norm() * grad_l2(theta);
    CHECK(std::abs(dot) <= 1e-10 * scale);
  }
}

TEST_CASE("solver: sup norm monitor and energy ledger") {
  const GeometryPtr g = build_square_geometry(64);
  const SpectralField theta0 = SpectralField::mode(g, 1, 1) + SpectralField::mode(g, 2, 1, 0.5);
  const RunResult r = run(Solver(config(1.0, 0.005, 0.1)), theta0, sup_only());
  const double sup0 = r.records.front().sup_norm;
  for (std::size_t k = 1; k < r.records.size(); ++k)
    CHECK(r.records[k].sup_norm <= r.records[k - 1].sup_norm + 0.01 * sup0);
  CHECK(!r.overshoot_flag);
  CHECK(std::abs(r.ledger_residual) <= 1e-6);
}

TEST_CASE("solver: second order under dt halving") {
  const GeometryPtr g = build_square_geometry(32);
  const SpectralField theta0 = SpectralField::mode(g, 1, 1) + SpectralField::mode(g, 2, 1, 0.5);
  std::vector<SpectralField> finals;
  for (double dt : {0.02, 0.01, 0.005}) {
    SolverConfig c = config(0.4, dt, 0.4);
    c.max_halvings = 0;
    finals.push_back(run(Solver(c), theta0, sup_only()).snapshots.back().theta);
  }
  const double e1 = (finals[0] - finals[1]).l2_norm(), e2 = (finals[1] - finals[2]).l2_norm();
  CHECK(std::log2(e1 / e2) >= 1.8);
}

TEST_CASE("solver: CFL violation is rejected by step and halved by advance") {
  const GeometryPtr g = build_square_geometry(32);
  SolverConfig c = config(1.0, 1.0, 0.5);
  const Solver solver(c);
  const SolverState s0 = solver.initial_state(SpectralField::mode(g, 1, 1, 50.0) + SpectralField::mode(g, 2, 1, 50.0));
  const double limit = solver.cfl_limit(s0);
  CHECK(limit < 1.0);
  CHECK_THROWS_AS(solver.step(s0, 2.0 * limit), PreconditionError);
  const SolverState s1 = solver.advance(s0);
  CHECK(s1.rejected_steps > 0);
  CHECK(s1.t <= limit);
}

TEST_CASE("solver: drift-mode run stays inside the decay envelope") {
  const GeometryPtr g = build_square_geometry(64);
  SolverConfig c = config(1.0, 0.005, 0.1);
  c.mode = DriftMode::kPrescribed;
  c.drift_stream = SpectralField::mode(g, 2, 1, 0.5);
  const SpectralField theta0 = SpectralField::mode(g, 1, 1) + SpectralField::mode(g, 1, 2, 0.3);
  const RunResult r = run(Solver(c), theta0, sup_only());

  EnvelopeCheck check;
  const GridField v0 = inverse(theta0);
  for (std::size_t i = 0; i < v0.values().size(); ++i)
    check.bound_b = std::max(i == 0 ? 0.0 : check.bound_b, std::abs(v0.values()[i]) / g->ground_state()[i]);
  const double gamma = drift_gamma(*c.drift_stream);
  CHECK(gamma > 0.0);
  CHECK(std::isfinite(gamma));
  check.gamma = GammaSchedule::constant(gamma);
  check.drift_stream = c.drift_stream;
  const InequalityReport rep = verify_decay_envelope(r.snapshots, check);
  CHECK(rep.pass);
}

#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dsqg/cutoff.hpp"
#include "dsqg/diagnostics.hpp"
#include "dsqg/numerics.hpp"
#include "dsqg/operators.hpp"
#include "dsqg/solver.hpp"

namespace dsqg {

/// One slack value of an asserted inequality. Negative means violated.
struct MarginSample {
  std::string label;
  double value = 0.0;
};

/// Outcome of one numerical check.
///
/// Constants are fitted minima (or maxima) over the samples, not certified bounds. Every
/// condition a check asserts is stored as a margin, so pass = (min_margin >= -tolerance).
struct InequalityReport {
  std::string name;
  int samples = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  std::map<std::string, double> fitted_constants;
  std::optional<Regression> regression;
  bool pass = false;
  double tolerance = 0.0;
  std::string sample_plan;
  std::uint64_t seed = 0;
  std::vector<MarginSample> margins;
  std::vector<std::string> notes;

  void add_margin(std::string label, double value);
  /// Sets min_margin and pass from the recorded margins. A report without margins passes.
  void finalize();
};

/// Nodes away from the corners with d(x) >= min_cells grid steps.
std::vector<std::uint8_t> interior_nodes(const Geometry& geometry, double min_cells = 4.0);

/// Seeded family of `count` fields with coefficients uniform in [-1, 1) on modes m, n <= max_mode.
std::vector<SpectralField> random_family(const GeometryPtr& geometry, int count, int max_mode,
                                         std::uint64_t seed);

/// L^2 projection of the constant 1: a_{m,n} = 8L/(pi^2 m n) for odd m and n.
SpectralField truncated_constant(const GeometryPtr& geometry);

/// Phi'(f) Lambda f - Lambda(Phi(f)) >= (c/d)(f Phi'(f) - Phi(f)) for s = 1 on nodes with
/// d >= 4 grid steps away from the corners. Reports c as the infimum of the ratio, and for
/// Phi = z^2/2 also gamma1 = c/2 (the constant in d D(f)/f^2 >= gamma1).
InequalityReport verify_cordoba(const GeometryPtr& geometry, const std::vector<SpectralField>& family,
                                const ConvexFunction& phi);

/// Sign of the defect in the weighted convexity identity for every (theta, Phi) pair, plus the
/// reversed sign for the reflected (concave) Phi. Margins are defect / scale with
/// scale = max|lhs| + max|rhs_core|.
InequalityReport verify_weighted_identity(const std::vector<SpectralField>& thetas, const SpectralField& w,
                                          const std::vector<ConvexFunction>& phis);

/// Pointwise values of (Lambda 1) at the interior nodes, computed once per symmetry orbit.
std::vector<double> lambda_of_unity_grid(const Geometry& geometry, double tol = 1e-10);

/// (Lambda 1)(x) >= c0 / w1(x) on unmasked nodes with fitted c0 = min (Lambda 1) w1, together
/// with the square-symmetry check, the decay of the margin (Lambda 1) - c0/w1 from the wall to
/// the center along the centerline, and the change of c0 under N -> 2N (limit `refinement_limit`).
InequalityReport verify_lambda_one_lower(const GeometryPtr& geometry, double refinement_limit = 0.05);

/// (integral_0^t gamma, gamma(t)) for a drift with constant gamma.
struct GammaSchedule {
  std::function<double(double)> rate;
  std::function<double(double)> integral;

  static GammaSchedule constant(double gamma);
};

/// sup over nodes of -(v . grad w1) / w1 for v = J grad(stream).
double drift_gamma(const SpectralField& stream, int rotation_sign = 1);

/// Largest nodal difference between two runs with the same output times.
double snapshot_difference(const std::vector<SolverState>& a, const std::vector<SolverState>& b);

struct EnvelopeCheck {
  double bound_b = 1.0;
  GammaSchedule gamma = GammaSchedule::constant(0.0);
  /// Drift stream, when the run had one; used for the hypothesis check.
  std::optional<SpectralField> drift_stream;
  int rotation_sign = 1;
  /// Discretization slack added to the fixed 1e-6 tolerance.
  double slack = 0.0;
};

/// |theta(x,t)| <= B w1(x) exp(-t sqrt(lambda1) + int_0^t gamma) at every node and snapshot.
/// Throws PreconditionError when |theta_0| > B w1 somewhere or v . grad w1 + gamma w1 < -tol.
/// Reports envelope_gap = max |B w1 e^{...} - |theta||.
InequalityReport verify_decay_envelope(const std::vector<SolverState>& snapshots, const EnvelopeCheck& check);

struct WeightedLpCheck {
  int m = 2;
  /// Regular part of the drift: gamma_r is computed from it.
  std::optional<SpectralField> regular_stream;
  /// Small part of the drift: must satisfy the smallness threshold.
  std::optional<SpectralField> small_stream;
  int rotation_sign = 1;
  /// c0 of the (Lambda 1) lower bound.
  double lambda_one_constant = 0.0;
  double slack = 0.05;
};

/// int w1 b1^{2m}(t) <= (1 + slack) e^{(2m-1)(-t sqrt(lambda1) + t gamma_r)} int w1 b1^{2m}(0).
/// Throws PreconditionError if sup|v_s| exceeds c0 / ((2m-1) sup|grad w1|).
InequalityReport verify_weighted_lp_control(const std::vector<SolverState>& snapshots, const WeightedLpCheck& check);

/// A_{m,p} = integral w1^{-p/(2m-p)}, by tanh-sinh quadrature of the separable factor.
double ground_state_negative_integral(const Geometry& geometry, int m, double p);

/// ||b||_p <= C_{m,p} (int w1 b^{2m})^{1/2m} when m > p >= 1, and
/// (int w1 b1^{2m})^{1/2m} <= ||theta||_inf^{1/2m} ||b1||_p^{(2m-1)/(2m)} |Omega|^{(p+1-2m)/(2mp)}
/// when p >= 2m-1. Whichever applies is checked; throws ConfigurationError if neither does.
InequalityReport verify_weight_norm_bridge(const SpectralField& theta, int m, double p,
                                           double tolerance = 1e-6);

enum class BoundaryTrace { kNonvanishing, kVanishing };

struct VelocityLogCheck {
  BoundaryTrace trace = BoundaryTrace::kNonvanishing;
  double min_r_squared = 0.9;
  /// Shells start at l0 (0 selects L/4) and stop at min_cells grid steps.
  double l0 = 0.0;
  double min_cells = 4.0;
};

/// Shell maxima of |u| along the centerline y = L/2 approaching x = 0, regressed against
/// log(1/d). The slope is B and the intercept A of |u| ~ A + B log(1/d). Also reports the
/// quadrature of e^{gamma |u|} for gamma = 1/(2 max(B, ||theta||_inf)).
InequalityReport verify_velocity_log_bound(const SpectralField& theta, const VelocityLogCheck& check = {});

/// ||u||_inf <= C (M + ||theta||_inf (1 + max(0, log ||b1||_p))) with one C for the family;
/// asserts the per-field constants agree within +-50% of their midrange.
InequalityReport verify_velocity_conditional_bound(const std::vector<SpectralField>& family, double p);

/// Largest tau with ||short_time_velocity(theta, tau)||_inf <= c_r, found by bisection in log tau.
/// Returns +infinity when the full velocity already satisfies the bound.
double short_time_threshold(const SpectralField& theta, double c_r);

InequalityReport verify_short_time_smallness(const std::vector<SpectralField>& family, double c_r);

struct FiniteDifferenceCheck {
  Point center;
  double scale = 0.0;
  double p = std::numeric_limits<double>::infinity();
  std::vector<double> epsilons{0.1, 0.05, 0.025};
  std::vector<Displacement> steps;
};

/// |phi delta_h u| <= sqrt(eps d D(chi delta_h theta)) + C_eps |h| d^{-2/p} ||b1||_p
///                    + delta(eps) phi |delta_h theta| on the support of phi.
/// C_eps = kappa / eps with kappa half of what covers every sample at the largest eps alone, raised
/// if needed so that nodes where delta_h theta vanishes are covered at every eps; delta(eps) is the
/// smallest value making all samples hold. Asserts delta is nonincreasing as eps decreases.
InequalityReport verify_finite_difference_velocity(const SpectralField& theta, const FiniteDifferenceCheck& check);

struct NormalVelocityCheck {
  double p = std::numeric_limits<double>::infinity();
  double alpha = 0.8;
  double slope_slack = 0.15;
  double l0 = 0.0;  // 0 selects L/8
  double min_cells = 2.0;
  std::optional<double> smoothing_time;
};

/// Shell slope of log sup|u . N| against log d is at least min(1 - 2/p, alpha) - slack, and the
/// fitted C of the pointwise bound is finite.
InequalityReport verify_normal_velocity_rate(const SpectralField& theta, const NormalVelocityCheck& check = {});

struct CommutatorCheck {
  double p = std::numeric_limits<double>::infinity();
  /// Distances of the centers (d, L/2) from the boundary.
  std::vector<double> distances{0.5, 0.25, 0.125, 0.0625};
  double slope_slack = 0.3;
  double min_r_squared = 0.85;
};

/// Regression of log(||C_h||_inf / |h|) against log d(x0) with l = d/2 and
/// h = max(1, floor(d / (32 dx))) dx along +x. Asserts -(1 + 2/p) - slack <= slope <= 0.
InequalityReport verify_commutator_scaling(const SpectralField& theta, const CommutatorCheck& check = {});

struct KernelSamplePlan {
  int samples = 500;
  double t_min = 1e-3;
  double t_max = 0.5;
  std::uint64_t seed = 7;
  /// Samples with H below this are excluded from the Gaussian fits.
  double floor = 1e-9;
};

/// Fits the constants of the Gaussian two-sided bound, the gradient and Hessian bounds and the
/// cancellation bound over a Latin-hypercube sample of (log t, x, y).
InequalityReport verify_kernel_bounds(const GeometryPtr& geometry, const KernelSamplePlan& plan = {});

}  // namespace dsqg

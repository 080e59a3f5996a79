#include "dsqg/suite.hpp"

#include <algorithm>
#include <cmath>

#include "dsqg/errors.hpp"
#include "dsqg/run.hpp"

namespace dsqg {
namespace {

std::vector<SolverState> snapshots_of(const RunConfig& config, const GeometryPtr& geo) {
  Solver solver(make_solver_config(config, geo));
  DiagnosticsParams params;
  params.alphas.clear();
  params.ps.clear();
  params.ms.clear();
  return run(solver, make_initial(geo, config.initial), params).snapshots;
}

double envelope_constant(const SpectralField& theta) {
  const GridField v = inverse(theta);
  const auto& w = theta.geometry().ground_state();
  double b = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) b = std::max(b, std::abs(v.values()[i]) / w[i]);
  return b;
}

}  // namespace

int resolution_floor(const std::string& name) {
  // shells and refinement checks that cannot run on a coarse grid
  if (name == "commutator_scaling") return 2048;
  if (name == "velocity_log_bound" || name == "normal_velocity_rate") return 256;
  if (name == "lambda_one_lower" || name == "finite_difference_velocity") return 128;
  return 0;
}

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names{
      "cordoba",           "weighted_identity",          "lambda_one_lower",     "decay_envelope",
      "weighted_lp_control", "weight_norm_bridge",       "velocity_log_bound",   "velocity_conditional_bound",
      "short_time_smallness", "finite_difference_velocity", "normal_velocity_rate", "commutator_scaling",
      "kernel_bounds"};
  return names;
}

ConvexFunction named_phi(const std::string& name) {
  const std::string prefix = "reflected_";
  if (name.rfind(prefix, 0) == 0) return named_phi(name.substr(prefix.size())).reflected();
  if (name == "square") return ConvexFunction::square();
  if (name == "half_square") return ConvexFunction::half_square();
  if (name == "linear") return ConvexFunction::linear();
  if (name == "smoothed_hinge") return ConvexFunction::smoothed_hinge(0.5, 0.05);
  throw ConfigurationError("unknown phi '" + name + "'");
}

InequalityReport run_named_check(const std::string& name, const RunConfig& configured) {
  RunConfig config = configured;
  const int floor = resolution_floor(name);
  const bool refined = config.geometry.n < floor;
  if (refined) config.geometry.n = floor;
  const GeometryPtr geo = make_geometry(config);
  const VerifySettings& v = config.verify;
  auto family = [&] { return random_family(geo, v.family_size, v.max_mode, v.seed); };
  InequalityReport report;

  if (name == "cordoba") {
    report = verify_cordoba(geo, family(), named_phi(v.phi));
  } else if (name == "weighted_identity") {
    report = verify_weighted_identity(family(), SpectralField::mode(geo, 1, 1), {named_phi(v.phi)});
  } else if (name == "lambda_one_lower") {
    report = verify_lambda_one_lower(geo);
  } else if (name == "decay_envelope") {
    const auto snaps = snapshots_of(config, geo);
    EnvelopeCheck check;
    check.bound_b = envelope_constant(snaps.front().theta);
    check.rotation_sign = config.solver.rotation_sign;
    if (auto drift = make_drift(geo, config.drift)) {
      check.gamma = GammaSchedule::constant(drift_gamma(*drift, config.solver.rotation_sign));
      check.drift_stream = std::move(drift);
    }
    report = verify_decay_envelope(snaps, check);
  } else if (name == "weighted_lp_control") {
    WeightedLpCheck check;
    check.rotation_sign = config.solver.rotation_sign;
    check.regular_stream = make_drift(geo, config.drift);
    report = verify_weighted_lp_control(snapshots_of(config, geo), check);
  } else if (name == "weight_norm_bridge") {
    report = verify_weight_norm_bridge(make_initial(geo, config.initial), 2, v.p);
  } else if (name == "velocity_log_bound") {
    report = verify_velocity_log_bound(truncated_constant(geo));
  } else if (name == "velocity_conditional_bound") {
    report = verify_velocity_conditional_bound(family(), v.p);
  } else if (name == "short_time_smallness") {
    report = verify_short_time_smallness(family(), 0.1);
  } else if (name == "finite_difference_velocity") {
    const double side = geo->side_length();
    FiniteDifferenceCheck check;
    check.center = {side / 2.0, side / 2.0};
    check.scale = side / 8.0;
    check.p = v.p;
    check.steps = {{1, 0}, {0, 1}, {1, 1}, {2, -1}};
    report = verify_finite_difference_velocity(make_initial(geo, config.initial), check);
  } else if (name == "normal_velocity_rate") {
    NormalVelocityCheck check;
    check.p = v.p;
    report = verify_normal_velocity_rate(make_initial(geo, config.initial), check);
  } else if (name == "commutator_scaling") {
    CommutatorCheck check;
    check.p = v.p;
    report = verify_commutator_scaling(make_initial(geo, config.initial), check);
  } else if (name == "kernel_bounds") {
    KernelSamplePlan plan;
    plan.samples = v.kernel_samples;
    plan.seed = v.seed;
    report = verify_kernel_bounds(geo, plan);
  } else {
    throw ConfigurationError("unknown check '" + name + "'");
  }
  if (refined)
    report.notes.push_back("run at N=" + std::to_string(floor) + " (configured N=" +
                           std::to_string(configured.geometry.n) + ")");
  if (report.seed == 0) report.seed = v.seed;
  return report;
}

}  // namespace dsqg

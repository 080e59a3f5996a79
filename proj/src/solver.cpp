#include "dsqg/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace dsqg {

void SolverConfig::validate() const {
  std::vector<std::string> errors;
  if (!(dt > 0.0)) errors.push_back("dt must be positive");
  if (!(cfl > 0.0)) errors.push_back("cfl must be positive");
  if (!(t_end >= 0.0)) errors.push_back("t_end must be >= 0");
  if (!(dealias >= 1.5)) errors.push_back("dealias factor must be >= 1.5");
  if (!(dissipation_power > 0.0 && dissipation_power <= 2.0)) errors.push_back("dissipation power must lie in (0, 2]");
  if (rotation_sign != 1 && rotation_sign != -1) errors.push_back("rotation sign must be +1 or -1");
  if (mode == DriftMode::kPrescribed && !drift_stream) errors.push_back("prescribed drift needs a stream function");
  if (!(output_interval > 0.0)) errors.push_back("output interval must be positive");
  if (!(overshoot_tolerance >= 0.0)) errors.push_back("overshoot tolerance must be >= 0");
  if (max_halvings < 0) errors.push_back("max_halvings must be >= 0");
  if (errors.empty()) return;
  std::string msg = "invalid solver configuration:";
  for (const auto& e : errors) msg += "\n  " + e;
  throw ConfigurationError(msg);
}

double EnergyLedger::residual(double energy) const {
  const double r = energy - initial_energy + dissipated;
  return initial_energy > 0.0 ? r / initial_energy : std::abs(r);
}

SpectralField advection_term(const SpectralField& theta, const SpectralField& psi, int rotation_sign,
                             int cells) {
  require_same_geometry(theta.geometry(), psi.geometry());
  const double sign = rotation_sign;
  const std::vector<double> psi_x = sample_derivative(psi, cells, 1, 0);
  const std::vector<double> psi_y = sample_derivative(psi, cells, 0, 1);
  const std::vector<double> theta_x = sample_derivative(theta, cells, 1, 0);
  const std::vector<double> theta_y = sample_derivative(theta, cells, 0, 1);
  std::vector<double> values(psi_x.size());
  // u = sign * (-psi_y, psi_x)
  for (std::size_t i = 0; i < values.size(); ++i)
    values[i] = -sign * (psi_x[i] * theta_y[i] - psi_y[i] * theta_x[i]);
  return project_samples(theta.geometry_ptr(), values, cells, "advection");
}

Solver::Solver(SolverConfig config) : config_(std::move(config)) { config_.validate(); }

SpectralField Solver::stream(const SpectralField& theta) const {
  if (config_.mode == DriftMode::kPrescribed) {
    require_same_geometry(theta.geometry(), config_.drift_stream->geometry());
    return *config_.drift_stream;
  }
  return apply_lambda_power(theta, -1.0);
}

SpectralField Solver::nonlinear(const SpectralField& theta) const {
  const int cells = static_cast<int>(std::ceil(config_.dealias * theta.geometry().grid_size()));
  return advection_term(theta, stream(theta), config_.rotation_sign, cells);
}

SpectralField Solver::decay(const SpectralField& f, double dt) const {
  const Geometry& g = f.geometry();
  const double half = 0.5 * config_.dissipation_power;
  SpectralField out(f.geometry_ptr(), f.tag());
  const int k = g.modes();
  for (int m = 1; m <= k; ++m)
    for (int n = 1; n <= k; ++n)
      out.at(m, n) = std::exp(-dt * std::pow(g.eigenvalue(m, n), half)) * f.at(m, n);
  return out;
}

double Solver::rate(const SpectralField& theta) const {
  const Geometry& g = theta.geometry();
  const double half = 0.5 * config_.dissipation_power;
  double s = 0.0;
  const int k = g.modes();
  for (int m = 1; m <= k; ++m)
    for (int n = 1; n <= k; ++n) s += std::pow(g.eigenvalue(m, n), half) * theta.at(m, n) * theta.at(m, n);
  return s;
}

double Solver::rate_derivative(const SpectralField& theta, const SpectralField& nl) const {
  const Geometry& g = theta.geometry();
  const double half = 0.5 * config_.dissipation_power;
  double s = 0.0;
  const int k = g.modes();
  for (int m = 1; m <= k; ++m)
    for (int n = 1; n <= k; ++n) {
      const double mult = std::pow(g.eigenvalue(m, n), half);
      s += mult * theta.at(m, n) * (-mult * theta.at(m, n) + nl.at(m, n));
    }
  return 2.0 * s;
}

SolverState Solver::initial_state(SpectralField theta0) const {
  for (double a : theta0.coefficients())
    if (!std::isfinite(a)) throw NumericError("initial data has non-finite coefficients");
  SolverState s{0.0, std::move(theta0), 0, config_.dt, {}, 0.0, std::nullopt, std::nullopt};
  s.theta.set_tag("theta");
  s.ledger.initial_energy = 0.5 * s.theta.l2_norm() * s.theta.l2_norm();
  s.initial_sup = inverse(s.theta).max_abs();
  return s;
}

double Solver::cfl_limit(const SolverState& state) const {
  const SpectralField psi = stream(state.theta);
  const int n = psi.geometry().grid_size();
  const std::vector<double> px = sample_derivative(psi, n, 1, 0);
  const std::vector<double> py = sample_derivative(psi, n, 0, 1);
  double umax = 0.0;
  for (std::size_t i = 0; i < px.size(); ++i) umax = std::max(umax, std::hypot(px[i], py[i]));
  if (umax == 0.0) return std::numeric_limits<double>::infinity();
  return config_.cfl * psi.geometry().spacing() / umax;
}

SolverState Solver::step(const SolverState& state, double dt) const {
  if (!(dt > 0.0)) throw PreconditionError("step size must be positive");
  const double limit = cfl_limit(state);
  if (dt > limit) {
    std::ostringstream msg;
    msg << "dt = " << dt << " violates the CFL bound " << limit;
    throw PreconditionError(msg.str());
  }
  const SpectralField k1 = state.nonlinear ? *state.nonlinear : nonlinear(state.theta);

  SpectralField predictor = state.theta;
  predictor += dt * k1;
  predictor = decay(predictor, dt);
  const SpectralField k2 = nonlinear(predictor);

  SpectralField half_step = state.theta;
  half_step += (0.5 * dt) * k1;
  SpectralField next = decay(half_step, dt);
  next += (0.5 * dt) * k2;
  next.set_tag("theta");

  for (double a : next.coefficients()) {
    if (!std::isfinite(a)) {
      std::ostringstream msg;
      msg << "non-finite coefficients after step " << state.step + 1 << " at t = " << state.t + dt
          << " with dt = " << dt << "; last finite state has |theta|_2 = " << state.theta.l2_norm();
      throw SolverBlowup(msg.str(), state);
    }
  }

  SolverState out{state.t + dt, std::move(next), state.step + 1, state.dt, state.ledger,
                  state.initial_sup, std::nullopt, std::nullopt, state.rejected_steps};
  out.nonlinear = nonlinear(out.theta);
  // trapezoid with the endpoint-derivative correction, exact for cubics in t
  const double f0 = rate(state.theta), f1 = rate(out.theta);
  const double d0 = rate_derivative(state.theta, k1), d1 = rate_derivative(out.theta, *out.nonlinear);
  out.ledger.dissipated += 0.5 * dt * (f0 + f1) + dt * dt / 12.0 * (d0 - d1);
  return out;
}

SolverState Solver::advance(const SolverState& state) const {
  double dt = state.dt;
  for (int halving = 0; halving <= config_.max_halvings; ++halving) {
    try {
      SolverState next = step(state, dt);
      next.dt = dt;
      next.rejected_steps = state.rejected_steps + halving;
      return next;
    } catch (const PreconditionError&) {
      dt *= 0.5;
    }
  }
  std::ostringstream msg;
  msg << "CFL bound not met after " << config_.max_halvings << " halvings at t = " << state.t;
  throw NumericError(msg.str());
}

}  // namespace dsqg

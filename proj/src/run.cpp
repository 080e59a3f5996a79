#include "dsqg/run.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dsqg {

RunResult run(const Solver& solver, SpectralField theta0, const DiagnosticsParams& params,
              const RunObserver& observer) {
  const SolverConfig& cfg = solver.config();
  RunResult result;
  SolverState state = solver.initial_state(std::move(theta0));

  auto emit = [&](SolverState& s) {
    if (cfg.mode == DriftMode::kPrescribed) s.velocity = velocity_from_stream(*cfg.drift_stream, cfg.rotation_sign);
    DiagnosticsRecord rec = record(s, params, cfg.rotation_sign);
    s.velocity.reset();
    if (observer) observer(s, rec);
    result.records.push_back(std::move(rec));
    SolverState snapshot = s;
    snapshot.nonlinear.reset();
    result.snapshots.push_back(std::move(snapshot));
  };
  emit(state);

  const long outputs = std::max(1L, static_cast<long>(std::ceil(cfg.t_end / cfg.output_interval - 1e-9)));
  const double time_eps = 1e-12 * std::max(1.0, cfg.t_end);
  for (long k = 1; k <= outputs; ++k) {
    const double target = std::min(cfg.t_end, k * cfg.output_interval);
    while (state.t < target - time_eps) {
      const double nominal = state.dt;
      state.dt = std::min(nominal, target - state.t);
      state = solver.advance(state);
      // a step shortened to land on an output time does not shrink the nominal step
      if (state.rejected_steps == result.rejected_steps) state.dt = nominal;
      result.rejected_steps = state.rejected_steps;

      if (state.initial_sup > 0.0) {
        const double overshoot = inverse(state.theta).max_abs() / state.initial_sup - 1.0;
        result.max_overshoot = std::max(result.max_overshoot, overshoot);
        if (overshoot > cfg.overshoot_tolerance && !result.overshoot_flag) {
          result.overshoot_flag = true;
          std::ostringstream msg;
          msg << "maximum principle overshoot " << overshoot << " exceeds " << cfg.overshoot_tolerance
              << " at t = " << state.t;
          result.warnings.push_back(msg.str());
        }
      }
    }
    state.t = std::abs(state.t - target) <= time_eps ? target : state.t;
    emit(state);
  }
  const double l2 = state.theta.l2_norm();
  result.ledger_residual = state.ledger.residual(0.5 * l2 * l2);
  return result;
}

}  // namespace dsqg

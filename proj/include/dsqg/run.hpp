#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dsqg/diagnostics.hpp"
#include "dsqg/solver.hpp"

namespace dsqg {

struct RunResult {
  std::vector<SolverState> snapshots;
  std::vector<DiagnosticsRecord> records;
  /// max over all steps of sup|theta(t)| / sup|theta_0| - 1.
  double max_overshoot = 0.0;
  bool overshoot_flag = false;
  double ledger_residual = 0.0;
  int rejected_steps = 0;
  std::vector<std::string> warnings;
};

using RunObserver = std::function<void(const SolverState&, const DiagnosticsRecord&)>;

/// Integrates to config.t_end, recording diagnostics at t = 0, every output_interval and at
/// t_end. The maximum-principle monitor only warns.
RunResult run(const Solver& solver, SpectralField theta0, const DiagnosticsParams& params,
              const RunObserver& observer = {});

}  // namespace dsqg

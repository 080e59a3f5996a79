#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dsqg/errors.hpp"
#include "dsqg/operators.hpp"

namespace dsqg {

enum class DriftMode { kSqg, kPrescribed };

struct SolverConfig {
  double dt = 0.0025;
  double cfl = 0.5;
  double t_end = 1.0;
  /// Padded grid has ceil(dealias * N) cells per axis; 1.5 removes all aliasing.
  double dealias = 1.5;
  /// s in the dissipation Lambda^s.
  double dissipation_power = 1.0;
  DriftMode mode = DriftMode::kSqg;
  int rotation_sign = 1;
  /// Stream function of the prescribed drift v = J grad psi_v (kPrescribed only).
  std::optional<SpectralField> drift_stream;
  /// Diagnostics are recorded every output_interval units of time (and at t_end).
  double output_interval = 0.1;
  /// Allowed relative growth of sup |theta| before the maximum-principle monitor warns.
  double overshoot_tolerance = 0.01;
  int max_halvings = 30;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Running energy balance 1/2 |theta|^2 + int_0^t |Lambda^{s/2} theta|^2.
struct EnergyLedger {
  double initial_energy = 0.0;
  double dissipated = 0.0;

  /// (E(t) - E(0) + dissipated) / E(0), or the absolute value when E(0) = 0.
  double residual(double energy) const;
};

struct SolverState {
  double t = 0.0;
  SpectralField theta;
  long step = 0;
  /// Step size the next step will attempt.
  double dt = 0.0;
  EnergyLedger ledger;
  double initial_sup = 0.0;
  /// Nonlinear term at theta, reused by the next step.
  std::optional<SpectralField> nonlinear;
  std::optional<VelocityField> velocity;
  /// Steps rejected by the CFL check so far.
  int rejected_steps = 0;
};

/// Thrown when a step produces non-finite coefficients; carries the last finite state.
class SolverBlowup : public NumericError {
 public:
  SolverBlowup(const std::string& what, SolverState last_good)
      : NumericError(what), last_good_(std::move(last_good)) {}
  const SolverState& last_good() const { return last_good_; }

 private:
  SolverState last_good_;
};

/// -P(u . grad theta) for u = J grad psi, evaluated on a padded grid with `cells` per axis.
SpectralField advection_term(const SpectralField& theta, const SpectralField& psi, int rotation_sign,
                             int cells);

class Solver {
 public:
  explicit Solver(SolverConfig config);

  const SolverConfig& config() const { return config_; }

  SolverState initial_state(SpectralField theta0) const;

  /// Stream function of the advecting field at theta.
  SpectralField stream(const SpectralField& theta) const;

  /// One integrating-factor Heun step of size dt. Throws PreconditionError if dt violates the
  /// CFL bound and SolverBlowup on non-finite output.
  SolverState step(const SolverState& state, double dt) const;

  /// Steps once with state.dt, halving it until the CFL bound holds.
  SolverState advance(const SolverState& state) const;

  /// Largest dt allowed by the CFL bound at this state.
  double cfl_limit(const SolverState& state) const;

 private:
  SpectralField nonlinear(const SpectralField& theta) const;
  SpectralField decay(const SpectralField& f, double dt) const;
  double rate(const SpectralField& theta) const;
  double rate_derivative(const SpectralField& theta, const SpectralField& nonlinear_term) const;

  SolverConfig config_;
  int padded_cells_ = 0;
};

}  // namespace dsqg

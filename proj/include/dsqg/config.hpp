#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dsqg/diagnostics.hpp"
#include "dsqg/solver.hpp"

namespace dsqg {

inline constexpr int kSchemaVersion = 1;

struct GeometrySettings {
  int n = 128;
  double side_length = std::numbers::pi;
  std::optional<double> corner_radius;
};

/// Initial data. kind is one of ground_state, perturbed, truncated_constant, mode, random.
struct InitialSettings {
  std::string kind = "perturbed";
  double amplitude = 1.0;
  /// Coefficient of w_{1,2} for kind = perturbed.
  double perturbation = 0.3;
  int m = 1;
  int n = 1;
  int max_mode = 4;
  std::uint64_t seed = 1;
};

/// Prescribed drift: kind none or stream21 (psi_v = amplitude w_{2,1}).
struct DriftSettings {
  std::string kind = "none";
  double amplitude = 0.5;
};

struct VerifySettings {
  std::vector<std::string> names;
  int family_size = 10;
  int max_mode = 6;
  std::uint64_t seed = 2024;
  int kernel_samples = 500;
  /// Phi for cordoba and weighted_identity: square, half_square, smoothed_hinge, linear, or a
  /// reflected_* variant (concave, rejected by the checks).
  std::string phi = "square";
  double p = 4.0;
};

struct RunConfig {
  int schema_version = kSchemaVersion;
  GeometrySettings geometry;
  SolverConfig solver;
  InitialSettings initial;
  DriftSettings drift;
  DiagnosticsParams diagnostics;
  double holder_alpha = 0.4;
  double holder_p = 4.0;
  /// Checkpoint every this many output times (0 disables all but the last).
  int checkpoint_every = 5;
  VerifySettings verify;
  std::string output_dir = "out";

  /// Canonical text form; hashed into checkpoints.
  std::string canonical() const;
};

/// Parses an INI file. Every violation is collected into one ConfigurationError. The
/// SQG_OUTPUT_DIR environment variable overrides [output] dir.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text);

/// Lists of every range violation; empty means valid.
std::vector<std::string> validate(const RunConfig& config);

GeometryPtr make_geometry(const RunConfig& config);
SpectralField make_initial(const GeometryPtr& geometry, const InitialSettings& settings);
std::optional<SpectralField> make_drift(const GeometryPtr& geometry, const DriftSettings& settings);
/// Solver settings with the drift stream and mode filled in.
SolverConfig make_solver_config(const RunConfig& config, const GeometryPtr& geometry);

}  // namespace dsqg

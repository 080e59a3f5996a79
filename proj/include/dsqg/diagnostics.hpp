#pragma once

#include <map>
#include <optional>
#include <vector>

#include "dsqg/numerics.hpp"
#include "dsqg/operators.hpp"
#include "dsqg/solver.hpp"

namespace dsqg {

/// Spatial dimension; enters every exponent d/p.
inline constexpr int kDimension = 2;

/// b_1 = theta / w_1 at the interior nodes.
GridField boundary_ratio(const SpectralField& theta);

/// b_1 on the closed grid (nodes 0..N per axis, row-major), with the boundary values taken as
/// the limits d theta / d w_1 along the inward normal (second mixed derivatives at corners).
std::vector<double> boundary_ratio_closed(const SpectralField& theta);

/// ||b_1||_{L^p} by the trapezoidal rule on the closed grid; p = +inf gives the max.
double b1_norm(const SpectralField& theta, double p);

/// (integral w_1 b_1^{2m})^{1/(2m)}.
double weighted_norm(const SpectralField& theta, int m);

/// M = max over nodes of d(x) |grad theta(x)|.
double interior_lipschitz(const SpectralField& theta);

struct HolderResult {
  double value = 0.0;
  /// Nodes with no admissible displacement (d(x)/32 below one grid step).
  int skipped = 0;
  long pairs = 0;
};

/// sup |delta_h theta(x)| / |h|^alpha over nodes x and dyadic multiples h of the grid step along
/// the axes and diagonals (both signs) with |h| <= d(x)/32 and |h| <= max_step when given.
HolderResult holder_seminorm(const SpectralField& theta, double alpha,
                             std::optional<double> max_step = std::nullopt);

/// Smoothed distance psi_T = e^{eps Delta} d with normal N = grad psi_T and tangent T = J grad psi_T.
struct TangentFrame {
  GridField tx, ty, nx, ny;
  double smoothing_time = 0.0;
  /// max |T . n| on the boundary.
  double boundary_leak = 0.0;
  double t_sup = 0.0;
  double grad_t_sup = 0.0;
};

/// sqrt(smoothing_time) defaults to a quarter of the corner radius.
TangentFrame tangent_frame(const GeometryPtr& geometry, std::optional<double> smoothing_time = std::nullopt);

/// Shell-wise maxima of a nonnegative quantity over unmasked nodes with d in [l0 2^{-k-1}, l0 2^{-k}).
struct ShellProfile {
  std::vector<double> distance;  // upper edge of each shell
  std::vector<double> value;     // max over the shell
  Regression fit;                // log value against log distance
};

/// Shells stop once the lower edge drops below min_distance; needs at least two nonempty shells.
ShellProfile shell_maxima(const Geometry& geometry, const std::vector<double>& quantity, double l0,
                          double min_distance);

/// |u . N| on the nodes.
std::vector<double> normal_velocity(const VelocityField& u, const TangentFrame& frame);

struct DiagnosticsParams {
  std::vector<double> alphas{0.4};
  std::vector<double> ps{2.0, 4.0};
  std::vector<int> ms{2};
  /// Fit the normal-velocity shell slope (costs a tangent frame per geometry).
  bool normal_rate = false;
  double normal_l0 = 0.0;  // 0 selects L/8
};

struct DiagnosticsRecord {
  double t = 0.0;
  double sup_norm = 0.0;
  double energy = 0.0;      // ||theta||^2
  double half_norm = 0.0;   // ||Lambda^{1/2} theta||^2
  double lipschitz = 0.0;   // M
  std::map<double, double> b1_lp;
  std::map<int, double> weighted_norm;
  std::map<double, double> holder;
  int holder_skipped = 0;
  double u_sup = 0.0;
  double normal_rate = 0.0;  // NaN when not requested
};

DiagnosticsRecord record(const SolverState& state, const DiagnosticsParams& params,
                         int rotation_sign = 1);

/// Persistence monitor: holder(t) <= 2 holder(0) + K B (M + 1), with K fitted on the records
/// with t <= fit_fraction * t_last, B = sup_t ||b_1||_{L^p} and M = sup_t M(t).
struct HolderMonitor {
  double alpha = 0.0;
  double p = 0.0;
  double bound_b = 0.0;
  double bound_m = 0.0;
  double initial = 0.0;
  double k_fit = 0.0;
  double worst_margin = 0.0;  // min over records of rhs - holder
  bool violated = false;
  int first_violation = -1;
};

HolderMonitor holder_monitor(const std::vector<DiagnosticsRecord>& records, double alpha, double p,
                             double fit_fraction = 0.1);

}  // namespace dsqg

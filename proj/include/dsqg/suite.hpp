#pragma once

#include <string>
#include <vector>

#include "dsqg/config.hpp"
#include "dsqg/inequalities.hpp"

namespace dsqg {

/// Names accepted by run_named_check, in their default order.
const std::vector<std::string>& check_names();

/// The Phi named in a config (square, half_square, smoothed_hinge, linear, reflected_*).
ConvexFunction named_phi(const std::string& name);

/// Smallest N a check can run at (0 for none). Shell regressions need several dyadic shells above
/// a few grid steps, and the Lambda 1 refinement settles from N = 128.
int resolution_floor(const std::string& name);

/// Runs one standard check on the geometry and seeds of the config, refined to the check's
/// resolution floor when the configured N is below it (recorded in the report notes).
InequalityReport run_named_check(const std::string& name, const RunConfig& config);

}  // namespace dsqg

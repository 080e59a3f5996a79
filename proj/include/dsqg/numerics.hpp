#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace dsqg {

struct Regression {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int samples = 0;
};

/// Ordinary least squares y = slope*x + intercept. Needs at least two distinct x.
Regression linear_fit(std::span<const double> x, std::span<const double> y);

/// Lines y = slope*x + intercept lying above (upper) or below (lower) every sample, with the
/// slope minimizing the mean vertical gap to the samples. The optimum passes through a hull vertex.
Regression supporting_line(std::span<const double> x, std::span<const double> y, bool upper);

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Composite 20-point Gauss-Legendre rule on [a, b] with `panels` equal panels.
QuadratureRule composite_gauss(double a, double b, int panels);

/// Latin hypercube design on [0,1)^dims: each coordinate hits every one of the n strata once.
std::vector<std::vector<double>> latin_hypercube(int n, int dims, std::uint64_t seed);

}  // namespace dsqg

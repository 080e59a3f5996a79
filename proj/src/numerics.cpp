#include "dsqg/numerics.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "dsqg/errors.hpp"

namespace dsqg {

Regression linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ShapeError("regression inputs differ in length");
  const std::size_t n = x.size();
  if (n < 2) throw ConfigurationError("regression needs at least two samples");
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0) throw ConfigurationError("regression needs distinct abscissae");
  Regression r;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  r.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  r.samples = static_cast<int>(n);
  return r;
}

Regression supporting_line(std::span<const double> x, std::span<const double> y, bool upper) {
  if (x.size() != y.size()) throw ShapeError("regression inputs differ in length");
  const std::size_t n = x.size();
  if (n < 2) throw ConfigurationError("supporting line needs at least two samples");
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double sign = upper ? 1.0 : -1.0;

  // For a fixed slope the tightest intercept touches one sample and the mean gap is convex
  // piecewise-linear in the slope, so the optimum is the slope of an edge of the hull.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return x[a] < x[b] || (x[a] == x[b] && sign * y[a] > sign * y[b]);
  });
  std::vector<std::size_t> hull;
  for (std::size_t idx : order) {
    if (!hull.empty() && x[hull.back()] == x[idx]) continue;
    while (hull.size() >= 2) {
      const std::size_t a = hull[hull.size() - 2], b = hull.back();
      const double cross = (x[b] - x[a]) * (y[idx] - y[a]) - (y[b] - y[a]) * (x[idx] - x[a]);
      if (sign * cross >= 0.0) hull.pop_back();
      else break;
    }
    hull.push_back(idx);
  }

  Regression best;
  double best_gap = std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e + 1 < hull.size(); ++e) {
    const std::size_t a = hull[e], b = hull[e + 1];
    const double slope = (y[b] - y[a]) / (x[b] - x[a]);
    double c = -sign * std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      const double ci = y[i] - slope * x[i];
      c = upper ? std::max(c, ci) : std::min(c, ci);
    }
    const double gap = sign * (c + slope * mx);
    if (gap < best_gap) {
      best_gap = gap;
      best.slope = slope;
      best.intercept = c;
    }
  }
  if (!std::isfinite(best_gap)) throw ConfigurationError("supporting line needs distinct abscissae");
  best.samples = static_cast<int>(n);
  best.r_squared = std::numeric_limits<double>::quiet_NaN();
  return best;
}

QuadratureRule composite_gauss(double a, double b, int panels) {
  if (panels < 1 || !(b > a)) throw ConfigurationError("invalid quadrature interval");
  using Rule = boost::math::quadrature::gauss<double, 20>;
  const auto& abscissa = Rule::abscissa();
  const auto& weights = Rule::weights();
  QuadratureRule rule;
  rule.nodes.reserve(static_cast<std::size_t>(panels) * 20);
  rule.weights.reserve(rule.nodes.capacity());
  const double width = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * width;
    const double half = 0.5 * width;
    for (std::size_t i = 0; i < abscissa.size(); ++i) {
      rule.nodes.push_back(mid - half * abscissa[i]);
      rule.weights.push_back(half * weights[i]);
      if (abscissa[i] != 0.0) {
        rule.nodes.push_back(mid + half * abscissa[i]);
        rule.weights.push_back(half * weights[i]);
      }
    }
  }
  return rule;
}

std::vector<std::vector<double>> latin_hypercube(int n, int dims, std::uint64_t seed) {
  if (n < 1 || dims < 1) throw ConfigurationError("latin hypercube needs n, dims >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::vector<double>> points(n, std::vector<double>(dims));
  std::vector<int> strata(n);
  for (int d = 0; d < dims; ++d) {
    std::iota(strata.begin(), strata.end(), 0);
    std::shuffle(strata.begin(), strata.end(), rng);
    for (int i = 0; i < n; ++i) points[i][d] = (strata[i] + unit(rng)) / n;
  }
  return points;
}

}  // namespace dsqg

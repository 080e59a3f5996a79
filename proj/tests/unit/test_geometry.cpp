#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dsqg/errors.hpp"
#include "dsqg/geometry.hpp"
#include "dsqg/spectral.hpp"

using namespace dsqg;
using std::numbers::pi;

TEST_CASE("geometry: first eigenpair and center distance at N=8") {
  const GeometryPtr g = build_square_geometry(8, pi, 0.0);
  CHECK(g->lambda1() == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(g->ground_state(Point{pi / 2, pi / 2}) == doctest::Approx(2.0 / pi).epsilon(1e-15));
  CHECK(g->distance_to_boundary(Point{pi / 2, pi / 2}) == doctest::Approx(pi / 2).epsilon(1e-15));
  // the node (4,4) is the center
  CHECK(g->distance()[g->index(4, 4)] == doctest::Approx(pi / 2));
}

TEST_CASE("geometry: w1/d degenerates like eps at the corner") {
  const GeometryPtr g = build_square_geometry(64, pi, 0.2);
  double prev = 1.0;
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    const Point p{eps, eps};
    const double ratio = g->ground_state(p) / g->distance_to_boundary(p);
    CHECK(ratio == doctest::Approx(2.0 / pi * eps).epsilon(1e-3));
    CHECK(ratio < prev);
    prev = ratio;
    CHECK(g->in_corner(p));
  }
}

TEST_CASE("geometry: invalid sizes are rejected") {
  CHECK_THROWS_AS(build_square_geometry(4), ConfigurationError);
  CHECK_THROWS_AS(build_square_geometry(16, -1.0), ConfigurationError);
  CHECK_THROWS_AS(build_square_geometry(16, pi, pi / 4), ConfigurationError);
}

TEST_CASE("geometry: ground-state equivalence constants") {
  const GeometryPtr g = build_square_geometry(64, pi, 0.3);
  const GroundStateBounds b = fit_ground_state_equivalence(*g);
  CHECK(b.lower > 0.0);
  CHECK(b.lower <= b.upper);
  // 2/pi is the limit at the side midpoints; on the grid the sup stays just below it
  const double h = g->spacing();
  CHECK(b.upper <= 2.0 / pi);
  CHECK(b.upper >= 2.0 / pi * std::sin(h) / h - 1e-12);

}

TEST_CASE("geometry: c0 converges to the minimum of w1/d on the mask circle") {
  // continuum oracle: min over the quarter circle |x - corner| = r of w1/d
  const double r = 0.3;
  double oracle = 1e300;
  for (int k = 1; k < 200000; ++k) {
    const double a = 0.5 * pi * k / 200000.0;
    const double x = r * std::cos(a), y = r * std::sin(a);
    oracle = std::min(oracle, 2.0 / pi * std::sin(x) * std::sin(y) / std::min(x, y));
  }
  double prev = 0.0;
  for (int n : {128, 256, 512}) {
    const double c0 = fit_ground_state_equivalence(*build_square_geometry(n, pi, r)).lower;
    CHECK(c0 >= oracle);
    CHECK((c0 - oracle) / oracle < 0.05);
    if (prev > 0.0) CHECK(std::abs(c0 - prev) / prev < 0.05);
    prev = c0;
  }
}

TEST_CASE("geometry: c0 shrinks without a corner mask") {
  double prev = 1.0;
  for (int n : {16, 64, 256}) {
    const double c0 = fit_ground_state_equivalence(*build_square_geometry(n, pi, 0.0)).lower;
    CHECK(c0 < prev);
    prev = c0;
  }
  CHECK(prev < 0.05);
}

TEST_CASE("geometry: discrete orthonormality of eigenfunctions") {
  const GeometryPtr g = build_square_geometry(16);
  const double h = g->spacing();
  const int pairs[][4] = {{1, 1, 1, 1}, {1, 2, 1, 2}, {3, 5, 3, 5}, {1, 1, 2, 1}, {2, 3, 3, 2}, {15, 15, 15, 15}};
  for (const auto& q : pairs) {
    double dot = 0.0;
    for (int i = 1; i < 16; ++i)
      for (int j = 1; j < 16; ++j)
        dot += g->eigenfunction(q[0], q[1], g->point(i, j)) * g->eigenfunction(q[2], q[3], g->point(i, j)) * h * h;
    const double expect = (q[0] == q[2] && q[1] == q[3]) ? 1.0 : 0.0;
    CHECK(std::abs(dot - expect) < 1e-12);
  }
}

TEST_CASE("geometry: distance is invariant under the square's symmetries") {
  const GeometryPtr g = build_square_geometry(33);
  const int n = g->grid_size();
  const auto& d = g->distance();
  for (int i = 1; i < n; ++i)
    for (int j = 1; j < n; ++j) {
      const double v = d[g->index(i, j)];
      CHECK(d[g->index(j, i)] == v);
      CHECK(d[g->index(n - i, j)] == doctest::Approx(v).epsilon(1e-14));
      CHECK(d[g->index(i, n - j)] == doctest::Approx(v).epsilon(1e-14));
    }
}

TEST_CASE("geometry: default corner mask keeps almost every node") {
  const GeometryPtr g = build_square_geometry(128);
  CHECK(g->corner_radius() == doctest::Approx(0.05 * pi));
  std::size_t masked = 0;
  for (auto m : g->corner_mask()) masked += m;
  CHECK(static_cast<double>(masked) / g->size() < 0.01);
}

TEST_CASE("geometry: refinement doubles N and keeps L and the corner radius") {
  const GeometryPtr g = build_square_geometry(32, 2.0, 0.1);
  const GeometryPtr f = g->refined(2);
  CHECK(f->grid_size() == 64);
  CHECK(f->side_length() == 2.0);
  CHECK(f->corner_radius() == 0.1);
  CHECK(!g->same_grid(*f));
  CHECK(g->same_grid(*build_square_geometry(32, 2.0)));
}

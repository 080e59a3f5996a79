#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dsqg/cutoff.hpp"
#include "dsqg/errors.hpp"
#include "dsqg/operators.hpp"

using namespace dsqg;
using std::numbers::pi;

TEST_CASE("cutoff profile is a nonincreasing C2 step") {
  CHECK(cutoff_profile(0.0) == 1.0);
  CHECK(cutoff_profile(5.0 / 16) == 1.0);
  CHECK(cutoff_profile(7.0 / 16) == 0.0);
  CHECK(cutoff_profile(1.0) == 0.0);
  double prev = 1.0;
  for (int k = 0; k <= 200; ++k) {
    const double v = cutoff_profile(k / 200.0);
    CHECK(v <= prev);
    prev = v;
  }
  CHECK(std::abs(cutoff_profile_derivative(5.0 / 16)) < 1e-14);
  CHECK(std::abs(cutoff_profile_derivative(7.0 / 16)) < 1e-14);
}

TEST_CASE("standard cutoff: center values, supports, ordering") {
  const GeometryPtr g = build_square_geometry(128);
  const Point x0 = g->point(64, 64);
  const double l = 0.6;
  const CutoffPair c = standard_cutoff(g, x0, l);
  CHECK(c.phi.at(64, 64) == 1.0);
  CHECK(c.chi.at(64, 64) == 1.0);
  double grad_on_phi = 0.0;
  for (int i = 1; i < 128; ++i)
    for (int j = 1; j < 128; ++j) {
      const Point p = g->point(i, j);
      const double r = std::hypot(p.x - x0.x, p.y - x0.y);
      const double phi = c.phi.at(i, j), chi = c.chi.at(i, j);
      CHECK(phi >= 0.0);
      CHECK(phi <= chi);
      CHECK(chi <= 1.0);
      CHECK(chi * phi == doctest::Approx(phi));
      if (r >= l / 2) CHECK(phi == 0.0);
      if (r > 7 * l / 16) CHECK(phi == 0.0);
      if (phi > 0.0) grad_on_phi = std::max(grad_on_phi, std::abs(c.chi_gradient.at(i, j)));
    }
  CHECK(grad_on_phi == 0.0);
}

TEST_CASE("standard cutoff: preconditions") {
  const GeometryPtr g = build_square_geometry(64);
  CHECK_THROWS_AS(standard_cutoff(g, {0.5, pi / 2}, 0.3), PreconditionError);
  CHECK_THROWS_AS(standard_cutoff(g, {pi / 2, pi / 2}, 0.9), PreconditionError);
}

TEST_CASE("finite differences on the grid") {
  const GeometryPtr g = build_square_geometry(32);
  const GridField lin = GridField::sample(g, [](Point p) { return 3.0 * p.x - p.y; });
  const MaskedGridField z = finite_difference(lin, Displacement{0, 0});
  CHECK(z.values.max_abs() == 0.0);
  const Displacement h{2, 1};
  const MaskedGridField d = finite_difference(lin, h);
  const double dx = g->spacing();
  for (int i = 1; i < 32; ++i)
    for (int j = 1; j < 32; ++j) {
      const std::size_t k = g->index(i, j);
      const bool inside = i + 2 < 32 && j + 1 < 32;
      CHECK(static_cast<bool>(d.valid[k]) == inside);
      if (inside) CHECK(d.values.at(i, j) == doctest::Approx((3.0 * 2 - 1.0) * dx).epsilon(1e-12));
    }
  // delta_{-h} f(x + h) = -delta_h f(x)
  const MaskedGridField back = finite_difference(lin, -h);
  for (int i = 1; i + 2 < 32; ++i)
    for (int j = 1; j + 1 < 32; ++j) CHECK(back.values.at(i + 2, j + 1) == -d.values.at(i, j));
}

TEST_CASE("commensurate displacement") {
  const GeometryPtr g = build_square_geometry(32);
  const double dx = g->spacing();
  const Displacement d = commensurate_displacement(*g, 3 * dx, -dx);
  CHECK(d.di == 3);
  CHECK(d.dj == -1);
  CHECK(d.length(dx) == doctest::Approx(std::sqrt(10.0) * dx));
  CHECK_THROWS_AS(commensurate_displacement(*g, 0.5 * dx, 0.0), ConfigurationError);
}

TEST_CASE("commutator: zero step, linearity, localized cancellation") {
  const GeometryPtr g = build_square_geometry(256);
  const Point x0 = g->point(128, 128);
  const double l = 0.6;
  const SpectralField w = SpectralField::mode(g, 1, 1);
  CHECK(commutator(w, x0, l, Displacement{0, 0}).max_abs() == 0.0);

  const Displacement h{1, 0};
  const GridField c1 = commutator(w, x0, l, h);
  const GridField c2 = commutator(2.0 * w, x0, l, h);
  double err = 0.0;
  for (std::size_t k = 0; k < c1.values().size(); ++k) err = std::max(err, std::abs(c2.values()[k] - 2 * c1.values()[k]));
  CHECK(err < 1e-12);

  // theta supported inside {chi = 1}: the cut term almost reproduces delta_h Lambda theta
  const GridField bump = GridField::sample(g, [&](Point p) {
    const double r = std::hypot(p.x - x0.x, p.y - x0.y) / (0.25 * l);
    return r < 1.0 ? std::pow(1.0 - r * r, 4) : 0.0;
  });
  const SpectralField theta = forward(bump);
  const GridField c = commutator(theta, x0, l, h);
  const MaskedGridField uncut = finite_difference(apply_lambda_power(theta, 1.0), h);
  const CutoffPair pair = standard_cutoff(g, x0, l);
  double ref = 0.0;
  for (std::size_t k = 0; k < c.values().size(); ++k)
    if (pair.phi.values()[k] > 0.0) ref = std::max(ref, std::abs(uncut.values.values()[k]));
  CHECK(c.max_abs() < 0.1 * ref);

  CHECK_THROWS_AS(commutator(w, x0, l, Displacement{4, 0}), PreconditionError);
}

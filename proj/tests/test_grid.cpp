#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kslab/errors.hpp"
#include "kslab/grid.hpp"

using namespace kslab;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("grid: weights are positive and sum to the disc area") {
  for (std::size_t n : {16u, 57u, 256u}) {
    const RadialGrid g = build_radial_grid(n, 1.0);
    CHECK_NOTHROW(validate_grid(g));
    double sum = 0.0;
    for (double w : g.w) {
      CHECK(w > 0.0);
      sum += w;
    }
    CHECK(std::abs(sum - kPi) <= 1e-12 * kPi);
  }
  const RadialGrid g2 = build_radial_grid(64, 2.5);
  double sum = 0.0;
  for (double w : g2.w) sum += w;
  CHECK(std::abs(sum - kPi * 2.5 * 2.5) <= 1e-12 * kPi * 2.5 * 2.5);
}

TEST_CASE("grid: constants integrate exactly, r^2 at second order") {
  const RadialGrid g = build_radial_grid(16, 1.0);
  CHECK(g.integrate(Field(g.n(), 1.0)) == doctest::Approx(kPi).epsilon(1e-13));

  // int_B r^2 dx = pi/2; the cell-area rule converges at O(h^2)
  double err_prev = 0.0;
  int k = 0;
  for (std::size_t n : {33u, 65u, 129u}) {
    const RadialGrid gn = build_radial_grid(n, 1.0);
    const Field f = sample(gn, [](double r) { return r * r; });
    const double err = std::abs(gn.integrate(f) - kPi / 2.0);
    if (k > 0) {
      const double rate = std::log2(err_prev / err);
      CHECK(rate > 1.9);
    }
    err_prev = err;
    ++k;
  }
  CHECK(err_prev < 2e-4);
}

TEST_CASE("grid: clustered variant keeps the invariants") {
  const RadialGrid g = build_clustered_radial_grid(64, 1.0, 2.0);
  CHECK_NOTHROW(validate_grid(g));
  // spacing shrinks toward the boundary
  const double first = g.r[1] - g.r[0];
  const double last = g.r[g.n() - 1] - g.r[g.n() - 2];
  CHECK(last < 0.5 * first);
}

TEST_CASE("grid: rejects bad arguments") {
  CHECK_THROWS_AS(build_radial_grid(8, 1.0), config_error);
  CHECK_THROWS_AS(build_radial_grid(32, -1.0), config_error);
  CHECK_THROWS_AS(build_clustered_radial_grid(32, 1.0, -3.0), config_error);
}

TEST_CASE("grid: node-vector constructor and interpolation") {
  const RadialGrid g0 = build_radial_grid(40, 1.0);
  const RadialGrid g = build_radial_grid_from_nodes(g0.r);
  CHECK_NOTHROW(validate_grid(g));
  for (std::size_t i = 0; i < g.n(); ++i) CHECK(g.w[i] == doctest::Approx(g0.w[i]));

  const Field f = sample(g, [](double r) { return 3.0 * r + 1.0; });
  CHECK(g.interp(f, 0.515) == doctest::Approx(3.0 * 0.515 + 1.0).epsilon(1e-12));
  CHECK(g.interp(f, 0.0) == doctest::Approx(1.0));
  CHECK(g.interp(f, 1.0) == doctest::Approx(4.0));
}

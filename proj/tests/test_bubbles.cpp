#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kslab/bubbles.hpp"
#include "kslab/errors.hpp"
#include "kslab/quadrature.hpp"
#include "kslab/steady.hpp"

using namespace kslab;

namespace {

constexpr double kPi = std::numbers::pi;

RadialProfile bubble_profile(double theta, double r_max) {
  RadialProfile p;
  p.r_max = r_max;
  p.value = [theta](double r) { return bubble_value(theta, r); };
  return p;
}

// Mass of e^{U_theta} on B_r by quadrature only (no closed form): finite part
// by adaptive Simpson, and the r = infinity case via the substitution
// t = 1/r on the tail.
double bubble_mass_quadrature(double theta, double r) {
  if (std::isinf(r)) {
    const double split = 10.0 / theta;
    const double inner = adaptive_simpson(
        [theta](double s) { return 2.0 * kPi * s * std::exp(bubble_value(theta, s)); }, 0.0,
        split, 1e-12);
    const double tail = adaptive_simpson(
        [theta, split](double t) {
          (void)split;
          const double tt = 8.0 * t * t + theta * theta;
          return 128.0 * kPi * theta * theta * t / (tt * tt);
        },
        0.0, 1.0 / split, 1e-12);
    return inner + tail;
  }
  return adaptive_simpson(
      [theta](double s) { return 2.0 * kPi * s * std::exp(bubble_value(theta, s)); }, 0.0, r,
      1e-12);
}

}  // namespace

TEST_CASE("bubble values") {
  CHECK(bubble_value(2.0, 0.0) == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-15));
  CHECK(bubble_value(std::sqrt(8.0), 1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK_THROWS_AS(bubble_value(-1.0, 0.5), config_error);
}

TEST_CASE("bubble solves the Liouville equation under grid refinement") {
  const double theta = 1.7;
  double err_prev = 0.0;
  int level = 0;
  for (std::size_t n : {65u, 129u, 257u}) {
    const RadialGrid g = build_radial_grid(n, 1.0);
    const Field u = sample(g, [theta](double r) { return bubble_value(theta, r); });
    const Field lap = apply_radial_laplacian(g, BoundaryCondition::neumann, u);
    double err = 0.0;
    for (std::size_t i = 0; i + 1 < g.n(); ++i)  // skip the zero-flux closure row
      err = std::max(err, std::abs(lap[i] + std::exp(u[i])));
    if (level > 0) CHECK(err < 0.3 * err_prev);
    err_prev = err;
    ++level;
  }
  CHECK(err_prev < 5e-4);
}

TEST_CASE("bubble mass: closed form, quadrature, monotonicity, and limits") {
  CHECK(bubble_mass(1.3, INFINITY) == 8.0 * kPi);
  CHECK(bubble_mass(std::sqrt(8.0), 1.0) == doctest::Approx(4.0 * kPi).epsilon(1e-14));
  CHECK(bubble_mass(0.5, 0.0) == 0.0);

  for (double theta : {0.5, std::sqrt(8.0), 10.0}) {
    for (double r : {0.3, 1.0, 5.0}) {
      CHECK(bubble_mass(theta, r) ==
            doctest::Approx(bubble_mass_quadrature(theta, r)).epsilon(1e-10));
    }
    CHECK(bubble_mass_quadrature(theta, INFINITY) ==
          doctest::Approx(8.0 * kPi).epsilon(1e-10));
    double prev = 0.0;
    for (double r = 0.25; r < 40.0; r *= 2.0) {
      const double m = bubble_mass(theta, r);
      CHECK(m > prev);
      CHECK(m < 8.0 * kPi);
      prev = m;
    }
  }
  // inverse round trip
  for (double m : {0.1, 1.0, 4.0 * kPi, 24.0}) {
    const double r = bubble_radius_for_mass(2.0, m);
    CHECK(bubble_mass(2.0, r) == doctest::Approx(m).epsilon(1e-13));
  }
  CHECK_THROWS_AS(bubble_radius_for_mass(2.0, 9.0 * kPi), config_error);
}

TEST_CASE("Bol deficit vanishes on the bubble family") {
  for (double theta : {0.5, std::sqrt(8.0), 10.0}) {
    for (double r : {0.1, 0.5, 1.0, 2.0, 10.0}) {
      const BolReport rep = bol_deficit(bubble_profile(theta, std::max(20.0, 2.0 * r)), r);
      CHECK(std::abs(rep.deficit) <= 1e-8);
      CHECK(rep.subsolution_ok);
    }
  }
}

TEST_CASE("Bol deficit is positive for strict subsolutions") {
  // v = u + log lambda - log int e^u for a Dirichlet solution: Lap v + e^v =
  // beta u > 0, total mass lambda < 8 pi.
  ProblemSpec spec;
  spec.beta = 1.0;
  spec.lambda = 4.0 * kPi;
  spec.bc = BoundaryCondition::dirichlet;
  spec.grid = build_radial_grid(257, 1.0);
  const SolveReport rep = newton_solve(spec, Field(spec.grid.n(), 0.0), 1e-12);
  REQUIRE(rep.ok());
  const double logS = log_int_exp(spec.grid, rep.solution.u);
  Field v(spec.grid.n());
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = rep.solution.u[i] + std::log(spec.lambda) - logS;
  for (double r : {0.25, 0.5, 0.75, 1.0}) {
    const BolReport b = bol_deficit(spec.grid, v, r);
    CHECK(b.deficit > 0.0);
    CHECK(b.subsolution_ok);  // Lap v + e^v = beta u > 0
  }
  CHECK(bol_deficit(spec.grid, v, 1.0).mass_total ==
        doctest::Approx(spec.lambda).epsilon(1e-6));
}

TEST_CASE("Bol deficit rejects over-massive profiles") {
  RadialProfile w;
  w.r_max = 3.0;
  w.value = [](double) { return 1.2; };  // e^{1.2} * 9 pi >> 8 pi
  CHECK_THROWS_AS(bol_deficit(w, 1.0), config_error);
}

TEST_CASE("rearrangement: constants map to the matching ball") {
  const RadialGrid g = build_radial_grid(97, 1.0);
  const Field phi(g.n(), 2.5);
  const Field v1(g.n(), 0.0);  // base measure = Lebesgue, mass pi < 8 pi
  const RearrangedField rf = rearrange_equimeasurable(g, phi, v1, std::sqrt(8.0));
  CHECK(rf.values.size() == 1);
  CHECK(rf.values.front() == 2.5);
  CHECK(rf.total_mass == doctest::Approx(kPi).epsilon(1e-13));
  CHECK(bubble_mass(rf.theta, rf.outer_radius) == doctest::Approx(kPi).epsilon(1e-12));
  CHECK(rf.value_at(0.5 * rf.outer_radius) == 2.5);
}

TEST_CASE("rearrangement: equimeasurable and monotone on a Dirichlet pair") {
  ProblemSpec spec;
  spec.beta = 1.0;
  spec.lambda = 4.0 * kPi;
  spec.bc = BoundaryCondition::dirichlet;
  spec.grid = build_radial_grid(257, 1.0);
  const SolveReport r1 = newton_solve(spec, Field(spec.grid.n(), 0.0), 1e-12);
  REQUIRE(r1.ok());
  ProblemSpec spec2 = spec;
  spec2.beta = 0.5;
  const SolveReport r2 = newton_solve(spec2, Field(spec.grid.n(), 0.0), 1e-12);
  REQUIRE(r2.ok());

  const double ls1 = log_int_exp(spec.grid, r1.solution.u);
  const double ls2 = log_int_exp(spec.grid, r2.solution.u);
  Field v1(spec.grid.n()), phi(spec.grid.n());
  for (std::size_t i = 0; i < v1.size(); ++i) {
    v1[i] = r1.solution.u[i] + std::log(spec.lambda) - ls1;
    phi[i] = (r2.solution.u[i] + std::log(spec.lambda) - ls2) - v1[i];
  }
  // theta chosen so the bubble ball of radius 1 holds exactly int e^{v1} = lambda
  const double theta = std::sqrt(8.0 * spec.lambda / (8.0 * kPi - spec.lambda));
  const RearrangedField rf = rearrange_equimeasurable(spec.grid, phi, v1, theta, 100);
  CHECK(rf.max_equimeasure_residual <= 1e-6);
  CHECK(rf.total_mass == doctest::Approx(spec.lambda).epsilon(1e-10));
  CHECK(rf.outer_radius == doctest::Approx(1.0).epsilon(1e-10));
  for (std::size_t k = 1; k < rf.values.size(); ++k) CHECK(rf.values[k] <= rf.values[k - 1]);

  // gradient-integral comparison at sampled regular values: exclude a band of
  // two cell-ranges around the discrete critical values of phi, where the
  // level sets of the interpolant degenerate
  std::vector<double> critical = {phi.front(), phi.back()};
  double cell_range = 0.0;
  for (std::size_t i = 0; i + 1 < phi.size(); ++i) {
    cell_range = std::max(cell_range, std::abs(phi[i + 1] - phi[i]));
    if (i > 0 && (phi[i + 1] - phi[i]) * (phi[i] - phi[i - 1]) <= 0.0)
      critical.push_back(phi[i]);
  }
  const double delta = 2.0 * cell_range;
  const double tmin = rf.values.back(), tmax = rf.values.front();
  std::size_t checked = 0;
  for (int k = 10; k < 90; ++k) {
    const double t = tmin + (tmax - tmin) * k / 100.0;
    bool regular = true;
    for (double c : critical)
      if (std::abs(t - c) < delta) regular = false;
    if (!regular) continue;
    const double star = rearranged_gradient_integral(spec.grid, phi, v1, t);
    const double orig = gradient_level_integral(spec.grid, phi, t);
    if (std::isfinite(star) && orig > 0.0) {
      CHECK(star <= orig + 1e-6);
      ++checked;
    }
  }
  CHECK(checked > 50);
}

TEST_CASE("rearrangement rejects masses beyond the bubble capacity") {
  const RadialGrid g = build_radial_grid(97, 1.0);
  const Field phi(g.n(), 1.0);
  const Field v1(g.n(), 3.0);  // int e^3 dx = pi e^3 > 8 pi
  CHECK_THROWS_AS(rearrange_equimeasurable(g, phi, v1, 1.0), config_error);
}

TEST_CASE("radial lemma checks report inapplicability when the flux condition fails") {
  // doubling the bubble steepens the slope but shrinks the mass: (5.4) fails
  const double theta1 = 1.0, R = 1.4;
  RadialProfile psi;
  psi.r_max = R;
  psi.value = [theta1](double r) { return 2.0 * bubble_value(theta1, r); };
  const RadialLemmaReport rep = check_radial_lemmas(psi, theta1, R, RadialLemmaSide::inner);
  CHECK_FALSE(rep.hypothesis_ok);
  CHECK(rep.inapplicable);
}

TEST_CASE("radial dichotomy, sandwich, and boundary-value checks") {
  const double theta1 = 1.0, R = 1.4;
  const double theta2 = 8.0 / (R * R * theta1);

  SUBCASE("bubbles saturate the inner alternative") {
    const RadialLemmaReport rep =
        check_radial_lemmas(bubble_profile(theta1, R), theta1, R, RadialLemmaSide::inner);
    CHECK(rep.hypothesis_ok);
    CHECK(rep.alternative_lower);  // equality endpoint
    const RadialLemmaReport rep2 =
        check_radial_lemmas(bubble_profile(theta2, R), theta1, R, RadialLemmaSide::inner);
    CHECK(rep2.hypothesis_ok);
    CHECK(rep2.alternative_upper);
  }

  SUBCASE("a centered dip vanishing linearly at the rim keeps the flux condition") {
    // psi = U + phi with phi <= 0, phi' >= 0: the boundary value is unchanged
    // and the flux condition stays satisfiable for small amplitude.
    RadialProfile psi;
    psi.r_max = R;
    psi.value = [theta1, R](double r) {
      const double s = r / R;
      return bubble_value(theta1, r) - 0.05 * (1.0 - s * s);
    };
    const RadialLemmaReport rep = check_radial_lemmas(psi, theta1, R, RadialLemmaSide::inner);
    CHECK(rep.hypothesis_ok);
    CHECK(rep.alternative_lower);
    CHECK(rep.psi_mass < rep.bubble_mass_1 - 1e-3);
  }

  SUBCASE("outer sandwich holds for the bubble tails") {
    RadialProfile outer1;
    outer1.r_max = 60.0;
    outer1.value = [theta1](double r) { return bubble_value(theta1, r); };
    const RadialLemmaReport rep =
        check_radial_lemmas(outer1, theta1, R, RadialLemmaSide::outer, theta1);
    CHECK(rep.hypothesis_ok);
    CHECK(rep.sandwich_ok);
  }

  SUBCASE("boundary comparison with the mass-matched bubble") {
    const RadialLemmaReport rep = check_radial_lemmas(bubble_profile(theta1, R), theta1, R,
                                                      RadialLemmaSide::boundary_value);
    CHECK(rep.hypothesis_ok);
    CHECK(rep.matched_theta == doctest::Approx(theta1).epsilon(1e-6));
    CHECK(rep.boundary_comparison_ok);
  }
}

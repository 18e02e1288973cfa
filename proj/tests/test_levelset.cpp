#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "kslab/census.hpp"
#include "kslab/continuation.hpp"
#include "kslab/errors.hpp"
#include "kslab/levelset.hpp"

using namespace kslab;

namespace {

constexpr double kPi = std::numbers::pi;

// A cheap nonconstant Neumann branch shared by the level-set tests.
struct BranchFixture {
  RadialGrid grid;
  std::vector<SteadySolution> solutions;
  BranchFixture() : grid(build_radial_grid(97, 1.0)) {
    ContinuationOptions opts;
    opts.ds = 0.8;
    opts.max_points = 4;
    opts.tol = 1e-11;
    opts.lambda_min = 30.0;
    opts.lambda_max = 70.0;
    opts.with_stability = false;
    const Branch br = continue_branch(1.0, BoundaryCondition::neumann, grid, opts);
    for (const BranchPoint& p : br.points) {
      SteadySolution s;
      s.spec.beta = 1.0;
      s.spec.lambda = p.lambda;
      s.spec.bc = BoundaryCondition::neumann;
      s.spec.grid = grid;
      s.u = p.u;
      solutions.push_back(std::move(s));
    }
  }
};

const BranchFixture& branch_fixture() {
  static BranchFixture f;
  return f;
}

// Plateau field with its mean pinned to the plateau value, paired with
// f = 1 + t, g = (1 + mean)/mean * t: then A_f = A_g and the single crossing
// sits exactly on the plateau.
struct PlateauCase {
  Field u;
  NonlinearityPair pair;
  double plateau = 0.0;
};

PlateauCase make_plateau_case(const RadialGrid& g, double a, double bump_amp, double r_in,
                              double r_out) {
  Field bump(g.n(), 0.0), dip(g.n(), 0.0);
  double bump_mass = 0.0, dip_mass = 0.0;
  for (std::size_t i = 0; i < g.n(); ++i) {
    const double r = g.r[i];
    if (r < r_in) {
      bump[i] = bump_amp * 0.5 * (1.0 + std::cos(kPi * r / r_in));
      bump_mass += g.w[i] * bump[i];
    } else if (r > r_out) {
      dip[i] = std::pow((r - r_out) / (1.0 - r_out), 2);
      dip_mass += g.w[i] * dip[i];
    }
  }
  REQUIRE(dip_mass > 0.0);
  const double k = bump_mass / dip_mass;  // balances the mean onto the plateau
  PlateauCase pc;
  pc.plateau = a;
  pc.u.resize(g.n());
  for (std::size_t i = 0; i < g.n(); ++i) pc.u[i] = a + bump[i] - k * dip[i];
  const double mean = g.mean(pc.u);
  const double beta_eff = (1.0 + mean) / mean;
  pc.pair = make_custom_pair(
      g, pc.u, [](double t) { return 1.0 + t; }, [](double) { return 1.0; },
      [beta_eff](double t) { return beta_eff * t; });
  return pc;
}

}  // namespace

TEST_CASE("table: constant fields yield the trivial marker") {
  const RadialGrid g = build_radial_grid(64, 1.0);
  const Field u(g.n(), 2.0);
  const LevelSetTable tab = build_table(g, u, make_pair(g, u, kPi, 1.0), 64);
  CHECK(tab.trivial);
}

TEST_CASE("table: distribution function of 1 - r^2 matches the closed form") {
  const RadialGrid g = build_radial_grid(257, 1.0);
  const Field u = sample(g, [](double r) { return 1.0 - r * r; });
  const LevelSetTable tab = build_table(g, u, make_pair(g, u, kPi, 1.0), 128);
  const double h = 1.0 / 256.0;
  for (double t : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    CHECK(std::abs(tab.mu_at(t) - kPi * (1.0 - t)) <= 2.0 * kPi * h);
  }
  // beyond the range both measures vanish
  CHECK(tab.mu_at(tab.t1 + 1e-9) == 0.0);
  CHECK(tab.mu_tilde_at(tab.t0 - 1e-9) == 0.0);
}

TEST_CASE("table: sorted accumulation equals a direct masked sum bit for bit") {
  const RadialGrid g = build_radial_grid(129, 1.0);
  const Field u = sample(g, [](double r) { return std::cos(5.0 * r) + 0.3 * r; });
  const LevelSetTable tab = build_table(g, u, make_pair(g, u, 2.0, 1.0), 64);

  // independent re-implementation: sort node indices by (value, index)
  // ascending, accumulate qualifying weights in that order
  std::vector<std::size_t> order(g.n());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (u[a] != u[b]) return u[a] < u[b];
    return a < b;
  });
  for (double t : {-0.5, 0.0, 0.37, 0.9, 1.2}) {
    double mu = 0.0;
    for (std::size_t k : order)
      if (u[k] > t) mu += g.w[k];
    CHECK(mu == tab.mu_at(t));  // bit-for-bit
  }
}

TEST_CASE("table: monotone columns and endpoint identities") {
  const auto& fx = branch_fixture();
  REQUIRE(!fx.solutions.empty());
  const SteadySolution& sol = fx.solutions.front();
  const NonlinearityPair pair = make_pair(sol);
  const LevelSetTable tab = build_table(fx.grid, sol.u, pair, 128);
  REQUIRE(!tab.trivial);
  for (std::size_t k = 1; k < tab.t.size(); ++k) {
    CHECK(tab.mu[k] <= tab.mu[k - 1] + 1e-15);
    CHECK(tab.mu_t[k] >= tab.mu_t[k - 1] - 1e-15);
  }
  for (std::size_t k = 0; k < tab.t.size(); ++k)
    CHECK(tab.mu[k] + tab.mu_t[k] <= kPi * (1.0 + 1e-14));

  // F(t0-) equals the full integral of f(u), which is lambda for this pair,
  // and beta int u for a Neumann solution
  const double F_full = tab.F_at(tab.t0 - 1e-9);
  CHECK(F_full == doctest::Approx(sol.spec.lambda).epsilon(1e-12));
  CHECK(F_full ==
        doctest::Approx(sol.spec.beta * fx.grid.integrate(sol.u)).epsilon(1e-8));
}

TEST_CASE("mean value comparisons") {
  const RadialGrid g = build_radial_grid(97, 1.0);

  SUBCASE("constant field: equality for the identity weight") {
    const Field u(g.n(), 3.0);
    const MeanValueReport rep = mean_value(g, u, [](double t) { return t; });
    CHECK(rep.A_h == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(std::abs(rep.worst_super_margin) <= 1e-12);
    CHECK(std::abs(rep.worst_sub_margin) <= 1e-12);
  }

  SUBCASE("model field 1 - r^2 with h = id: strict interior comparisons") {
    const Field u = sample(g, [](double r) { return 1.0 - r * r; });
    const MeanValueReport rep = mean_value(g, u, [](double t) { return t; });
    CHECK(rep.A_h == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(rep.worst_super_margin >= 0.0);
    CHECK(rep.worst_sub_margin >= 0.0);
    // closed form at t = 1/2: int_{u>t} u - A_h mu = pi(1-t^2)/2 - A_h pi(1-t)
    double mu = 0.0, H = 0.0;
    for (std::size_t i = 0; i < g.n(); ++i)
      if (u[i] > 0.5) {
        mu += g.w[i];
        H += g.w[i] * u[i];
      }
    CHECK(H - rep.A_h * mu ==
          doctest::Approx(kPi * (1.0 - 0.25) / 2.0 - 0.5 * kPi * 0.5).epsilon(0.05));
  }

  SUBCASE("decreasing weights are rejected") {
    const Field u = sample(g, [](double r) { return r; });
    CHECK_THROWS_AS(mean_value(g, u, [](double t) { return -t; }), config_error);
  }
}

TEST_CASE("crossings of the exponential/linear pair") {
  const RadialGrid g = build_radial_grid(97, 1.0);

  SUBCASE("constant solution at lambda = 4 pi: two roots, one at the constant") {
    const Field u(g.n(), 4.0);
    const NonlinearityPair pair = make_pair(g, u, 4.0 * kPi, 1.0);
    const std::vector<double> roots = crossing_set(pair, 4.0);
    REQUIRE(roots.size() == 2);
    CHECK((std::abs(roots[0] - 4.0) < 1e-7 || std::abs(roots[1] - 4.0) < 1e-7));
  }

  SUBCASE("constant solution at lambda = pi: tangency at t = 1") {
    const Field u(g.n(), 1.0);
    const NonlinearityPair pair = make_pair(g, u, kPi, 1.0);
    const std::vector<double> roots = crossing_set(pair, 1.0);
    REQUIRE(roots.size() >= 1);
    bool found = false;
    for (double r : roots)
      if (std::abs(r - 1.0) < 1e-5) found = true;
    CHECK(found);
  }

  SUBCASE("branch solutions: one or two crossings") {
    const auto& fx = branch_fixture();
    for (const SteadySolution& sol : fx.solutions) {
      const double t1 = *std::max_element(sol.u.begin(), sol.u.end());
      const std::vector<double> roots = crossing_set(make_pair(sol), t1);
      CHECK(roots.size() >= 1);
      CHECK(roots.size() <= 2);
    }
  }
}

TEST_CASE("Psi monotonicity") {
  SUBCASE("model field with interior super-level sets") {
    // u = 1 - r^2 solves Lap u - g(u) + f(u) = 0 for f = 4 + t, g = t; its
    // super-level sets stay interior, so Psi (not Psi~) must be monotone.
    const RadialGrid g = build_radial_grid(257, 1.0);
    const Field u = sample(g, [](double r) { return 1.0 - r * r; });
    const NonlinearityPair pair = make_custom_pair(
        g, u, [](double t) { return 4.0 + t; }, [](double) { return 1.0; },
        [](double t) { return t; });
    const LevelSetTable tab = build_table(g, u, pair, 256);
    const PsiMonotonicityReport rep = verify_monotone_psi(tab, {});
    CHECK(rep.n_checked > 100);
    CHECK(rep.worst_step_psi >= -1e-6 * (1.0 + std::abs(tab.Psi.front())));
  }

  SUBCASE("branch solutions: both Psi and Psi~, refinement shrinks violations") {
    const auto& fx = branch_fixture();
    REQUIRE(!fx.solutions.empty());
    const SteadySolution& sol = fx.solutions.back();
    const NonlinearityPair pair = make_pair(sol);
    const double t1 = *std::max_element(sol.u.begin(), sol.u.end());
    const std::vector<double> crossings = crossing_set(pair, t1);
    const LevelSetTable tab = build_table(fx.grid, sol.u, pair, 256);
    const PsiMonotonicityReport rep = verify_monotone_psi(tab, crossings);
    CHECK(rep.n_checked > 0);
    CHECK(rep.worst_backward_step >= -1e-6);

    // one grid refinement: re-solve and re-check, violation must not grow
    const RadialGrid g2 = build_radial_grid(193, 1.0);
    ProblemSpec spec2 = sol.spec;
    spec2.grid = g2;
    Field init(g2.n());
    for (std::size_t i = 0; i < g2.n(); ++i) init[i] = fx.grid.interp(sol.u, g2.r[i]);
    const SolveReport rep2 = newton_solve(spec2, init, 1e-11);
    REQUIRE(rep2.ok());
    const NonlinearityPair pair2 = make_pair(rep2.solution);
    const LevelSetTable tab2 = build_table(g2, rep2.solution.u, pair2, 256);
    const PsiMonotonicityReport mono2 =
        verify_monotone_psi(tab2, crossing_set(pair2, t1));
    const double viol1 = std::max(0.0, -rep.worst_backward_step);
    const double viol2 = std::max(0.0, -mono2.worst_backward_step);
    CHECK(viol2 <= viol1 + 1e-12);
  }
}

TEST_CASE("jump positivity at crossings") {
  const RadialGrid g = build_radial_grid(129, 1.0);

  SUBCASE("generic fields have zero plateau measure and zero jump") {
    const auto& fx = branch_fixture();
    const SteadySolution& sol = fx.solutions.front();
    const NonlinearityPair pair = make_pair(sol);
    const double t1 = *std::max_element(sol.u.begin(), sol.u.end());
    const LevelSetTable tab = build_table(fx.grid, sol.u, pair, 128);
    for (const JumpReport& j : verify_jump_positivity(tab, crossing_set(pair, t1))) {
      CHECK(j.plateau_measure == 0.0);
      CHECK(j.jump_from_limits == 0.0);
      CHECK(j.jump_closed_form == 0.0);
    }
  }

  SUBCASE("constructed plateau fields: positive jump, two routes agree") {
    for (double a : {1.5, 2.0, 3.0}) {
      const PlateauCase pc = make_plateau_case(g, a, 1.2, 0.3, 0.55);
      CHECK(std::abs(pc.pair.A_f - pc.pair.A_g) <= 1e-10 * pc.pair.A_f);
      const LevelSetTable tab = build_table(g, pc.u, pc.pair, 128);
      const std::vector<double> crossings = crossing_set(pc.pair, tab.t1);
      REQUIRE(!crossings.empty());
      bool saw_plateau_jump = false;
      for (const JumpReport& j : verify_jump_positivity(tab, crossings)) {
        CHECK(std::abs(j.jump_from_limits - j.jump_closed_form) <=
              1e-10 * std::max(1.0, std::abs(j.jump_from_limits)));
        if (j.plateau_measure > 0.0 && !j.degenerate) {
          saw_plateau_jump = true;
          CHECK(j.jump_from_limits >= -1e-8);
          CHECK(j.jump_from_limits > 0.0);
        }
      }
      CHECK(saw_plateau_jump);
    }
  }
}

TEST_CASE("integral inequality on branch solutions") {
  const auto& fx = branch_fixture();
  REQUIRE(!fx.solutions.empty());
  for (const SteadySolution& sol : fx.solutions) {
    const NonlinearityPair pair = make_pair(sol);
    const auto iso =
        verify_integral_inequality(fx.grid, sol.u, pair, InequalityVariant::isoperimetric);
    const auto per =
        verify_integral_inequality(fx.grid, sol.u, pair, InequalityVariant::perimeter);
    const auto g2 = verify_integral_inequality(fx.grid, sol.u, pair,
                                               InequalityVariant::g_isoperimetric, 2);
    const auto g3 = verify_integral_inequality(fx.grid, sol.u, pair,
                                               InequalityVariant::g_isoperimetric, 3);
    CHECK(iso.margin >= -1e-6);
    CHECK(per.margin >= -1e-6);
    CHECK(g2.margin >= -1e-6);
    CHECK(g3.margin >= -1e-6);
    // the measured perimeter dominates the profile, so its margin is smaller
    CHECK(per.rhs >= iso.rhs);
    CHECK(iso.lhs == doctest::Approx(per.lhs).epsilon(1e-12));
  }
  // constant input is rejected
  const Field c(fx.grid.n(), 1.0);
  CHECK_THROWS_AS(verify_integral_inequality(fx.grid, c, make_pair(fx.grid, c, kPi, 1.0),
                                             InequalityVariant::isoperimetric),
                  config_error);
}

TEST_CASE("threshold bounds implied by the inequality") {
  const auto& fx = branch_fixture();
  const ThresholdBoundReport rep = threshold_bound_from_inequality(fx.solutions.front());
  CHECK(rep.applicable);
  CHECK(rep.implied_bound_general == doctest::Approx(8.0 * kPi).epsilon(1e-14));
  CHECK(rep.implied_bound_disc == doctest::Approx(32.0 / kPi).epsilon(1e-14));
  CHECK(rep.respects_general);
  CHECK(rep.respects_disc);

  SteadySolution constant;
  constant.spec = fx.solutions.front().spec;
  constant.spec.lambda = kPi;
  constant.u.assign(fx.grid.n(), 1.0);
  CHECK_FALSE(threshold_bound_from_inequality(constant).applicable);
}

TEST_CASE("level perimeter of a radial field") {
  const RadialGrid g = build_radial_grid(513, 1.0);
  const Field u = sample(g, [](double r) { return 1.0 - r * r; });
  for (double t : {0.19, 0.5, 0.84}) {
    const double expect = 2.0 * kPi * std::sqrt(1.0 - t);
    CHECK(level_perimeter(g, u, t) == doctest::Approx(expect).epsilon(1e-4));
  }
}

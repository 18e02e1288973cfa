#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kslab/continuation.hpp"
#include "oracles.hpp"

using namespace kslab;

namespace {
constexpr double kPi = std::numbers::pi;

// One nonconstant Neumann branch per grid size, shared across test cases.
const Branch& neumann_branch(std::size_t n = 129) {
  static Branch cached = [] {
    ContinuationOptions opts;
    opts.ds = 0.6;
    opts.max_points = 8;
    opts.tol = 1e-11;
    opts.lambda_min = 30.0;
    opts.lambda_max = 70.0;
    return continue_branch(1.0, BoundaryCondition::neumann, build_radial_grid(129, 1.0), opts);
  }();
  (void)n;
  return cached;
}

}  // namespace

TEST_CASE("constant-branch instability is detected near the predictor") {
  const RadialGrid grid = build_radial_grid(129, 1.0);
  const double detected = find_constant_branch_instability(1.0, grid, 30.0, 70.0);
  const double jp = oracle::j0_prime_zero(1);
  const double reference = kPi * (1.0 + jp * jp);
  CHECK(std::abs(detected - reference) <= 0.01 * reference);
}

TEST_CASE("nonconstant Neumann branch: emanates at lambda* and stays above the thresholds") {
  const Branch& br = neumann_branch();
  REQUIRE(br.points.size() >= 5);
  CHECK(br.lambda_star == doctest::Approx(49.266).epsilon(0.01));

  double prev_arc = -1.0;
  for (const BranchPoint& p : br.points) {
    CHECK(p.sup_dev > 1e-3);          // genuinely nonconstant
    CHECK(p.lambda > 8.0 * kPi);      // Neumann nonconstant solutions need lambda > 8 pi
    CHECK(p.lambda > 32.0 / kPi);     // and the disc bound
    CHECK(p.arclength > prev_arc);    // arclength strictly increasing
    prev_arc = p.arclength;
  }
}

TEST_CASE("branch points re-verify their residual") {
  const Branch& br = neumann_branch();
  REQUIRE(!br.points.empty());
  ProblemSpec spec;
  spec.beta = 1.0;
  spec.bc = BoundaryCondition::neumann;
  spec.grid = build_radial_grid(129, 1.0);
  for (const BranchPoint& p : br.points) {
    spec.lambda = p.lambda;
    CHECK(sup_norm(residual(spec, p.u)) <= 2e-9);
  }
}

TEST_CASE("deep branch: the spike family approaches 8 pi from above") {
  ContinuationOptions opts;
  opts.ds = 1.2;
  opts.max_points = 18;
  opts.tol = 1e-11;
  opts.lambda_min = 26.0;
  opts.lambda_max = 70.0;
  opts.with_stability = false;
  const RadialGrid grid = build_radial_grid(193, 1.0);
  const Branch br = continue_branch(1.0, BoundaryCondition::neumann, grid, opts);
  REQUIRE(br.points.size() >= 8);
  CHECK(br.points.back().lambda < 28.0);  // gets close to the threshold...
  double prev_dev = 0.0;
  for (const BranchPoint& p : br.points) {
    CHECK(p.lambda > 8.0 * kPi);  // ...but never crosses it
    CHECK(p.sup_dev > 1e-3);      // and never collapses onto the constant
    CHECK(p.sup_dev > prev_dev);  // the spike grows monotonically downward
    prev_dev = p.sup_dev;
  }
}

TEST_CASE("zero-mean shift of a nonconstant branch solution") {
  const Branch& br = neumann_branch();
  REQUIRE(!br.points.empty());
  SteadySolution sol;
  sol.spec.beta = 1.0;
  sol.spec.lambda = br.points.back().lambda;
  sol.spec.bc = BoundaryCondition::neumann;
  sol.spec.grid = build_radial_grid(129, 1.0);
  sol.u = br.points.back().u;
  const ShiftedField sf = shift_to_zero_mean(sol);
  CHECK(std::abs(sf.integral_U) <= 1e-10);
  // the zero-mean formulation is algebraically equivalent, so its residual
  // stays at the solver level
  CHECK(sf.shifted_residual_norm <= 1e-8);
  CHECK(sup_norm(sf.U) == doctest::Approx(br.points.back().sup_dev).epsilon(1e-10));
}

TEST_CASE("Dirichlet branch continues from the trivial solution") {
  ContinuationOptions opts;
  opts.ds = 1.0;
  opts.max_points = 6;
  opts.tol = 1e-11;
  opts.lambda_min = -1.0;
  opts.lambda_max = 20.0;
  const Branch br =
      continue_branch(1.0, BoundaryCondition::dirichlet, build_radial_grid(65, 1.0), opts);
  REQUIRE(br.points.size() >= 3);
  CHECK(br.points.front().lambda > 0.0);
  for (std::size_t i = 1; i < br.points.size(); ++i)
    CHECK(br.points[i].lambda > br.points[i - 1].lambda);
  // the unique small-lambda Dirichlet solution is positive and centered
  for (const BranchPoint& p : br.points) CHECK(p.u_center > 0.0);
}

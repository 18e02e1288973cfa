#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "kslab/steady.hpp"

namespace kslab {

struct BranchPoint {
  double lambda = 0.0;
  double arclength = 0.0;
  double sup_dev = 0.0;   ///< sup |u - mean(u)|
  double u_center = 0.0;  ///< u(0)
  int stability_index = -1;
  bool fold = false;  ///< d lambda / ds changes sign at this point
  Field u;
};

struct Branch {
  std::vector<BranchPoint> points;
  double lambda_star = 0.0;  ///< detected constant-branch instability (Neumann), 0 otherwise
  std::string termination;
};

struct ContinuationOptions {
  double ds = 0.5;
  std::size_t max_points = 10;
  double tol = 1e-10;
  double lambda_min = 0.0;
  double lambda_max = 1e9;
  double branch_switch_eps = 1e-2;  ///< eigenfunction predictor amplitude
  bool with_stability = true;
  int direction = +1;  ///< sign of the center deviation of the first predictor
};

/// Smallest lambda in [lo, hi] where the constant Neumann solution
/// u = lambda/(beta |B|) loses linear stability, located by bisection on the
/// stability index.  Throws numerical_error if the index does not flip in the
/// window.
double find_constant_branch_instability(double beta, const RadialGrid& grid, double lo, double hi);

/// Pseudo-arclength continuation of the steady problem.
///
/// Neumann: detects the constant-branch instability in [lambda_min,
/// lambda_max], switches onto the nonconstant branch with a first-eigenfunction
/// predictor, and follows it.  Dirichlet: starts from the trivial solution at
/// lambda = 0 and continues toward lambda_max.  Every accepted point is
/// Newton-polished to opts.tol and re-verified before being stored.
Branch continue_branch(double beta, BoundaryCondition bc, const RadialGrid& grid,
                       const ContinuationOptions& opts);

}  // namespace kslab

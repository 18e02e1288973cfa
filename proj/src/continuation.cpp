#include "kslab/continuation.hpp"

#include <cmath>

#include "kslab/errors.hpp"

namespace kslab {

namespace {

Field constant_field(const RadialGrid& g, double c) { return Field(g.n(), c); }

// Jacobian pieces at (u, lambda) in the shape continuation needs: the banded
// part T, the rank-one vectors a, b, and F_lambda.
struct ExtendedSystem {
  Tridiagonal T;
  std::vector<double> a, b, f_lambda;
};

ExtendedSystem assemble(const ProblemSpec& spec, const Field& u) {
  const RadialGrid& g = spec.grid;
  const std::size_t n = g.n();
  const Field p = density(g, u);
  ExtendedSystem sys;
  sys.T = radial_laplacian(g, spec.bc);
  sys.a.assign(n, 0.0);
  sys.b.assign(n, 0.0);
  sys.f_lambda.assign(n, 0.0);
  const bool dir = spec.bc == BoundaryCondition::dirichlet;
  const std::size_t last = dir ? n - 1 : n;
  for (std::size_t i = 0; i < last; ++i) {
    sys.T.diag[i] += -spec.beta + spec.lambda * p[i];
    sys.a[i] = p[i];
    sys.f_lambda[i] = p[i];
  }
  for (std::size_t j = 0; j < n; ++j) sys.b[j] = -spec.lambda * g.w[j] * p[j];
  if (dir) sys.T.diag[n - 1] = 1.0;
  return sys;
}

// Tangents and the arclength constraint live in the quadrature inner product
// on the u-component; constants are then orthogonal to the bifurcating
// eigenfunction and the branch switch cannot slide back onto the constant
// family.
double wdot(const RadialGrid& g, const Field& x, const Field& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += g.w[i] * x[i] * y[i];
  return s;
}

struct Tangent {
  Field u;
  double lambda = 0.0;
};

double tangent_dot(const RadialGrid& g, const Tangent& t, const Field& du, double dl) {
  return wdot(g, t.u, du) + t.lambda * dl;
}

void normalize(const RadialGrid& g, Tangent& t) {
  const double nrm = std::sqrt(wdot(g, t.u, t.u) + t.lambda * t.lambda);
  if (!(nrm > 0.0)) throw numerical_error("continuation: zero tangent");
  for (double& x : t.u) x /= nrm;
  t.lambda /= nrm;
}

struct CorrectorResult {
  bool ok = false;
  Field u;
  double lambda = 0.0;
  double residual_norm = 0.0;
};

// Newton on the bordered system
//   [J        F_lambda] [du]   [-F]
//   [t_u^T W  t_lambda] [dl] = [-N]
// solved by block elimination with two Sherman-Morrison solves per iteration.
CorrectorResult correct(ProblemSpec spec, Field u, double lambda, const Tangent& tan,
                        const Field& u_pred, double lambda_pred, double tol,
                        std::size_t max_iter) {
  const RadialGrid& g = spec.grid;
  CorrectorResult out;
  constexpr double kEps = 2.220446049250313e-16;
  for (std::size_t it = 0; it < max_iter; ++it) {
    spec.lambda = lambda;
    Field res = residual(spec, u);
    const double rnorm = sup_norm(res);
    const double eff_tol = std::max(tol, 2.0 * kEps * residual_scale(spec, u));
    Field du_off(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) du_off[i] = u[i] - u_pred[i];
    const double N = tangent_dot(g, tan, du_off, lambda - lambda_pred);
    if (rnorm <= eff_tol && std::abs(N) <= eff_tol * (1.0 + std::abs(lambda))) {
      out.ok = true;
      out.u = u;
      out.lambda = lambda;
      out.residual_norm = rnorm;
      return out;
    }
    ExtendedSystem sys = assemble(spec, u);
    RankOneUpdatedSolver solver(sys.T, sys.a, sys.b, true);
    if (solver.near_singular(1e14)) return out;
    Field rhs(res.size());
    for (std::size_t i = 0; i < res.size(); ++i) rhs[i] = -res[i];
    const Field y = solver.solve(rhs);
    const Field z = solver.solve(sys.f_lambda);
    const double denom = tan.lambda - tangent_dot(g, tan, z, 0.0);
    if (std::abs(denom) < 1e-300) return out;
    const double dl = (-N - tangent_dot(g, tan, y, 0.0)) / denom;
    for (std::size_t i = 0; i < u.size(); ++i) u[i] += y[i] - dl * z[i];
    lambda += dl;
    if (!all_finite(u) || !std::isfinite(lambda)) return out;
  }
  return out;
}

// New unit tangent at (u, lambda), oriented along the previous one.
Tangent next_tangent(const ProblemSpec& spec, const Field& u, const Tangent& prev) {
  const RadialGrid& g = spec.grid;
  ExtendedSystem sys = assemble(spec, u);
  RankOneUpdatedSolver solver(sys.T, sys.a, sys.b, true);
  if (solver.near_singular(1e14)) return prev;
  const Field z = solver.solve(sys.f_lambda);
  const double denom = prev.lambda - tangent_dot(g, prev, z, 0.0);
  if (std::abs(denom) < 1e-300) return prev;  // exactly at a fold; keep direction
  Tangent t;
  t.lambda = 1.0 / denom;
  t.u.resize(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) t.u[i] = -t.lambda * z[i];
  normalize(g, t);
  if (tangent_dot(g, t, prev.u, prev.lambda) < 0.0) {
    for (double& x : t.u) x = -x;
    t.lambda = -t.lambda;
  }
  return t;
}

BranchPoint make_point(const ProblemSpec& spec, const Field& u, double arclength,
                       bool with_stability) {
  BranchPoint p;
  p.lambda = spec.lambda;
  p.arclength = arclength;
  p.u = u;
  const double mean = spec.grid.mean(u);
  double dev = 0.0;
  for (double v : u) dev = std::max(dev, std::abs(v - mean));
  p.sup_dev = dev;
  p.u_center = u.front();
  if (with_stability) p.stability_index = linear_stability_at(spec, u).stability_index;
  return p;
}

}  // namespace

double find_constant_branch_instability(double beta, const RadialGrid& grid, double lo,
                                        double hi) {
  if (!(beta > 0.0)) throw config_error("find_constant_branch_instability: beta must be positive");
  if (!(lo < hi)) throw config_error("find_constant_branch_instability: empty window");
  ProblemSpec spec;
  spec.beta = beta;
  spec.bc = BoundaryCondition::neumann;
  spec.grid = grid;
  auto index_at = [&](double lam) {
    spec.lambda = lam;
    const Field c = constant_field(grid, lam / (beta * grid.area()));
    return linear_stability_at(spec, c, 1).stability_index;
  };
  int ilo = index_at(lo);
  if (ilo != 0) throw numerical_error("constant branch already unstable at window start");
  if (index_at(hi) == 0) throw numerical_error("constant branch still stable at window end");
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (index_at(mid) == 0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-10 * hi) break;
  }
  return 0.5 * (lo + hi);
}

Branch continue_branch(double beta, BoundaryCondition bc, const RadialGrid& grid,
                       const ContinuationOptions& opts) {
  if (!(opts.ds > 0.0)) throw config_error("continue_branch: ds must be positive");
  if (!(opts.lambda_min < opts.lambda_max)) throw config_error("continue_branch: empty range");
  Branch branch;
  ProblemSpec spec;
  spec.beta = beta;
  spec.bc = bc;
  spec.grid = grid;

  Field u_prev;
  double lambda_prev = 0.0;
  Tangent tan;

  if (bc == BoundaryCondition::neumann) {
    branch.lambda_star =
        find_constant_branch_instability(beta, grid, opts.lambda_min, opts.lambda_max);
    const double lam_star = branch.lambda_star;
    spec.lambda = lam_star;
    const Field u_const = constant_field(grid, lam_star / (beta * grid.area()));

    // Null eigenfunction of the linearization at the constant.
    ExtendedSystem sys = assemble(spec, u_const);
    Field phi = inverse_iteration(sys.T, sys.a, sys.b, 0.0);
    if (phi.front() * static_cast<double>(opts.direction) < 0.0)
      for (double& x : phi) x = -x;

    // Branch switch by natural-parameter Newton just off the bifurcation: the
    // bordered solve degenerates exactly at the constant (the tangent has no
    // lambda component), so the first nonconstant point is located directly
    // from the eigenfunction predictor and the arclength tangent is taken as
    // the secant from the constant.
    bool switched = false;
    for (double frac : {2e-3, 5e-3, 1e-2, 2e-2}) {
      for (double sign : {-1.0, 1.0}) {
        const double lam = lam_star * (1.0 + sign * frac);
        if (lam < opts.lambda_min || lam > opts.lambda_max) continue;
        spec.lambda = lam;
        Field init = constant_field(grid, lam / (beta * grid.area()));
        for (std::size_t i = 0; i < init.size(); ++i)
          init[i] += opts.branch_switch_eps * phi[i];
        const SolveReport rep = newton_solve(spec, init, opts.tol);
        if (!rep.ok()) continue;
        const double mean = grid.mean(rep.solution.u);
        double dev = 0.0;
        for (double v : rep.solution.u) dev = std::max(dev, std::abs(v - mean));
        if (dev < 0.25 * opts.branch_switch_eps) continue;  // fell back onto the constant
        u_prev = rep.solution.u;
        lambda_prev = lam;
        tan.u.resize(grid.n());
        for (std::size_t i = 0; i < grid.n(); ++i) tan.u[i] = u_prev[i] - u_const[i];
        tan.lambda = lam - lam_star;
        normalize(grid, tan);
        switched = true;
        break;
      }
      if (switched) break;
    }
    if (!switched) {
      branch.termination = "branch switch failed near the bifurcation";
      return branch;
    }
    BranchPoint first = make_point(spec, u_prev, 0.0, opts.with_stability);
    branch.points.push_back(std::move(first));
  } else {
    lambda_prev = 0.0;
    spec.lambda = 0.0;
    u_prev = constant_field(grid, 0.0);
    tan.u.assign(grid.n(), 0.0);
    tan.lambda = 1.0;
    tan = next_tangent(spec, u_prev, tan);
  }

  double ds = opts.ds;
  double arclength = 0.0;
  double prev_tan_lambda = tan.lambda;

  while (branch.points.size() < opts.max_points) {
    bool stepped = false;
    while (ds > 1e-8) {
      Field u_pred(u_prev.size());
      for (std::size_t i = 0; i < u_prev.size(); ++i) u_pred[i] = u_prev[i] + ds * tan.u[i];
      const double lambda_pred = lambda_prev + ds * tan.lambda;
      CorrectorResult c =
          correct(spec, u_pred, lambda_pred, tan, u_pred, lambda_pred, opts.tol, 16);
      if (c.ok) {
        spec.lambda = c.lambda;
        SolveReport rep = newton_solve(spec, c.u, opts.tol);  // polish and re-verify
        if (rep.ok() && bc == BoundaryCondition::neumann) {
          // near the transcritical point a long step can hop onto the constant
          // family; reject and retry shorter
          const double mean = grid.mean(rep.solution.u);
          double dev = 0.0;
          for (double v : rep.solution.u) dev = std::max(dev, std::abs(v - mean));
          if (dev < 0.25 * opts.branch_switch_eps) rep.status = SolveStatus::diverged;
        }
        if (rep.ok()) {
          Field diff(u_prev.size());
          for (std::size_t i = 0; i < u_prev.size(); ++i)
            diff[i] = rep.solution.u[i] - u_prev[i];
          arclength += std::sqrt(wdot(grid, diff, diff) +
                                 (c.lambda - lambda_prev) * (c.lambda - lambda_prev));
          u_prev = rep.solution.u;
          lambda_prev = c.lambda;
          BranchPoint pt = make_point(spec, u_prev, arclength, opts.with_stability);
          tan = next_tangent(spec, u_prev, tan);
          pt.fold = (tan.lambda * prev_tan_lambda < 0.0);
          prev_tan_lambda = tan.lambda;
          branch.points.push_back(std::move(pt));
          stepped = true;
          ds = std::min(ds * 1.3, opts.ds * 4.0);
          break;
        }
      }
      ds *= 0.5;
    }
    if (!stepped) {
      branch.termination = "step size underflow";
      return branch;
    }
    if (lambda_prev < opts.lambda_min || lambda_prev > opts.lambda_max) {
      branch.termination = "lambda left the continuation window";
      return branch;
    }
  }
  branch.termination = "max points reached";
  return branch;
}

}  // namespace kslab

#include "kslab/steady.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kslab/bessel.hpp"
#include "kslab/errors.hpp"

namespace kslab {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_dirichlet(const ProblemSpec& s) { return s.bc == BoundaryCondition::dirichlet; }

}  // namespace

void ProblemSpec::validate() const {
  if (!(beta > 0.0)) throw config_error("spec: beta must be positive");
  if (!(lambda >= 0.0)) throw config_error("spec: lambda must be nonnegative");
  validate_grid(grid);
}

double log_int_exp(const RadialGrid& g, const Field& u) {
  if (u.size() != g.n()) throw config_error("log_int_exp: field size mismatch");
  if (!all_finite(u)) throw numerical_error("log_int_exp: non-finite field values");
  const double m = *std::max_element(u.begin(), u.end());
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += g.w[i] * std::exp(u[i] - m);
  return m + std::log(s);
}

Field density(const RadialGrid& g, const Field& u) {
  const double ls = log_int_exp(g, u);
  Field p(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) p[i] = std::exp(u[i] - ls);
  return p;
}

Tridiagonal radial_laplacian(const RadialGrid& g, BoundaryCondition bc) {
  const std::size_t n = g.n();
  Tridiagonal L = Tridiagonal::zero(n);
  const double two_pi = 2.0 * kPi;
  // flux coefficient through face i: 2*pi*face_r[i] / (r[i+1]-r[i])
  const std::size_t last = (bc == BoundaryCondition::dirichlet) ? n - 1 : n;
  for (std::size_t i = 0; i < last; ++i) {
    if (i + 1 < n) {  // outer face
      const double c = two_pi * g.face_r[i] / (g.r[i + 1] - g.r[i]) / g.w[i];
      L.diag[i] -= c;
      L.upper[i] += c;
    }
    if (i > 0) {  // inner face
      const double c = two_pi * g.face_r[i - 1] / (g.r[i] - g.r[i - 1]) / g.w[i];
      L.diag[i] -= c;
      L.lower[i - 1] += c;
    }
  }
  return L;
}

Field apply_radial_laplacian(const RadialGrid& g, BoundaryCondition bc, const Field& u) {
  const std::size_t n = g.n();
  if (u.size() != n) throw config_error("laplacian: field off-grid");
  std::vector<double> flux(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i)
    flux[i] = 2.0 * kPi * g.face_r[i] * (u[i + 1] - u[i]) / (g.r[i + 1] - g.r[i]);
  Field out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double outgoing = (i + 1 < n) ? flux[i] : 0.0;
    const double incoming = (i > 0) ? flux[i - 1] : 0.0;
    out[i] = (outgoing - incoming) / g.w[i];
  }
  if (bc == BoundaryCondition::dirichlet) out[n - 1] = 0.0;
  return out;
}

Field residual(const ProblemSpec& spec, const Field& u) {
  const RadialGrid& g = spec.grid;
  const std::size_t n = g.n();
  if (u.size() != n) throw config_error("residual: field defined on a different grid");
  if (!all_finite(u)) throw numerical_error("residual: non-finite field values");
  const Field p = density(g, u);
  Field res = apply_radial_laplacian(g, spec.bc, u);
  for (std::size_t i = 0; i < n; ++i) res[i] += -spec.beta * u[i] + spec.lambda * p[i];
  if (is_dirichlet(spec)) res[n - 1] = u[n - 1];
  return res;
}

double residual_scale(const ProblemSpec& spec, const Field& u) {
  // Operator-norm bound: the stencil coefficients amplify last-bit noise in u,
  // so the attainable floor is ~ eps * max_i |row_i| * (1 + |u|).
  const RadialGrid& g = spec.grid;
  const std::size_t n = g.n();
  const Field p = density(g, u);
  double scale = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    double coeff = 0.0;
    if (i + 1 < n) coeff += 2.0 * kPi * g.face_r[i] / (g.r[i + 1] - g.r[i]) / g.w[i];
    if (i > 0) coeff += 2.0 * kPi * g.face_r[i - 1] / (g.r[i] - g.r[i - 1]) / g.w[i];
    const double level = 1.0 + std::abs(u[i]);
    scale = std::max(scale, 2.0 * coeff * level + spec.beta * std::abs(u[i]) +
                                spec.lambda * p[i]);
  }
  return scale;
}

namespace {

// Tridiagonal part of the Jacobian plus the rank-one vectors a, b such that
// J = T + a b^T.
struct JacobianParts {
  Tridiagonal T;
  std::vector<double> a, b;
};

JacobianParts assemble_jacobian(const ProblemSpec& spec, const Field& p) {
  const RadialGrid& g = spec.grid;
  const std::size_t n = g.n();
  JacobianParts J;
  J.T = radial_laplacian(g, spec.bc);
  J.a.assign(n, 0.0);
  J.b.assign(n, 0.0);
  const bool dir = is_dirichlet(spec);
  const std::size_t last = dir ? n - 1 : n;
  for (std::size_t i = 0; i < last; ++i) {
    J.T.diag[i] += -spec.beta + spec.lambda * p[i];
    J.a[i] = p[i];
  }
  for (std::size_t j = 0; j < n; ++j) J.b[j] = -spec.lambda * g.w[j] * p[j];
  if (dir) J.T.diag[n - 1] = 1.0;  // trace row u(R) = 0
  return J;
}

double mass_identity_abs_error(const ProblemSpec& spec, const Field& u) {
  return std::abs(spec.beta * spec.grid.integrate(u) - spec.lambda);
}

// Positivity required of converged solutions: Neumann everywhere, Dirichlet at
// interior nodes when lambda > 0.
bool positivity_holds(const ProblemSpec& spec, const Field& u) {
  const std::size_t n = u.size();
  if (is_dirichlet(spec)) {
    if (spec.lambda <= 0.0) return true;
    for (std::size_t i = 0; i + 1 < n; ++i)
      if (!(u[i] > 0.0)) return false;
    return true;
  }
  for (double v : u)
    if (!(v > 0.0)) return false;
  return true;
}

}  // namespace

SolveReport newton_solve(const ProblemSpec& spec, const Field& init, double tol) {
  NewtonOptions opts;
  opts.tol = tol;
  return newton_solve(spec, init, opts);
}

SolveReport newton_solve(const ProblemSpec& spec, const Field& init, const NewtonOptions& opts) {
  spec.validate();
  if (!(opts.tol > 0.0)) throw config_error("newton_solve: tolerance must be positive");
  if (init.size() != spec.grid.n()) throw config_error("newton_solve: init on a different grid");
  if (!all_finite(init)) throw config_error("newton_solve: init has non-finite values");

  SolveReport rep;
  Field u = init;
  Field res = residual(spec, u);
  double rnorm = sup_norm(res);

  // Sup-norm residuals cannot drop below the roundoff of their largest terms;
  // accept the floor when the requested tolerance is tighter than attainable.
  constexpr double kEps = 2.220446049250313e-16;
  auto effective_tol = [&](const Field& at) {
    return std::max(opts.tol, 2.0 * kEps * residual_scale(spec, at));
  };

  for (std::size_t it = 0; it < opts.max_iter; ++it) {
    if (rnorm <= opts.tol) break;  // stalls at the attainable floor are accepted below
    const Field p = density(spec.grid, u);
    JacobianParts J = assemble_jacobian(spec, p);
    RankOneUpdatedSolver solver(J.T, J.a, J.b, true);
    if (solver.near_singular(opts.condition_threshold)) {
      rep.status = SolveStatus::near_singular;
      rep.iterations = it;
      rep.final_residual = rnorm;
      rep.message = "Jacobian nearly singular (condition estimate above threshold); "
                    "bifurcation suspected";
      return rep;
    }
    Field rhs(res.size());
    for (std::size_t i = 0; i < res.size(); ++i) rhs[i] = -res[i];
    const Field step = solver.solve(rhs);

    // Backtracking on the residual sup-norm.
    double alpha = 1.0;
    Field u_new(u.size());
    double rnorm_new = 0.0;
    bool accepted = false;
    for (int bt = 0; bt < 30; ++bt) {
      for (std::size_t i = 0; i < u.size(); ++i) u_new[i] = u[i] + alpha * step[i];
      if (all_finite(u_new)) {
        Field res_new = residual(spec, u_new);
        rnorm_new = sup_norm(res_new);
        if (std::isfinite(rnorm_new) &&
            (rnorm_new < rnorm || rnorm_new <= effective_tol(u_new))) {
          u = u_new;
          res = std::move(res_new);
          rnorm = rnorm_new;
          accepted = true;
          break;
        }
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      if (rnorm <= effective_tol(u)) break;  // stalled at the roundoff floor
      rep.status = SolveStatus::diverged;
      rep.iterations = it + 1;
      rep.final_residual = rnorm;
      rep.message = "line search stalled";
      return rep;
    }
    rep.iterations = it + 1;
  }

  rep.final_residual = rnorm;
  if (!(rnorm <= effective_tol(u))) {
    rep.status = SolveStatus::max_iterations;
    rep.message = "residual above tolerance after max iterations";
    return rep;
  }

  SteadySolution sol;
  sol.spec = spec;
  sol.u = u;
  sol.residual_norm = rnorm;
  sol.mass_identity_error = is_dirichlet(spec) ? 0.0 : mass_identity_abs_error(spec, u);
  rep.solution = sol;
  rep.status = SolveStatus::converged;

  if (opts.check_invariants) {
    if (!positivity_holds(spec, u)) {
      rep.status = SolveStatus::invariant_violation;
      rep.message = "converged solution violates positivity";
      return rep;
    }
    if (!is_dirichlet(spec) && spec.lambda > 0.0 &&
        sol.mass_identity_error > 1e-8 * std::max(1.0, spec.lambda)) {
      rep.status = SolveStatus::invariant_violation;
      rep.message = "converged solution violates the mass identity";
      return rep;
    }
  }
  return rep;
}

StabilityReport linear_stability_at(const ProblemSpec& spec, const Field& u, std::size_t k) {
  const RadialGrid& g = spec.grid;
  const std::size_t n = g.n();
  const Field p = density(g, u);
  JacobianParts J = assemble_jacobian(spec, p);

  // Dirichlet: eigenproblem on the interior block, the trace node is pinned.
  const std::size_t m = is_dirichlet(spec) ? n - 1 : n;

  // Similarity transform with W^{1/2} makes the operator symmetric:
  // M = W^{1/2} (T + a b^T) W^{-1/2}.
  std::vector<double> sqw(m);
  for (std::size_t i = 0; i < m; ++i) sqw[i] = std::sqrt(g.w[i]);
  std::vector<double> M(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    M[i * m + i] = J.T.diag[i];
    if (i + 1 < m) {
      const double off = J.T.upper[i] * sqw[i] / sqw[i + 1];
      M[i * m + i + 1] = off;
      M[(i + 1) * m + i] = off;
    }
  }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) M[i * m + j] += J.a[i] * J.b[j] * sqw[i] / sqw[j];
  // Symmetrize away the last-bit asymmetry of the rank-one term.
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      const double v = 0.5 * (M[i * m + j] + M[j * m + i]);
      M[i * m + j] = v;
      M[j * m + i] = v;
    }

  std::vector<double> ev = symmetric_eigenvalues(std::move(M), m);  // ascending
  StabilityReport rep;
  double scale = 0.0;
  for (double e : ev) scale = std::max(scale, std::abs(e));
  const double tol = 1e-10 * std::max(1.0, scale);
  for (double e : ev)
    if (e > tol) ++rep.stability_index;
  const std::size_t kk = std::min(k, ev.size());
  rep.eigenvalues.assign(ev.rbegin(), ev.rbegin() + static_cast<std::ptrdiff_t>(kk));
  return rep;
}

StabilityReport linear_stability(const SteadySolution& sol, std::size_t k) {
  return linear_stability_at(sol.spec, sol.u, k);
}

double bifurcation_lambda_star(double beta, std::size_t k, double R) {
  if (!(beta > 0.0)) throw config_error("bifurcation_lambda_star: beta must be positive");
  if (k < 1) throw config_error("bifurcation_lambda_star: mode index must be >= 1");
  const double jp = bessel_j0_prime_zero(k) / R;
  return kPi * R * R * (beta + jp * jp);
}

ShiftedField shift_to_zero_mean(const SteadySolution& sol) {
  if (sol.spec.bc != BoundaryCondition::neumann)
    throw config_error("shift_to_zero_mean: only meaningful for Neumann solutions");
  const RadialGrid& g = sol.spec.grid;
  ShiftedField out;
  out.mean_value = g.mean(sol.u);
  out.U.resize(sol.u.size());
  for (std::size_t i = 0; i < sol.u.size(); ++i) out.U[i] = sol.u[i] - out.mean_value;
  out.integral_U = g.integrate(out.U);

  // Residual of the equivalent zero-mean form
  //   Lap U - beta U + lambda (e^U/int e^U - 1/|B|) = 0.
  const Field p = density(g, out.U);
  Field res = apply_radial_laplacian(g, BoundaryCondition::neumann, out.U);
  const double inv_area = 1.0 / g.area();
  for (std::size_t i = 0; i < res.size(); ++i)
    res[i] += -sol.spec.beta * out.U[i] + sol.spec.lambda * (p[i] - inv_area);
  out.shifted_residual_norm = sup_norm(res);
  return out;
}

}  // namespace kslab

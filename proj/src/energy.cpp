#include "kslab/energy.hpp"

#include <cmath>
#include <numbers>

#include "kslab/errors.hpp"
#include "kslab/linalg.hpp"
#include "kslab/steady.hpp"

namespace kslab {

namespace {

constexpr double kPi = std::numbers::pi;

double weighted_dot(const RadialGrid& g, const Field& a, const Field& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += g.w[i] * a[i] * b[i];
  return s;
}

}  // namespace

double evaluate_J(const RadialGrid& g, const Field& u, double lambda, double beta) {
  if (u.size() != g.n()) throw config_error("evaluate_J: field off-grid");
  if (!all_finite(u)) throw numerical_error("evaluate_J: non-finite field");
  double grad = 0.0;
  for (std::size_t i = 0; i + 1 < g.n(); ++i) {
    const double h = g.r[i + 1] - g.r[i];
    const double du = u[i + 1] - u[i];
    grad += 2.0 * kPi * g.face_r[i] * du * du / h;
  }
  double quad = 0.0;
  for (std::size_t i = 0; i < g.n(); ++i) quad += g.w[i] * u[i] * u[i];
  return 0.5 * grad + 0.5 * beta * quad - lambda * log_int_exp(g, u);
}

Field gradient_J(const RadialGrid& g, const Field& u, double lambda, double beta) {
  const Field p = density(g, u);
  Field grad = apply_radial_laplacian(g, BoundaryCondition::neumann, u);
  for (std::size_t i = 0; i < g.n(); ++i) grad[i] = -grad[i] + beta * u[i] - lambda * p[i];
  return grad;
}

EnergyReport energy_report(const RadialGrid& g, const Field& u, double lambda, double beta) {
  EnergyReport rep;
  rep.value = evaluate_J(g, u, lambda, beta);
  rep.gradient = gradient_J(g, u, lambda, beta);
  rep.gradient_sup = sup_norm(rep.gradient);
  return rep;
}

MinimizeReport minimize_J(const RadialGrid& g, double lambda, double beta, unsigned symmetry_m,
                          const Field& init, const MinimizeOptions& opts) {
  if (!(beta > 0.0)) throw config_error("minimize_J: beta must be positive");
  if (!(lambda >= 0.0)) throw config_error("minimize_J: lambda must be nonnegative");
  if (symmetry_m != 0 && symmetry_m < 2)
    throw config_error("minimize_J: rotation order must be >= 2 (or 0 for the trivial group)");
  if (init.size() != g.n()) throw config_error("minimize_J: init off-grid");

  MinimizeReport rep;
  rep.boundedness_warning = lambda > 8.0 * kPi;
  if (rep.boundedness_warning)
    rep.note = "lambda above 8 pi: the functional may be unbounded below; exploratory run";

  // Preconditioner (-Lap + beta), factored once.
  Tridiagonal P = radial_laplacian(g, BoundaryCondition::neumann);
  for (std::size_t i = 0; i < g.n(); ++i) P.diag[i] = beta - P.diag[i];
  for (std::size_t i = 0; i + 1 < g.n(); ++i) {
    P.upper[i] = -P.upper[i];
    P.lower[i] = -P.lower[i];
  }
  const TridiagonalFactor precond(P);

  Field u = init;
  double J = evaluate_J(g, u, lambda, beta);
  for (std::size_t it = 0; it < opts.max_iter; ++it) {
    Field grad = gradient_J(g, u, lambda, beta);
    const double gsup = sup_norm(grad);
    rep.trace.push_back({it, J, gsup});
    if (gsup <= opts.tol) {
      rep.converged = true;
      rep.iterations = it;
      break;
    }
    const Field dir = precond.solve(grad);
    const double slope = weighted_dot(g, grad, dir);  // > 0: SPD preconditioner
    if (slope <= 16.0 * 2.220446049250313e-16 * (1.0 + std::abs(J))) {
      // the model decrease is below the roundoff of J itself: nothing left to gain
      rep.converged = true;
      rep.iterations = it;
      rep.note = "stopped at the energy roundoff floor";
      break;
    }
    double alpha = opts.initial_step;
    bool accepted = false;
    Field trial(u.size());
    for (int bt = 0; bt < 60; ++bt) {
      for (std::size_t i = 0; i < u.size(); ++i) trial[i] = u[i] - alpha * dir[i];
      const double Jt = evaluate_J(g, trial, lambda, beta);
      if (Jt <= J - opts.armijo_slope * alpha * slope) {
        u = trial;
        J = Jt;
        accepted = true;
        break;
      }
      alpha *= opts.shrink;
    }
    if (!accepted) {
      rep.note = "descent stagnated (no Armijo step)";
      rep.iterations = it;
      break;
    }
  }
  if (!rep.converged && rep.iterations == 0) rep.iterations = opts.max_iter;
  rep.u = u;
  rep.value = J;
  rep.gradient_sup = sup_norm(gradient_J(g, u, lambda, beta));
  return rep;
}

}  // namespace kslab

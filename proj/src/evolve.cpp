#include "kslab/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "kslab/errors.hpp"
#include "kslab/linalg.hpp"

namespace kslab {

namespace {

constexpr double kPi = std::numbers::pi;

// Conservative divergence of the chemotactic flux v * grad u: face fluxes
// F = 2 pi r_f v_f (du/dr)_f with zero boundary fluxes, divided by the cell
// area.  Central face average by default, upwind on request.
Field chemotaxis_divergence(const RadialGrid& g, const Field& v, const Field& u, bool upwind) {
  const std::size_t n = g.n();
  std::vector<double> flux(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = g.r[i + 1] - g.r[i];
    const double dudr = (u[i + 1] - u[i]) / h;
    double vf;
    if (upwind)
      vf = (dudr > 0.0) ? v[i] : v[i + 1];  // flux direction follows grad u
    else
      vf = 0.5 * (v[i] + v[i + 1]);
    flux[i] = 2.0 * kPi * g.face_r[i] * vf * dudr;
  }
  Field div(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double out = (i + 1 < n) ? flux[i] : 0.0;
    const double in = (i > 0) ? flux[i - 1] : 0.0;
    div[i] = (out - in) / g.w[i];
  }
  return div;
}

double cfl_limit(const RadialGrid& g, const Field& u, double safety) {
  double dt = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < g.n(); ++i) {
    const double h = g.r[i + 1] - g.r[i];
    const double vel = std::abs(u[i + 1] - u[i]) / h;
    if (vel > 0.0) dt = std::min(dt, safety * h / vel);
  }
  return dt;
}

}  // namespace

double total_mass(const RadialGrid& g, const EvolutionState& s) { return g.integrate(s.v); }

double free_energy(const RadialGrid& g, const EvolutionState& s, double beta) {
  const std::size_t n = g.n();
  double entropy = 0.0, coupling = 0.0, quad = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(s.v[i] > 0.0)) throw numerical_error("free_energy: nonpositive density");
    entropy += g.w[i] * s.v[i] * std::log(s.v[i]);
    coupling += g.w[i] * s.v[i] * s.u[i];
    quad += g.w[i] * s.u[i] * s.u[i];
  }
  double grad = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = g.r[i + 1] - g.r[i];
    const double du = s.u[i + 1] - s.u[i];
    grad += 2.0 * kPi * g.face_r[i] * du * du / h;
  }
  return entropy - coupling + 0.5 * (grad + beta * quad);
}

StepInfo step_imex(const RadialGrid& g, EvolutionState& s, double beta,
                   const EvolveOptions& opts) {
  const std::size_t n = g.n();
  if (s.v.size() != n || s.u.size() != n) throw config_error("step_imex: fields off-grid");
  const Tridiagonal L = radial_laplacian(g, BoundaryCondition::neumann);

  StepInfo info;
  double dt = std::min({s.dt, opts.dt_max, cfl_limit(g, s.u, opts.cfl_safety)});
  const double vscale = std::max(1.0, sup_norm(s.v));

  const Field div = chemotaxis_divergence(g, s.v, s.u, opts.upwind);

  for (int attempt = 0;; ++attempt) {
    if (dt < opts.dt_min) {
      info.blowup_signal = true;
      info.dt_taken = 0.0;
      return info;
    }
    // (I - dt Lap) v_new = v - dt div(v grad u)
    Tridiagonal Av = L;
    for (std::size_t i = 0; i < n; ++i) Av.diag[i] = 1.0 - dt * L.diag[i];
    for (std::size_t i = 0; i + 1 < n; ++i) {
      Av.upper[i] = -dt * L.upper[i];
      Av.lower[i] = -dt * L.lower[i];
    }
    Field rhs_v(n);
    for (std::size_t i = 0; i < n; ++i) rhs_v[i] = s.v[i] - dt * div[i];
    TridiagonalFactor fv(Av);
    Field v_new = fv.solve(rhs_v);

    double vmin = 0.0;
    for (double x : v_new) vmin = std::min(vmin, x);
    if (!all_finite(v_new) || vmin < -opts.negativity_tol * vscale) {
      dt *= 0.5;
      ++info.retries;
      if (attempt >= 40) {
        info.blowup_signal = true;
        return info;
      }
      continue;
    }

    // (I - dt (Lap - beta)) u_new = u + dt v_new
    Tridiagonal Au = L;
    for (std::size_t i = 0; i < n; ++i) Au.diag[i] = 1.0 + dt * beta - dt * L.diag[i];
    for (std::size_t i = 0; i + 1 < n; ++i) {
      Au.upper[i] = -dt * L.upper[i];
      Au.lower[i] = -dt * L.lower[i];
    }
    Field rhs_u(n);
    for (std::size_t i = 0; i < n; ++i) rhs_u[i] = s.u[i] + dt * v_new[i];
    TridiagonalFactor fu(Au);
    Field u_new = fu.solve(rhs_u);
    if (!all_finite(u_new)) {
      dt *= 0.5;
      ++info.retries;
      continue;
    }

    s.v = std::move(v_new);
    s.u = std::move(u_new);
    s.t += dt;
    s.dt = dt;
    info.dt_taken = dt;
    return info;
  }
}

TrajectorySummary run_to_equilibrium(const RadialGrid& g, const Field& v0, const Field& u0,
                                     double beta, double lambda, double T, double tol,
                                     const EvolveOptions& opts) {
  if (!(beta > 0.0)) throw config_error("run_to_equilibrium: beta must be positive");
  if (!(T > 0.0)) throw config_error("run_to_equilibrium: T must be positive");
  const double m0 = g.integrate(v0);
  if (std::abs(m0 - lambda) > 1e-10 * std::max(1.0, lambda))
    throw config_error("run_to_equilibrium: initial mass does not match lambda");

  const double v_eq = lambda / g.area();
  const double u_eq = lambda / (beta * g.area());

  EvolutionState s;
  s.v = v0;
  s.u = u0;
  s.dt = opts.dt_init;

  TrajectorySummary out;
  int clean = 0;
  auto record = [&]() {
    TrajectoryPoint p;
    p.t = s.t;
    p.mass = total_mass(g, s);
    double dv = 0.0, du = 0.0;
    for (std::size_t i = 0; i < g.n(); ++i) {
      dv = std::max(dv, std::abs(s.v[i] - v_eq));
      du = std::max(du, std::abs(s.u[i] - u_eq));
    }
    p.dev_v = dv;
    p.dev_u = du;
    bool pos = true;
    for (double x : s.v)
      if (!(x > 0.0)) pos = false;
    p.lyapunov = pos ? free_energy(g, s, beta) : std::numeric_limits<double>::quiet_NaN();
    out.samples.push_back(p);
    return p;
  };

  TrajectoryPoint p = record();
  while (s.t < T && out.steps < opts.max_steps) {
    StepInfo info = step_imex(g, s, beta, opts);
    if (info.blowup_signal) {
      out.outcome = EvolveOutcome::blowup_suspected;
      out.note = "time step collapsed";
      break;
    }
    ++out.steps;
    if (info.retries == 0) {
      if (++clean >= opts.clean_steps_for_growth) {
        s.dt = std::min(s.dt * opts.growth, opts.dt_max);
        clean = 0;
      }
    } else {
      clean = 0;
    }
    p = record();
    if (sup_norm(s.v) > opts.blowup_density_factor * v_eq) {
      out.outcome = EvolveOutcome::blowup_suspected;
      out.note = "density exceeded the blow-up threshold";
      break;
    }
    if (p.dev_u < tol) {
      out.outcome = EvolveOutcome::converged;
      break;
    }
  }
  if (out.outcome == EvolveOutcome::timeout && !(p.dev_u < tol)) out.note = "reached final time";

  double drift = 0.0;
  for (const TrajectoryPoint& q : out.samples)
    drift = std::max(drift, std::abs(q.mass - m0));
  out.mass_drift_rel = drift / std::max(1e-300, std::abs(m0));
  out.final_time = s.t;
  return out;
}

}  // namespace kslab

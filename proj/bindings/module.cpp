#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

#include "kslab/bubbles.hpp"
#include "kslab/census.hpp"
#include "kslab/continuation.hpp"
#include "kslab/energy.hpp"
#include "kslab/errors.hpp"
#include "kslab/evolve.hpp"
#include "kslab/geometry.hpp"
#include "kslab/levelset.hpp"
#include "kslab/rng.hpp"
#include "kslab/steady.hpp"
#include "kslab/version.hpp"

namespace py = pybind11;
using namespace kslab;

namespace {

BoundaryCondition parse_bc(const std::string& bc) {
  if (bc == "neumann") return BoundaryCondition::neumann;
  if (bc == "dirichlet") return BoundaryCondition::dirichlet;
  throw config_error("bc must be 'neumann' or 'dirichlet'");
}

ProblemSpec make_spec(const std::string& bc, double beta, double lambda, std::size_t n) {
  ProblemSpec spec;
  spec.bc = parse_bc(bc);
  spec.beta = beta;
  spec.lambda = lambda;
  spec.grid = build_radial_grid(n, 1.0);
  return spec;
}

py::dict solve_steady(const std::string& bc, double beta, double lambda, std::size_t n,
                      double tol, bool with_stability) {
  ProblemSpec spec = make_spec(bc, beta, lambda, n);
  Field init(spec.grid.n(), lambda / (beta * spec.grid.area()));
  if (spec.bc == BoundaryCondition::dirichlet)
    for (std::size_t i = 0; i < init.size(); ++i)
      init[i] *= 1.0 - spec.grid.r[i] * spec.grid.r[i];
  const SolveReport rep = newton_solve(spec, init, tol);
  py::dict out;
  out["converged"] = rep.ok();
  out["message"] = rep.message;
  out["residual"] = rep.final_residual;
  if (rep.ok()) {
    out["r"] = spec.grid.r;
    out["u"] = rep.solution.u;
    out["mass_identity_error"] = rep.solution.mass_identity_error;
    if (with_stability) out["stability_index"] = linear_stability(rep.solution).stability_index;
  }
  return out;
}

py::dict census(const std::string& bc, double beta, double lambda, std::size_t n,
                std::size_t starts, std::uint64_t seed) {
  CensusOptions opts;
  opts.n_starts = starts;
  opts.seed = seed;
  const CensusReport rep = multistart_census(make_spec(bc, beta, lambda, n), opts);
  py::dict out;
  out["distinct_count"] = rep.distinct_count;
  out["n_nonconverged"] = rep.n_nonconverged;
  py::list reps;
  for (const CensusCluster& c : rep.clusters) {
    py::dict d;
    d["count"] = c.count;
    d["u_center"] = c.representative.u.front();
    d["u"] = c.representative.u;
    reps.append(d);
  }
  out["representatives"] = reps;
  return out;
}

py::dict branch(double beta, const std::string& bc, std::size_t n, double lambda_min,
                double lambda_max, double ds, std::size_t max_points) {
  ContinuationOptions opts;
  opts.ds = ds;
  opts.max_points = max_points;
  opts.lambda_min = lambda_min;
  opts.lambda_max = lambda_max;
  const Branch br = continue_branch(beta, parse_bc(bc), build_radial_grid(n, 1.0), opts);
  py::dict out;
  out["lambda_star"] = br.lambda_star;
  out["termination"] = br.termination;
  std::vector<double> lam, dev, u0, arc;
  std::vector<int> index;
  std::vector<bool> fold;
  for (const BranchPoint& p : br.points) {
    lam.push_back(p.lambda);
    dev.push_back(p.sup_dev);
    u0.push_back(p.u_center);
    arc.push_back(p.arclength);
    index.push_back(p.stability_index);
    fold.push_back(p.fold);
  }
  out["lambda"] = lam;
  out["sup_dev"] = dev;
  out["u_center"] = u0;
  out["arclength"] = arc;
  out["stability_index"] = index;
  out["fold"] = fold;
  return out;
}

py::dict evolve(double beta, double lambda, std::size_t n, double T, double tol, double amp,
                std::uint64_t seed) {
  const RadialGrid grid = build_radial_grid(n, 1.0);
  SplitMix64 rng(seed);
  Field v0(grid.n()), u0(grid.n(), lambda / (beta * grid.area()));
  const double center = rng.uniform(0.2, 0.8);
  const double width = rng.uniform(0.1, 0.25);
  for (std::size_t i = 0; i < grid.n(); ++i) {
    const double d = (grid.r[i] - center) / width;
    v0[i] = (lambda / grid.area()) * (1.0 + amp * std::exp(-0.5 * d * d));
  }
  const double m = grid.integrate(v0);
  for (double& x : v0) x *= lambda / m;
  const TrajectorySummary traj = run_to_equilibrium(grid, v0, u0, beta, lambda, T, tol);
  py::dict out;
  out["outcome"] = traj.outcome == EvolveOutcome::converged        ? "converged"
                   : traj.outcome == EvolveOutcome::blowup_suspected ? "blowup_suspected"
                                                                     : "timeout";
  out["steps"] = traj.steps;
  out["mass_drift_rel"] = traj.mass_drift_rel;
  std::vector<double> t, dev_u, lyap;
  for (const TrajectoryPoint& p : traj.samples) {
    t.push_back(p.t);
    dev_u.push_back(p.dev_u);
    lyap.push_back(p.lyapunov);
  }
  out["t"] = t;
  out["dev_u"] = dev_u;
  out["lyapunov"] = lyap;
  return out;
}

py::dict verify_levelset(double beta, double lambda, std::size_t n, std::uint64_t seed) {
  (void)seed;
  ProblemSpec spec = make_spec("neumann", beta, lambda, n);
  const double cbar = lambda / (beta * spec.grid.area());
  // try center- and boundary-concentrated predictors of both signs, keep the
  // first nonconstant solution, else verify the constant (trivial table)
  Field u(spec.grid.n(), cbar);
  bool found = false;
  for (double center : {0.0, 1.0}) {
    for (double amp : {1.5, -1.5, 3.0, -3.0}) {
      Field init(spec.grid.n(), cbar);
      for (std::size_t i = 0; i < init.size(); ++i)
        init[i] += amp * std::exp(-0.5 * std::pow((spec.grid.r[i] - center) / 0.18, 2));
      const SolveReport rep = newton_solve(spec, init, 1e-11);
      if (!rep.ok()) continue;
      const double mean = spec.grid.mean(rep.solution.u);
      double dev = 0.0;
      for (double v : rep.solution.u) dev = std::max(dev, std::abs(v - mean));
      if (dev > 1e-3) {
        u = rep.solution.u;
        found = true;
        break;
      }
    }
    if (found) break;
  }
  const NonlinearityPair pair = make_pair(spec.grid, u, lambda, beta);
  const LevelSetTable tab = build_table(spec.grid, u, pair, 256);
  py::dict out;
  out["constant"] = tab.trivial;
  if (tab.trivial) return out;
  const std::vector<double> crossings = crossing_set(pair, tab.t1);
  out["crossings"] = crossings;
  out["A_f"] = pair.A_f;
  out["A_g"] = pair.A_g;
  const PsiMonotonicityReport mono = verify_monotone_psi(tab, crossings);
  out["worst_backward_step"] = mono.worst_backward_step;
  out["margin_isoperimetric"] =
      verify_integral_inequality(spec.grid, u, pair,
                                 InequalityVariant::isoperimetric)
          .margin;
  out["margin_perimeter"] = verify_integral_inequality(spec.grid, u, pair,
                                                       InequalityVariant::perimeter)
                                .margin;
  out["margin_rotation_bound_m2"] =
      verify_integral_inequality(spec.grid, u, pair,
                                 InequalityVariant::g_isoperimetric, 2)
          .margin;
  return out;
}

double bol_deficit_bubble(double theta, double r) {
  RadialProfile w;
  w.r_max = std::max(20.0, 2.0 * r);
  w.value = [theta](double s) { return bubble_value(theta, s); };
  return bol_deficit(w, r).deficit;
}

py::dict minimize_energy(double lambda, double beta, unsigned m, std::size_t n,
                         std::uint64_t seed, double tol) {
  const RadialGrid grid = build_radial_grid(n, 1.0);
  SplitMix64 rng(seed);
  Field init(grid.n(), lambda / (beta * grid.area()));
  const double amp = rng.uniform(-2.0, 2.0);
  const double center = rng.uniform(0.0, 1.0);
  const double width = rng.uniform(0.05, 0.3);
  for (std::size_t i = 0; i < grid.n(); ++i) {
    const double d = (grid.r[i] - center) / width;
    init[i] += amp * std::exp(-0.5 * d * d);
  }
  MinimizeOptions opts;
  opts.tol = tol;
  const MinimizeReport rep = minimize_J(grid, lambda, beta, m, init, opts);
  py::dict out;
  out["converged"] = rep.converged;
  out["value"] = rep.value;
  out["gradient_sup"] = rep.gradient_sup;
  out["u"] = rep.u;
  out["iterations"] = rep.iterations;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Keller-Segel equilibria on the disc: steady solves, continuation, "
            "level-set verification, bubbles, and evolution";
  m.attr("__version__") = KSLAB_VERSION;

  py::register_exception<config_error>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<numerical_error>(m, "NumericalError", PyExc_RuntimeError);
  py::register_exception<invariant_breach>(m, "InvariantBreach", PyExc_RuntimeError);

  m.def("lambda_threshold", &lambda_threshold, py::arg("m"),
        "uniqueness threshold for m-fold symmetric solutions on the unit disc");
  m.def("g_profile_ratio_bound", &g_profile_ratio_bound, py::arg("m"), py::arg("disc_area"),
        "lower bound of [I^G(s)]^2 / (s(|B|-s)) for the order-m rotation group");
  m.def("disc_isoperimetric_profile", &disc_isoperimetric_profile, py::arg("s"),
        py::arg("R") = 1.0, "relative isoperimetric profile of the disc");
  m.def("bifurcation_lambda_star", &bifurcation_lambda_star, py::arg("beta"),
        py::arg("k") = 1, py::arg("R") = 1.0,
        "predicted loss of stability of the constant branch");
  m.def("bubble_value", &bubble_value, py::arg("theta"), py::arg("r"));
  m.def("bubble_mass", &bubble_mass, py::arg("theta"), py::arg("r"));
  m.def("bol_deficit_bubble", &bol_deficit_bubble, py::arg("theta"), py::arg("r"),
        "isoperimetric deficit of the bubble metric (0 for the whole family)");

  m.def("solve_steady", &solve_steady, py::arg("bc"), py::arg("beta"), py::arg("lambda_"),
        py::arg("n") = 257, py::arg("tol") = 1e-12, py::arg("with_stability") = false);
  m.def("multistart_census", &census, py::arg("bc"), py::arg("beta"), py::arg("lambda_"),
        py::arg("n") = 193, py::arg("starts") = 20, py::arg("seed") = 1);
  m.def("continue_branch", &branch, py::arg("beta") = 1.0, py::arg("bc") = "neumann",
        py::arg("n") = 193, py::arg("lambda_min") = 30.0, py::arg("lambda_max") = 70.0,
        py::arg("ds") = 0.6, py::arg("max_points") = 6);
  m.def("run_evolution", &evolve, py::arg("beta"), py::arg("lambda_"), py::arg("n") = 129,
        py::arg("T") = 60.0, py::arg("tol") = 1e-4, py::arg("amp") = 0.1, py::arg("seed") = 1);
  m.def("verify_levelset", &verify_levelset, py::arg("beta") = 1.0, py::arg("lambda_") = 50.0,
        py::arg("n") = 193, py::arg("seed") = 1);
  m.def("minimize_energy", &minimize_energy, py::arg("lambda_"), py::arg("beta") = 1.0,
        py::arg("m") = 3, py::arg("n") = 97, py::arg("seed") = 1, py::arg("tol") = 1e-8);
}

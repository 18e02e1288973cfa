// Experiment runner: one subcommand per workflow, INI config files with
// command-line overrides, deterministic outputs for a fixed seed.
#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>

#include "kslab/bubbles.hpp"
#include "kslab/census.hpp"
#include "kslab/continuation.hpp"
#include "kslab/energy.hpp"
#include "kslab/errors.hpp"
#include "kslab/evolve.hpp"
#include "kslab/geometry.hpp"
#include "kslab/io.hpp"
#include "kslab/levelset.hpp"
#include "kslab/rng.hpp"
#include "kslab/steady.hpp"
#include "kslab/version.hpp"

namespace kslab {

namespace {

namespace fs = std::filesystem;
constexpr double kPi = std::numbers::pi;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitInvariant = 4;

struct CommonOpts {
  std::string outdir;
  std::size_t n = 257;
  double beta = 1.0;
  double lambda = kPi;
  std::uint64_t seed = 1;
  double tol = 1e-11;
  std::string bc = "neumann";
  double cluster = 0.0;
};

std::string timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y%m%d-%H%M%S", std::gmtime(&tt));
  return buf;
}

BoundaryCondition parse_bc(const std::string& bc) {
  if (bc == "neumann") return BoundaryCondition::neumann;
  if (bc == "dirichlet") return BoundaryCondition::dirichlet;
  throw config_error("bc must be neumann or dirichlet");
}

RadialGrid make_grid(const CommonOpts& c) {
  return c.cluster > 0.0 ? build_clustered_radial_grid(c.n, 1.0, c.cluster)
                         : build_radial_grid(c.n, 1.0);
}

// <outdir>/<command>-<timestamp>/ with params.txt; returns the directory.
fs::path open_run_dir(const std::string& command, const CommonOpts& c,
                      const std::vector<std::pair<std::string, std::string>>& extra) {
  fs::path root = c.outdir;
  fs::path dir = root / (command + "-" + timestamp());
  for (int k = 1; fs::exists(dir); ++k)
    dir = root / (command + "-" + timestamp() + "-" + std::to_string(k));
  fs::create_directories(dir);
  std::ofstream params(dir / "params.txt");
  params << "command = " << command << "\n";
  params << "version = " << KSLAB_VERSION << "\n";
  params << "timestamp = " << timestamp() << "\n";
  params << "bc = " << c.bc << "\n";
  params << "beta = " << format_double(c.beta) << "\n";
  params << "lambda = " << format_double(c.lambda) << "\n";
  params << "n = " << c.n << "\n";
  params << "seed = " << c.seed << "\n";
  params << "tol = " << format_double(c.tol) << "\n";
  for (const auto& [k, v] : extra) params << k << " = " << v << "\n";
  std::cout << "output: " << dir.string() << "\n";
  return dir;
}

std::vector<std::pair<std::string, std::string>> base_params(const std::string& command,
                                                             const CommonOpts& c) {
  return {{"cmd", command},
          {"version", KSLAB_VERSION},
          {"bc", c.bc},
          {"beta", format_double(c.beta)},
          {"lambda", format_double(c.lambda)},
          {"n", std::to_string(c.n)},
          {"seed", std::to_string(c.seed)},
          {"tol", format_double(c.tol)}};
}

void add_common(CLI::App* cmd, CommonOpts& c, bool with_lambda = true) {
  cmd->fallthrough();  // lets --config given after the subcommand reach the app
  const char* env_outdir = std::getenv("KSLAB_OUTDIR");
  c.outdir = env_outdir ? env_outdir : "kslab-out";
  cmd->add_option("--outdir", c.outdir, "output root directory");
  cmd->add_option("--n", c.n, "radial grid nodes")->check(CLI::Range(std::size_t{16}, std::size_t{100000}));
  cmd->add_option("--beta", c.beta, "chemical death rate");
  if (with_lambda) cmd->add_option("--lambda", c.lambda, "total mass");
  cmd->add_option("--seed", c.seed, "random seed");
  cmd->add_option("--tol", c.tol, "solver tolerance");
  cmd->add_option("--bc", c.bc, "boundary condition: neumann | dirichlet")
      ->check(CLI::IsMember({"neumann", "dirichlet"}));
  cmd->add_option("--cluster", c.cluster, "boundary clustering strength (0 = uniform)");
}


// Report stream stamped with the same parameter header as the CSVs.
std::ofstream open_report(const fs::path& path, const std::string& comment) {
  std::ofstream out(path);
  out << comment << "\n";
  return out;
}

int report_solve_failure(const SolveReport& rep) {
  std::cerr << "solve failed: " << rep.message << " (residual " << rep.final_residual << ")\n";
  return rep.status == SolveStatus::invariant_violation ? kExitInvariant : kExitNumerical;
}

// ---------------------------------------------------------------- steady ---

int run_steady(const CommonOpts& c, const std::string& from_csv) {
  ProblemSpec spec;
  spec.beta = c.beta;
  spec.lambda = c.lambda;
  spec.bc = parse_bc(c.bc);

  if (!from_csv.empty()) {
    auto [r, u] = read_solution_csv(from_csv);
    spec.grid = build_radial_grid_from_nodes(r);
    const double rnorm = sup_norm(residual(spec, u));
    std::cout << "replayed solution residual sup-norm: " << rnorm << "\n";
    if (rnorm > c.tol * 10.0) {
      std::cerr << "stored solution fails its residual check\n";
      return kExitInvariant;
    }
    return kExitOk;
  }

  spec.grid = make_grid(c);
  Field init(spec.grid.n(), spec.lambda / (spec.beta * spec.grid.area()));
  if (spec.bc == BoundaryCondition::dirichlet)
    for (std::size_t i = 0; i < init.size(); ++i)
      init[i] *= 1.0 - (spec.grid.r[i] / spec.grid.R) * (spec.grid.r[i] / spec.grid.R);
  SolveReport rep = newton_solve(spec, init, c.tol);
  if (!rep.ok()) return report_solve_failure(rep);

  const StabilityReport stab = linear_stability(rep.solution);
  rep.solution.stability_index = stab.stability_index;

  auto dir = open_run_dir("steady", c, {});
  write_solution_csv((dir / "solution.csv").string(), comment_header(base_params("steady", c)),
                     spec.grid, rep.solution.u);
  std::ofstream report = open_report(dir / "report.txt", comment_header(base_params("steady", c)));
  report << "residual_sup = " << format_double(rep.solution.residual_norm) << "\n"
         << "mass_identity_error = " << format_double(rep.solution.mass_identity_error) << "\n"
         << "stability_index = " << stab.stability_index << "\n"
         << "u_center = " << format_double(rep.solution.u.front()) << "\n"
         << "u_boundary = " << format_double(rep.solution.u.back()) << "\n";
  std::cout << "converged: residual " << rep.solution.residual_norm << ", index "
            << stab.stability_index << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- census ---

int run_census(const CommonOpts& c, std::size_t starts, double cluster_radius) {
  ProblemSpec spec;
  spec.beta = c.beta;
  spec.lambda = c.lambda;
  spec.bc = parse_bc(c.bc);
  spec.grid = make_grid(c);
  CensusOptions opts;
  opts.n_starts = starts;
  opts.seed = c.seed;
  opts.cluster_radius = cluster_radius;
  opts.tol = c.tol;
  const CensusReport rep = multistart_census(spec, opts);

  auto dir = open_run_dir("census", c, {{"starts", std::to_string(starts)},
                                        {"cluster_radius", format_double(cluster_radius)}});
  std::ofstream report = open_report(dir / "census.txt", comment_header(base_params("census", c)));
  report << "distinct_count = " << rep.distinct_count << "\n"
         << "n_starts = " << rep.n_starts << "\n"
         << "n_nonconverged = " << rep.n_nonconverged << "\n";
  for (std::size_t k = 0; k < rep.clusters.size(); ++k) {
    const auto& cl = rep.clusters[k];
    report << "cluster " << k << ": count = " << cl.count
           << ", u_center = " << format_double(cl.representative.u.front())
           << ", residual = " << format_double(cl.representative.residual_norm) << "\n";
    write_solution_csv((dir / ("representative-" + std::to_string(k) + ".csv")).string(),
                       comment_header(base_params("census", c)), spec.grid,
                       cl.representative.u);
  }
  std::cout << "distinct solutions: " << rep.distinct_count << " (" << rep.n_nonconverged
            << " starts did not converge)\n";
  return kExitOk;
}

// -------------------------------------------------------------- continue ---

int run_continue(const CommonOpts& c, double lambda_min, double lambda_max, double ds,
                 std::size_t max_points) {
  ContinuationOptions opts;
  opts.ds = ds;
  opts.max_points = max_points;
  opts.tol = std::max(c.tol, 1e-12);
  opts.lambda_min = lambda_min;
  opts.lambda_max = lambda_max;
  const RadialGrid grid = make_grid(c);
  const Branch branch = continue_branch(c.beta, parse_bc(c.bc), grid, opts);

  auto dir = open_run_dir("continue", c,
                          {{"lambda_min", format_double(lambda_min)},
                           {"lambda_max", format_double(lambda_max)},
                           {"ds", format_double(ds)},
                           {"max_points", std::to_string(max_points)}});
  std::vector<std::vector<double>> rows;
  for (const BranchPoint& p : branch.points)
    rows.push_back({p.lambda, p.arclength, p.sup_dev, p.u_center,
                    static_cast<double>(p.stability_index), p.fold ? 1.0 : 0.0});
  write_csv((dir / "branch.csv").string(), comment_header(base_params("continue", c)),
            {"lambda", "arclength", "sup_dev", "u0", "stability_index", "fold_flag"}, rows);

  if (!branch.points.empty()) {
    SvgSeries s;
    s.label = "branch";
    SvgOptions so;
    so.title = "bifurcation diagram";
    so.xlabel = "lambda";
    so.ylabel = "u(0)";
    so.annotation = "beta=" + format_double(c.beta) + " n=" + std::to_string(c.n);
    for (std::size_t i = 0; i < branch.points.size(); ++i) {
      s.x.push_back(branch.points[i].lambda);
      s.y.push_back(branch.points[i].u_center);
      if (branch.points[i].fold) so.marks.push_back(i);
    }
    if (branch.lambda_star > 0.0) so.vertical_lines.push_back(branch.lambda_star);
    svg_line_plot((dir / "branch.svg").string(), {s}, so);
  }
  std::ofstream report = open_report(dir / "report.txt", comment_header(base_params("continue", c)));
  report << "points = " << branch.points.size() << "\n"
         << "lambda_star = " << format_double(branch.lambda_star) << "\n"
         << "termination = " << branch.termination << "\n";
  std::cout << "branch points: " << branch.points.size() << ", lambda* = " << branch.lambda_star
            << "\n";
  return branch.points.empty() ? kExitNumerical : kExitOk;
}

// ---------------------------------------------------------------- evolve ---

int run_evolve(const CommonOpts& c, double T, double target_tol, double amp, bool upwind) {
  const RadialGrid grid = make_grid(c);
  SplitMix64 rng(c.seed);
  const double v_eq = c.lambda / grid.area();
  Field v0(grid.n()), u0(grid.n(), c.lambda / (c.beta * grid.area()));
  const double center = rng.uniform(0.2, 0.8);
  const double width = rng.uniform(0.1, 0.25);
  for (std::size_t i = 0; i < grid.n(); ++i) {
    const double d = (grid.r[i] - center) / width;
    v0[i] = v_eq * (1.0 + amp * std::exp(-0.5 * d * d));
  }
  const double m = grid.integrate(v0);
  for (double& x : v0) x *= c.lambda / m;  // mass and lambda must agree

  EvolveOptions eopts;
  eopts.upwind = upwind;
  const TrajectorySummary traj =
      run_to_equilibrium(grid, v0, u0, c.beta, c.lambda, T, target_tol, eopts);

  auto dir = open_run_dir("evolve", c, {{"T", format_double(T)},
                                        {"target_tol", format_double(target_tol)},
                                        {"amp", format_double(amp)}});
  std::vector<std::vector<double>> rows;
  for (const TrajectoryPoint& p : traj.samples)
    rows.push_back({p.t, p.mass, p.dev_v, p.dev_u, p.lyapunov});
  write_csv((dir / "trajectory.csv").string(), comment_header(base_params("evolve", c)),
            {"t", "mass", "dev_v", "dev_u", "lyapunov"}, rows);

  SvgSeries s;
  s.label = "sup|u - u_eq|";
  for (const TrajectoryPoint& p : traj.samples) {
    s.x.push_back(p.t);
    s.y.push_back(std::max(p.dev_u, 1e-300));
  }
  SvgOptions so;
  so.title = "decay toward the constant equilibrium";
  so.xlabel = "t";
  so.ylabel = "log10 dev_u";
  so.log_y = true;
  so.annotation = "lambda=" + format_double(c.lambda) + " beta=" + format_double(c.beta);
  svg_line_plot((dir / "decay.svg").string(), {s}, so);

  const char* outcome = traj.outcome == EvolveOutcome::converged        ? "converged"
                        : traj.outcome == EvolveOutcome::blowup_suspected ? "blowup_suspected"
                                                                          : "timeout";
  std::ofstream report = open_report(dir / "report.txt", comment_header(base_params("evolve", c)));
  report << "outcome = " << outcome << "\n"
         << "steps = " << traj.steps << "\n"
         << "final_time = " << format_double(traj.final_time) << "\n"
         << "mass_drift_rel = " << format_double(traj.mass_drift_rel) << "\n";
  std::cout << "outcome: " << outcome << " after " << traj.steps << " steps\n";
  return traj.outcome == EvolveOutcome::blowup_suspected ? kExitNumerical : kExitOk;
}

// -------------------------------------------------------- verify-levelset ---

int run_verify_levelset(const CommonOpts& c, const std::string& from_csv, std::size_t n_levels) {
  ProblemSpec spec;
  spec.beta = c.beta;
  spec.lambda = c.lambda;
  spec.bc = BoundaryCondition::neumann;

  Field u;
  if (!from_csv.empty()) {
    auto [r, stored] = read_solution_csv(from_csv);
    spec.grid = build_radial_grid_from_nodes(r);
    u = stored;
    const double rnorm = sup_norm(residual(spec, u));
    if (rnorm > 1e-8) {
      std::cerr << "stored field does not solve the steady problem (residual " << rnorm << ")\n";
      return kExitInvariant;
    }
  } else {
    spec.grid = make_grid(c);
    // try center- and boundary-concentrated predictors of both signs; keep
    // the first nonconstant solution, otherwise fall back to the constant
    const double cbar = spec.lambda / (spec.beta * spec.grid.area());
    bool found = false;
    for (double center : {0.0, 1.0}) {
      for (double amp : {1.5, -1.5, 3.0, -3.0}) {
        Field init(spec.grid.n(), cbar);
        for (std::size_t i = 0; i < init.size(); ++i)
          init[i] += amp * std::exp(-0.5 * std::pow((spec.grid.r[i] - center) / 0.18, 2));
        const SolveReport rep = newton_solve(spec, init, c.tol);
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
    if (!found) {
      SolveReport rep = newton_solve(spec, Field(spec.grid.n(), cbar), c.tol);
      if (!rep.ok()) return report_solve_failure(rep);
      u = rep.solution.u;
    }
  }

  const NonlinearityPair pair = make_pair(spec.grid, u, spec.lambda, spec.beta);
  const LevelSetTable table = build_table(spec.grid, u, pair, n_levels);
  auto dir = open_run_dir("verify-levelset", c, {{"n_levels", std::to_string(n_levels)}});

  if (table.trivial) {
    std::ofstream report = open_report(dir / "verification.txt", comment_header(base_params("verify-levelset", c)));
    report << "PASS trivial: constant field, nothing to verify\n";
    std::cout << "constant field: trivial table\n";
    return kExitOk;
  }

  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < table.t.size(); ++k)
    rows.push_back({table.t[k], table.mu[k], table.mu_t[k], table.F[k], table.F_t[k],
                    table.G[k], table.G_t[k], table.Psi[k], table.Psi_t[k]});
  write_csv((dir / "levelset.csv").string(), comment_header(base_params("verify-levelset", c)),
            {"t", "mu", "mu_t", "F", "Ft", "G", "Gt", "Psi", "Psit"}, rows);

  std::ofstream report = open_report(dir / "verification.txt", comment_header(base_params("verify-levelset", c)));
  bool all_ok = true;
  auto line = [&](bool ok, const std::string& what, double margin) {
    report << (ok ? "PASS " : "FAIL ") << what << " (margin " << format_double(margin) << ")\n";
    if (!ok) all_ok = false;
  };

  line(std::abs(pair.A_f - pair.A_g) <= 1e-8 * std::max(1.0, pair.A_g), "A_f = A_g",
       pair.A_f - pair.A_g);

  const std::vector<double> crossings = crossing_set(pair, table.t1);
  const bool count_ok = crossings.size() >= 1 && crossings.size() <= 2;
  line(count_ok, "crossing count in {1,2}", static_cast<double>(crossings.size()));

  const PsiMonotonicityReport mono = verify_monotone_psi(table, crossings);
  line(mono.worst_backward_step >= -1e-6, "Psi monotone between crossings",
       mono.worst_backward_step);

  double worst_jump = 0.0;
  for (const JumpReport& j : verify_jump_positivity(table, crossings))
    if (!j.degenerate) worst_jump = std::min(worst_jump, j.jump_from_limits);
  line(worst_jump >= -1e-8, "crossing jumps nonnegative", worst_jump);

  const auto iso = verify_integral_inequality(spec.grid, u, pair,
                                              InequalityVariant::isoperimetric);
  line(iso.margin >= -1e-6, "integral inequality (isoperimetric profile)", iso.margin);
  const auto per = verify_integral_inequality(spec.grid, u, pair, InequalityVariant::perimeter);
  line(per.margin >= -1e-6, "integral inequality (measured perimeter)", per.margin);
  const auto gsym = verify_integral_inequality(spec.grid, u, pair,
                                               InequalityVariant::g_isoperimetric, 2);
  line(gsym.margin >= -1e-6, "integral inequality (rotation profile bound, m=2)", gsym.margin);

  SteadySolution sol;
  sol.spec = spec;
  sol.u = u;
  const ThresholdBoundReport thr = threshold_bound_from_inequality(sol);
  if (thr.applicable) {
    line(thr.respects_general, "lambda above the implied 8 pi bound",
         spec.lambda - thr.implied_bound_general);
    line(thr.respects_disc, "lambda above the implied 32/pi bound",
         spec.lambda - thr.implied_bound_disc);
  }

  SvgSeries sp, spt;
  sp.label = "Psi";
  spt.label = "Psi~";
  sp.x = table.t;
  sp.y = table.Psi;
  spt.x = table.t;
  spt.y = table.Psi_t;
  SvgOptions so;
  so.title = "augmented level-set functions";
  so.xlabel = "t";
  so.ylabel = "Psi, Psi~";
  so.vertical_lines = crossings;
  so.annotation = "lambda=" + format_double(spec.lambda) + " beta=" + format_double(c.beta);
  svg_line_plot((dir / "psi.svg").string(), {sp, spt}, so);

  std::cout << (all_ok ? "all level-set checks passed\n" : "some level-set checks FAILED\n");
  return all_ok ? kExitOk : kExitInvariant;
}

// -------------------------------------------------------------- bol-check ---

int run_bol_check(const CommonOpts& c, bool with_solution) {
  auto dir = open_run_dir("bol-check", c, {{"with_solution", with_solution ? "1" : "0"}});
  std::ofstream report = open_report(dir / "bol.txt", comment_header(base_params("bol-check", c)));
  bool all_ok = true;

  const double thetas[] = {0.5, std::sqrt(8.0), 10.0};
  const double radii[] = {0.1, 0.5, 1.0, 2.0, 10.0};
  std::vector<std::vector<double>> rows;
  for (double theta : thetas)
    for (double r : radii) {
      RadialProfile w;
      w.r_max = std::max(2.0 * r, 20.0);
      w.value = [theta](double s) { return bubble_value(theta, s); };
      const BolReport b = bol_deficit(w, r);
      rows.push_back({theta, r, b.deficit, b.lhs, b.rhs, b.mass_in_ball});
      const bool ok = std::abs(b.deficit) <= 1e-8;
      if (!ok) all_ok = false;
      report << (ok ? "PASS" : "FAIL") << " bubble deficit theta=" << format_double(theta)
             << " r=" << format_double(r) << " deficit=" << format_double(b.deficit) << "\n";
    }
  write_csv((dir / "bol.csv").string(), comment_header(base_params("bol-check", c)),
            {"theta", "r", "deficit", "lhs", "rhs", "mass"}, rows);

  if (with_solution) {
    ProblemSpec spec;
    spec.beta = c.beta;
    spec.lambda = c.lambda;
    spec.bc = BoundaryCondition::dirichlet;
    spec.grid = make_grid(c);
    Field init(spec.grid.n(), 0.0);
    SolveReport rep = newton_solve(spec, init, c.tol);
    if (!rep.ok()) return report_solve_failure(rep);
    const double logS = log_int_exp(spec.grid, rep.solution.u);
    Field v(rep.solution.u.size());
    for (std::size_t i = 0; i < v.size(); ++i)
      v[i] = rep.solution.u[i] + std::log(spec.lambda) - logS;
    for (double r : {0.25, 0.5, 0.75, 1.0}) {
      const BolReport b = bol_deficit(spec.grid, v, r);
      const bool ok = b.deficit > 0.0 && b.subsolution_ok;
      if (!ok) all_ok = false;
      report << (ok ? "PASS" : "FAIL") << " solution deficit r=" << format_double(r)
             << " deficit=" << format_double(b.deficit) << "\n";
    }
  }
  std::cout << (all_ok ? "all Bol checks passed\n" : "some Bol checks FAILED\n");
  return all_ok ? kExitOk : kExitInvariant;
}

// -------------------------------------------------------------- rearrange ---

int run_rearrange(const CommonOpts& c, double beta2) {
  ProblemSpec spec;
  spec.beta = c.beta;
  spec.lambda = c.lambda;
  spec.bc = BoundaryCondition::dirichlet;
  spec.grid = make_grid(c);
  if (!(spec.lambda < 8.0 * kPi)) {
    std::cerr << "rearrange needs lambda < 8 pi (bubble capacity)\n";
    return kExitConfig;
  }

  Field zero(spec.grid.n(), 0.0);
  SolveReport r1 = newton_solve(spec, zero, c.tol);
  if (!r1.ok()) return report_solve_failure(r1);
  ProblemSpec spec2 = spec;
  spec2.beta = beta2;
  SolveReport r2 = newton_solve(spec2, zero, c.tol);
  if (!r2.ok()) return report_solve_failure(r2);

  const double ls1 = log_int_exp(spec.grid, r1.solution.u);
  const double ls2 = log_int_exp(spec.grid, r2.solution.u);
  Field v1(spec.grid.n()), phi(spec.grid.n());
  for (std::size_t i = 0; i < spec.grid.n(); ++i) {
    v1[i] = r1.solution.u[i] + std::log(spec.lambda) - ls1;
    const double v2 = r2.solution.u[i] + std::log(spec.lambda) - ls2;
    phi[i] = v2 - v1[i];
  }
  // theta matched so the unit-disc mass of e^{v1} fills the target ball at R = 1.
  Field ev(spec.grid.n());
  for (std::size_t i = 0; i < ev.size(); ++i) ev[i] = std::exp(v1[i]);
  const double mass = spec.grid.integrate(ev);
  const double theta = std::sqrt(8.0 * mass / (8.0 * kPi - mass));
  const RearrangedField rf = rearrange_equimeasurable(spec.grid, phi, v1, theta);

  auto dir = open_run_dir("rearrange", c, {{"beta2", format_double(beta2)},
                                           {"theta", format_double(theta)}});
  const double theta2 = 8.0 / (rf.outer_radius * rf.outer_radius * theta);
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < rf.radii.size(); ++k)
    rows.push_back({rf.radii[k], rf.values[k], bubble_value(theta, rf.radii[k]),
                    bubble_value(theta2, rf.radii[k])});
  write_csv((dir / "profile.csv").string(), comment_header(base_params("rearrange", c)),
            {"r", "psi", "U_theta1", "U_theta2"}, rows);

  std::ofstream report = open_report(dir / "report.txt", comment_header(base_params("rearrange", c)));
  report << "max_equimeasure_residual = " << format_double(rf.max_equimeasure_residual) << "\n"
         << "total_mass = " << format_double(rf.total_mass) << "\n"
         << "outer_radius = " << format_double(rf.outer_radius) << "\n";
  const bool ok = rf.max_equimeasure_residual <= 1e-6;
  report << (ok ? "PASS" : "FAIL") << " equimeasurability\n";
  std::cout << "max equimeasurability residual: " << rf.max_equimeasure_residual << "\n";
  return ok ? kExitOk : kExitInvariant;
}

// ------------------------------------------------------------- energy-min ---

int run_energy_min(const CommonOpts& c, unsigned m) {
  const RadialGrid grid = make_grid(c);
  SplitMix64 rng(c.seed);
  Field init(grid.n(), c.lambda / (c.beta * grid.area()));
  for (std::size_t i = 0; i < grid.n(); ++i) init[i] += rng.uniform(-1.0, 1.0) * 0.0;
  const double amp = rng.uniform(-2.0, 2.0);
  const double center = rng.uniform(0.0, 1.0);
  const double width = rng.uniform(0.05, 0.3);
  for (std::size_t i = 0; i < grid.n(); ++i) {
    const double d = (grid.r[i] - center) / width;
    init[i] += amp * std::exp(-0.5 * d * d);
  }
  MinimizeOptions mo;
  mo.tol = c.tol;
  const MinimizeReport rep = minimize_J(grid, c.lambda, c.beta, m, init, mo);

  auto dir = open_run_dir("energy-min", c, {{"m", std::to_string(m)}});
  std::vector<std::vector<double>> rows;
  for (const DescentStep& s : rep.trace)
    rows.push_back({static_cast<double>(s.iter), s.J, s.grad_norm});
  write_csv((dir / "descent.csv").string(), comment_header(base_params("energy-min", c)),
            {"iter", "J", "grad_norm"}, rows);
  std::ofstream report = open_report(dir / "report.txt", comment_header(base_params("energy-min", c)));
  report << "converged = " << (rep.converged ? 1 : 0) << "\n"
         << "value = " << format_double(rep.value) << "\n"
         << "gradient_sup = " << format_double(rep.gradient_sup) << "\n"
         << "u_center = " << format_double(rep.u.front()) << "\n";
  if (rep.boundedness_warning) report << "warning = " << rep.note << "\n";
  std::cout << "J = " << rep.value << ", gradient sup " << rep.gradient_sup << "\n";
  return rep.converged ? kExitOk : kExitNumerical;
}

// ------------------------------------------------------------- thresholds ---

int run_thresholds(unsigned m, double beta) {
  std::cout << "Lambda_" << m << " = " << format_double(lambda_threshold(m)) << "\n";
  std::cout << "rotation profile ratio bound (unit disc) = "
            << format_double(g_profile_ratio_bound(m, kPi)) << "\n";
  if (beta > 0.0)
    std::cout << "constant-branch bifurcation lambda* (beta=" << format_double(beta)
              << ") = " << format_double(bifurcation_lambda_star(beta)) << "\n";
  return kExitOk;
}

}  // namespace

int cli_run(int argc, char** argv) {
  CLI::App app{"kslab: a numerical laboratory for chemotaxis equilibria on the disc"};
  app.require_subcommand(1);
  app.set_config("--config", "", "INI config file (command-line flags win)");

  CommonOpts c;

  auto* steady = app.add_subcommand("steady", "solve the steady problem");
  std::string from_csv;
  add_common(steady, c);
  steady->add_option("--from-csv", from_csv, "re-verify a stored solution instead of solving");

  auto* census = app.add_subcommand("census", "multistart uniqueness census");
  add_common(census, c);
  std::size_t starts = 20;
  double cluster_radius = 1e-4;
  census->add_option("--starts", starts, "number of seeded starts");
  census->add_option("--cluster-radius", cluster_radius, "sup-norm clustering radius");

  auto* cont = app.add_subcommand("continue", "pseudo-arclength continuation");
  add_common(cont, c, false);
  double lambda_min = 30.0, lambda_max = 60.0, ds = 0.5;
  std::size_t max_points = 10;
  cont->add_option("--lambda-min", lambda_min, "continuation window lower end");
  cont->add_option("--lambda-max", lambda_max, "continuation window upper end");
  cont->add_option("--ds", ds, "arclength step");
  cont->add_option("--max-points", max_points, "points to record");

  auto* evolve = app.add_subcommand("evolve", "radial evolution toward equilibrium");
  add_common(evolve, c);
  double T = 40.0, target_tol = 1e-4, amp = 0.1;
  bool upwind = false;
  evolve->add_option("--T", T, "final time");
  evolve->add_option("--target-tol", target_tol, "sup|u - u_eq| convergence target");
  evolve->add_option("--amp", amp, "relative amplitude of the initial perturbation");
  evolve->add_flag("--upwind", upwind, "upwind the chemotactic flux (near-blow-up runs)");

  auto* verify = app.add_subcommand("verify-levelset", "level-set inequality verification");
  add_common(verify, c);
  std::string verify_csv;
  std::size_t n_levels = 512;
  verify->add_option("--from-csv", verify_csv, "stored solution to verify");
  verify->add_option("--n-levels", n_levels, "table thresholds");

  auto* bol = app.add_subcommand("bol-check", "isoperimetric deficit checks");
  add_common(bol, c);
  bool with_solution = false;
  bol->add_flag("--with-solution", with_solution, "also check a computed Dirichlet solution");

  auto* rearr = app.add_subcommand("rearrange", "equimeasurable rearrangement of a Dirichlet pair");
  add_common(rearr, c);
  double beta2 = 0.5;
  rearr->add_option("--beta2", beta2, "death rate of the comparison solution");

  auto* emin = app.add_subcommand("energy-min", "variational descent to the minimizer");
  add_common(emin, c);
  unsigned sym_m = 3;
  emin->add_option("--m", sym_m, "rotation symmetry order");

  auto* thr = app.add_subcommand("thresholds", "print the uniqueness thresholds");
  unsigned thr_m = 2;
  double thr_beta = 0.0;
  thr->add_option("--m", thr_m, "rotation order");
  thr->add_option("--beta", thr_beta, "also print the bifurcation prediction for this beta");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (steady->parsed()) return run_steady(c, from_csv);
    if (census->parsed()) return run_census(c, starts, cluster_radius);
    if (cont->parsed()) return run_continue(c, lambda_min, lambda_max, ds, max_points);
    if (evolve->parsed()) return run_evolve(c, T, target_tol, amp, upwind);
    if (verify->parsed()) return run_verify_levelset(c, verify_csv, n_levels);
    if (bol->parsed()) return run_bol_check(c, with_solution);
    if (rearr->parsed()) return run_rearrange(c, beta2);
    if (emin->parsed()) return run_energy_min(c, sym_m);
    if (thr->parsed()) return run_thresholds(thr_m, thr_beta);
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const invariant_breach& e) {
    std::cerr << "invariant breach: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const numerical_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitConfig;
}

}  // namespace kslab

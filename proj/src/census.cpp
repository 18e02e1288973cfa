#include "kslab/census.hpp"

#include <cmath>

#include "kslab/errors.hpp"

namespace kslab {

Field random_start_field(const ProblemSpec& spec, SplitMix64& rng) {
  const RadialGrid& g = spec.grid;
  const double base = spec.lambda / (spec.beta * g.area());
  Field u(g.n(), base);
  for (int bump = 0; bump < 2; ++bump) {
    const double amp = rng.uniform(-2.0, 2.0);
    const double center = rng.uniform(0.0, g.R);
    const double width = rng.uniform(0.05 * g.R, 0.3 * g.R);
    for (std::size_t i = 0; i < g.n(); ++i) {
      const double d = (g.r[i] - center) / width;
      u[i] += amp * std::exp(-0.5 * d * d);
    }
  }
  if (spec.bc == BoundaryCondition::dirichlet) {
    for (std::size_t i = 0; i < g.n(); ++i) {
      const double x = g.r[i] / g.R;
      u[i] *= 1.0 - x * x;
    }
  }
  return u;
}

CensusReport multistart_census(const ProblemSpec& spec, const CensusOptions& opts) {
  spec.validate();
  if (opts.n_starts < 1) throw config_error("census: need at least one start");
  CensusReport rep;
  rep.spec = spec;
  rep.n_starts = opts.n_starts;
  rep.seed = opts.seed;

  SplitMix64 rng(opts.seed);
  NewtonOptions nopts;
  nopts.tol = opts.tol;
  nopts.max_iter = opts.max_iter;

  for (std::size_t s = 0; s < opts.n_starts; ++s) {
    const Field init = random_start_field(spec, rng);
    SolveReport r = newton_solve(spec, init, nopts);
    if (!r.ok()) {
      ++rep.n_nonconverged;
      continue;
    }
    bool placed = false;
    for (CensusCluster& c : rep.clusters) {
      if (sup_distance(c.representative.u, r.solution.u) <= opts.cluster_radius) {
        ++c.count;
        placed = true;
        break;
      }
    }
    if (!placed) {
      CensusCluster c;
      c.representative = r.solution;
      c.count = 1;
      rep.clusters.push_back(std::move(c));
    }
  }
  rep.distinct_count = rep.clusters.size();
  return rep;
}

}  // namespace kslab

#pragma once

#include <cstdint>
#include <cstddef>
#include <vector>

#include "kslab/rng.hpp"
#include "kslab/steady.hpp"

namespace kslab {

struct CensusOptions {
  std::size_t n_starts = 20;
  std::uint64_t seed = 1;
  double cluster_radius = 1e-4;  ///< sup-norm clustering radius
  double tol = 1e-11;
  std::size_t max_iter = 80;
};

struct CensusCluster {
  SteadySolution representative;  ///< first converged member, in start order
  std::size_t count = 0;          ///< number of starts that landed here
};

struct CensusReport {
  ProblemSpec spec;
  std::size_t n_starts = 0;
  std::uint64_t seed = 0;
  std::size_t distinct_count = 0;
  std::vector<CensusCluster> clusters;
  std::size_t n_nonconverged = 0;  ///< non-convergence is data, not an error
};

/// Seeded random initial field: the constant lambda/(beta |B|) plus two
/// Gaussian radial bumps with amplitudes in [-2, 2]; Dirichlet starts are
/// masked by (1 - (r/R)^2) so they honor the trace condition.
Field random_start_field(const ProblemSpec& spec, SplitMix64& rng);

/// Newton from opts.n_starts seeded random starts, clustered by sup-distance.
CensusReport multistart_census(const ProblemSpec& spec, const CensusOptions& opts);

}  // namespace kslab

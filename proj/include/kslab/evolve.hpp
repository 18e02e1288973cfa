#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "kslab/grid.hpp"
#include "kslab/steady.hpp"

namespace kslab {

/// State of the radial chemotaxis evolution
///     v_t = div(grad v - v grad u),   u_t = Lap u - beta u + v
/// with zero-flux boundary data for both fields.
struct EvolutionState {
  double t = 0.0;
  Field v;  ///< cell density
  Field u;  ///< chemical concentration
  double dt = 1e-3;
};

struct EvolveOptions {
  double dt_init = 1e-3;
  double dt_max = 0.05;
  double cfl_safety = 0.5;
  double growth = 1.2;          ///< step growth after clean stretches
  int clean_steps_for_growth = 10;
  double negativity_tol = 1e-12;
  double blowup_density_factor = 1e6;  ///< blow-up suspected when sup v > factor * lambda/|B|
  double dt_min = 1e-12;
  bool upwind = false;  ///< upwind the chemotactic flux (near-blow-up runs)
  std::size_t max_steps = 2000000;
};

struct StepInfo {
  double dt_taken = 0.0;
  int retries = 0;
  bool blowup_signal = false;
};

enum class EvolveOutcome { converged, blowup_suspected, timeout };

struct TrajectoryPoint {
  double t = 0.0;
  double mass = 0.0;
  double dev_v = 0.0;     ///< sup |v - lambda/|B||
  double dev_u = 0.0;     ///< sup |u - lambda/(beta |B|)|
  double lyapunov = 0.0;
};

struct TrajectorySummary {
  EvolveOutcome outcome = EvolveOutcome::timeout;
  std::vector<TrajectoryPoint> samples;
  double mass_drift_rel = 0.0;
  double final_time = 0.0;
  std::size_t steps = 0;
  std::string note;
};

double total_mass(const RadialGrid& g, const EvolutionState& s);

/// Free energy int v log v - int v u + 1/2 int(|grad u|^2 + beta u^2);
/// a solver health check that must not increase along converged runs.
/// Throws numerical_error if v is not strictly positive.
double free_energy(const RadialGrid& g, const EvolutionState& s, double beta);

/// One IMEX step: diffusion of v and the full linear u-equation implicit,
/// chemotactic flux explicit in a conservative form whose divergence sums to
/// zero against the quadrature weights, so the discrete mass is exact.
/// On negativity the step is halved and retried (bounded retries).
StepInfo step_imex(const RadialGrid& g, EvolutionState& s, double beta,
                   const EvolveOptions& opts = {});

/// Integrate until sup|u - lambda/(beta|B|)| < tol, t = T, or blow-up
/// suspicion.  Requires int v0 = lambda to 1e-10 relative.
TrajectorySummary run_to_equilibrium(const RadialGrid& g, const Field& v0, const Field& u0,
                                     double beta, double lambda, double T, double tol,
                                     const EvolveOptions& opts = {});

}  // namespace kslab

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "kslab/grid.hpp"
#include "kslab/linalg.hpp"

namespace kslab {

enum class BoundaryCondition { neumann, dirichlet };

/// Parameters of the steady nonlocal problem
///     Lap u - beta u + lambda e^u / int_B e^u = 0
/// with zero-flux or zero-trace boundary data on the disc.
struct ProblemSpec {
  double beta = 1.0;    ///< chemical death rate, > 0
  double lambda = 0.0;  ///< total mass, >= 0
  BoundaryCondition bc = BoundaryCondition::neumann;
  RadialGrid grid;

  void validate() const;
};

/// A converged solution together with its certificate quantities.
struct SteadySolution {
  ProblemSpec spec;
  Field u;
  double residual_norm = 0.0;      ///< sup-norm of the discrete residual
  int stability_index = -1;        ///< negative-eigenvalue count of the second variation; -1 if not computed
  double mass_identity_error = 0.0;  ///< |beta * int u - lambda|, Neumann only
};

enum class SolveStatus {
  converged,
  max_iterations,
  near_singular,   ///< Jacobian condition estimate above threshold (bifurcation suspected)
  diverged,        ///< iterates became non-finite
  invariant_violation,  ///< converged but positivity or mass identity failed
};

struct SolveReport {
  SolveStatus status = SolveStatus::diverged;
  SteadySolution solution;  ///< valid when status is converged or invariant_violation
  std::size_t iterations = 0;
  double final_residual = 0.0;
  std::string message;

  bool ok() const { return status == SolveStatus::converged; }
};

/// log of int_B e^u, evaluated with a max shift so it never overflows.
double log_int_exp(const RadialGrid& g, const Field& u);

/// Nodal values of e^{u - log int e^u}; integrates to 1 against the grid weights.
Field density(const RadialGrid& g, const Field& u);

/// Radial finite-volume Laplacian rows.  Neumann encodes the zero-flux closure
/// at r = R; for Dirichlet the boundary row is left zero (the residual and the
/// Jacobian replace it with the trace condition u(R) = 0).
Tridiagonal radial_laplacian(const RadialGrid& g, BoundaryCondition bc);

/// Laplacian applied in flux form: nodal differences first, then the face
/// coefficients.  Exactly zero on constants (the matrix form carries an
/// O(eps/h^2) row-sum residue), so residuals bottom out near machine noise.
Field apply_radial_laplacian(const RadialGrid& g, BoundaryCondition bc, const Field& u);

/// Magnitude of the terms composing the residual at u; the attainable
/// residual floor is a small multiple of eps times this.
double residual_scale(const ProblemSpec& spec, const Field& u);

/// Discrete residual of the steady problem; boundary rows encode the boundary
/// condition.  Throws on grid mismatch or non-finite input.
Field residual(const ProblemSpec& spec, const Field& u);

struct NewtonOptions {
  double tol = 1e-12;
  std::size_t max_iter = 60;
  double condition_threshold = 1e12;
  bool check_invariants = true;
};

/// Damped Newton iteration.  The Jacobian is tridiagonal plus the rank-one
/// correction from the nonlocal denominator and is solved by a banded
/// factorization with a Sherman-Morrison update.
SolveReport newton_solve(const ProblemSpec& spec, const Field& init, const NewtonOptions& opts = {});
SolveReport newton_solve(const ProblemSpec& spec, const Field& init, double tol);

struct StabilityReport {
  std::vector<double> eigenvalues;  ///< leading eigenvalues of the linearized operator, descending
  int stability_index = 0;          ///< number of positive eigenvalues (unstable directions)
};

/// Spectrum of the linearization phi -> Lap phi - beta phi
///   + (lambda e^u / S)(phi - int e^u phi / S) at the given solution,
/// symmetrized in the quadrature inner product.  The first k eigenvalues
/// (those nearest instability) are reported.
StabilityReport linear_stability(const SteadySolution& sol, std::size_t k = 6);

/// Same, for an arbitrary (not necessarily converged) field.
StabilityReport linear_stability_at(const ProblemSpec& spec, const Field& u, std::size_t k = 6);

/// Predicted loss of invertibility of the constant branch:
/// lambda* = |B| (beta + mu_k) with mu_k the k-th nonzero radial Neumann
/// eigenvalue of the unit disc, mu_k = (j'_{0,k})^2.
double bifurcation_lambda_star(double beta, std::size_t k = 1, double R = 1.0);

struct ShiftedField {
  Field U;                      ///< u - mean(u)
  double mean_value = 0.0;      ///< mean of u
  double integral_U = 0.0;      ///< int U (should vanish)
  double shifted_residual_norm = 0.0;  ///< residual of the zero-mean formulation
};

/// Zero-mean shift U = u - mean(u) of a Neumann solution, with the residual of
/// the equivalent zero-mean equation re-verified.
ShiftedField shift_to_zero_mean(const SteadySolution& sol);

}  // namespace kslab

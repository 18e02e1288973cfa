#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "kslab/grid.hpp"

namespace kslab {

struct EnergyReport {
  double value = 0.0;
  Field gradient;
  double gradient_sup = 0.0;
};

/// J_lambda(u) = 1/2 int |grad u|^2 + beta/2 int u^2 - lambda log int e^u,
/// with the log-sum stabilized by a max shift.
double evaluate_J(const RadialGrid& g, const Field& u, double lambda, double beta);

/// First variation -Lap u + beta u - lambda e^u / int e^u with the zero-flux
/// closure; vanishes at steady Neumann solutions.
Field gradient_J(const RadialGrid& g, const Field& u, double lambda, double beta);

EnergyReport energy_report(const RadialGrid& g, const Field& u, double lambda, double beta);

struct DescentStep {
  std::size_t iter = 0;
  double J = 0.0;
  double grad_norm = 0.0;
};

struct MinimizeReport {
  Field u;
  double value = 0.0;
  double gradient_sup = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  bool boundedness_warning = false;  ///< lambda above 8 pi: run is exploratory
  std::vector<DescentStep> trace;
  std::string note;
};

struct MinimizeOptions {
  double tol = 1e-8;
  std::size_t max_iter = 5000;
  double armijo_slope = 1e-4;
  double shrink = 0.5;
  double initial_step = 1.0;
};

/// Gradient flow preconditioned by (-Lap + beta)^{-1} with Armijo
/// backtracking, restricted to the m-fold symmetric class (the identity on
/// radial fields, which this grid represents).
MinimizeReport minimize_J(const RadialGrid& g, double lambda, double beta, unsigned symmetry_m,
                          const Field& init, const MinimizeOptions& opts = {});

}  // namespace kslab

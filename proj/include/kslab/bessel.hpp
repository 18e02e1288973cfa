#pragma once

#include <cstddef>

namespace kslab {

/// k-th positive zero of J_0 (k >= 1); squared, these are the radial
/// Dirichlet eigenvalues of -Laplace on the unit disc.
double bessel_j0_zero(std::size_t k);

/// k-th positive zero of J_0' = -J_1 (k >= 1); squared, these are the nonzero
/// radial Neumann eigenvalues of -Laplace on the unit disc.
double bessel_j0_prime_zero(std::size_t k);

double bessel_j0(double x);
double bessel_j1(double x);

}  // namespace kslab

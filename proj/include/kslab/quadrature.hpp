#pragma once

#include <functional>

namespace kslab {

/// Adaptive Simpson quadrature of f on [a, b] to the given absolute
/// tolerance.  Throws numerical_error if the recursion bottoms out.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12);

}  // namespace kslab

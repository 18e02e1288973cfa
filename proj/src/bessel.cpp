#include "kslab/bessel.hpp"

#include <cmath>

#include "kslab/errors.hpp"

namespace kslab {

namespace {

// Bracketed bisection for a sign change of f on [lo, hi].
template <typename F>
double bisect(F&& f, double lo, double hi) {
  double flo = f(lo);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((flo < 0.0) == (fm < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-15 * (1.0 + hi)) break;
  }
  return 0.5 * (lo + hi);
}

// k-th positive zero of x -> cyl_bessel_j(nu, x), found by scanning for sign
// changes from x0 with step pi/8 (consecutive Bessel zeros are ~pi apart).
double bessel_zero(double nu, std::size_t k, double x0) {
  if (k < 1) throw config_error("bessel zero index must be >= 1");
  const double step = 3.14159265358979323846 / 8.0;
  double a = x0;
  double fa = std::cyl_bessel_j(nu, a);
  std::size_t found = 0;
  for (int it = 0; it < 100000; ++it) {
    const double b = a + step;
    const double fb = std::cyl_bessel_j(nu, b);
    if (fa == 0.0) return a;
    if ((fa < 0.0) != (fb < 0.0)) {
      ++found;
      if (found == k) return bisect([nu](double x) { return std::cyl_bessel_j(nu, x); }, a, b);
    }
    a = b;
    fa = fb;
  }
  throw numerical_error("bessel zero scan did not find the requested root");
}

}  // namespace

double bessel_j0(double x) { return std::cyl_bessel_j(0.0, x); }
double bessel_j1(double x) { return std::cyl_bessel_j(1.0, x); }

double bessel_j0_zero(std::size_t k) { return bessel_zero(0.0, k, 0.5); }

double bessel_j0_prime_zero(std::size_t k) {
  // J_0' = -J_1; skip the trivial J_1 zero at the origin.
  return bessel_zero(1.0, k, 0.5);
}

}  // namespace kslab

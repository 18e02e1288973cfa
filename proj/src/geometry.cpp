#include "kslab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kslab/errors.hpp"

namespace kslab {

namespace {

constexpr double kPi = std::numbers::pi;

// One-parameter family of circular arcs orthogonal to the unit circle,
// parametrized by delta = pi/2 - psi where +-psi are the polar angles of the
// endpoints.  The arc has radius tan(psi) and center at distance sec(psi);
// delta -> pi/2 shrinks the cut region to a point, delta -> 0 gives the
// diameter (area pi/2, length 2).
//
//   area(delta)   = psi + cot(delta) * (delta * cot(delta) - 1)
//   length(delta) = 2 * delta * cot(delta)
//
// Both expressions cancel badly for small delta, so a series in delta is used
// there: area = pi/2 - (4/3) delta + (4/45) delta^3 + O(delta^5),
// length = 2 (1 - delta^2/3 - delta^4/45) + O(delta^6).

double arc_area(double delta) {
  if (delta < 1e-3) {
    const double d2 = delta * delta;
    return kPi / 2.0 - (4.0 / 3.0) * delta + (4.0 / 45.0) * d2 * delta;
  }
  const double psi = kPi / 2.0 - delta;
  const double cot = 1.0 / std::tan(delta);
  return psi + cot * (delta * cot - 1.0);
}

double arc_length(double delta) {
  if (delta < 1e-3) {
    const double d2 = delta * delta;
    return 2.0 * (1.0 - d2 / 3.0 - d2 * d2 / 45.0);
  }
  return 2.0 * delta / std::tan(delta);
}

// Invert area(delta) = s on the unit disc for s in (0, pi/2]; area is
// strictly decreasing in delta.
double profile_unit_disc(double s) {
  double lo = 0.0, hi = kPi / 2.0;  // area(lo) = pi/2, area(hi) = 0
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (arc_area(mid) > s)
      lo = mid;
    else
      hi = mid;
    if (std::abs(arc_area(0.5 * (lo + hi)) - s) < 1e-10 && hi - lo < 1e-9) break;
  }
  return arc_length(0.5 * (lo + hi));
}

}  // namespace

SymmetryGroup SymmetryGroup::rotation(unsigned m) {
  if (m < 2) throw config_error("rotation group order must be >= 2");
  return {Kind::rotation, m};
}

double disc_isoperimetric_profile(double s, double R) {
  if (!(R > 0.0)) throw config_error("isoperimetric profile: radius must be positive");
  const double area = kPi * R * R;
  if (s < -1e-15 * area || s > area * (1.0 + 1e-15))
    throw config_error("isoperimetric profile: area outside [0, pi R^2]");
  s = std::clamp(s, 0.0, area);
  if (s == 0.0 || s == area) return 0.0;
  // Scale to the unit disc and use the symmetry I(s) = I(|B| - s).
  double su = s / (R * R);
  su = std::min(su, kPi - su);
  return R * profile_unit_disc(su);
}

double g_profile_ratio_bound(unsigned m, double disc_area) {
  if (m < 2) throw config_error("g_profile_ratio_bound: rotation order must be >= 2");
  if (!(disc_area > 0.0)) throw config_error("g_profile_ratio_bound: area must be positive");
  return std::min(4.0 * kPi / disc_area, 16.0 * static_cast<double>(m) / (kPi * disc_area));
}

double lambda_threshold(unsigned m) {
  if (m < 2) throw config_error("lambda_threshold: rotation order must be >= 2");
  return (m == 2) ? 64.0 / kPi : 8.0 * kPi;
}

}  // namespace kslab

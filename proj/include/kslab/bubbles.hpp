#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "kslab/grid.hpp"

namespace kslab {

/// A radial profile given as a callable on [0, r_max].
struct RadialProfile {
  std::function<double(double)> value;
  double r_max = 0.0;
};

/// Linear-interpolation profile over a grid field.
RadialProfile make_profile(const RadialGrid& g, const Field& u);

/// The entire radial family of solutions of Lap U + e^U = 0 on the plane:
///     U_theta(r) = -2 log(1 + theta^2 r^2 / 8) + 2 log theta.
double bubble_value(double theta, double r);

/// int_{B_r} e^{U_theta} = 8 pi theta^2 r^2 / (8 + theta^2 r^2);
/// r may be infinite (total mass 8 pi).
double bubble_mass(double theta, double r);

/// Radius of the centered ball holding the given e^{U_theta} mass (< 8 pi).
double bubble_radius_for_mass(double theta, double mass);

struct BolReport {
  double deficit = 0.0;  ///< lhs - rhs, >= 0 for admissible profiles, 0 for bubbles
  double lhs = 0.0;      ///< (int_{boundary B_r} e^{w/2})^2 = (2 pi r e^{w(r)/2})^2
  double rhs = 0.0;      ///< (1/2) M (8 pi - M), M = int_{B_r} e^w
  double mass_in_ball = 0.0;
  double mass_total = 0.0;
  double worst_subsolution_margin = 0.0;  ///< min of Lap w + e^w over sample radii
  bool subsolution_ok = true;             ///< margin above -tolerance (warned otherwise)
};

/// Isoperimetric deficit of the metric e^w |dx|^2 on the centered ball of
/// radius r.  The ball mass is evaluated by adaptive quadrature; the boundary
/// integral is exact for radial fields.  Rejects profiles whose total mass
/// exceeds 8 pi; a violated subsolution condition only flags the report.
BolReport bol_deficit(const RadialProfile& w, double r, double subsolution_tol = 1e-4);

/// Grid-field variant: the subsolution condition is checked nodally with the
/// finite-volume Laplacian (a linear interpolant has no pointwise curvature).
BolReport bol_deficit(const RadialGrid& g, const Field& w_field, double r,
                      double subsolution_tol = 1e-4);

struct RearrangedField {
  double theta = 0.0;
  double total_mass = 0.0;        ///< int e^{v1} = bubble mass of the target ball
  double outer_radius = 0.0;      ///< radius of the target ball Omega*
  std::vector<double> radii;      ///< breakpoints, increasing
  std::vector<double> values;     ///< phi* at the breakpoints, nonincreasing
  double max_equimeasure_residual = 0.0;  ///< over the sampled thresholds
  std::vector<double> sampled_t;
  std::vector<double> sampled_residual;

  /// phi*(rho) = sup{ t : rho inside the ball holding mass m(t) }.
  double value_at(double rho) const;
  /// Radius of {phi* > t}.
  double super_level_radius(double t) const;
};

/// Equimeasurable rearrangement of phi with respect to the measures e^{v1} dx
/// on the disc and e^{U_theta} dx on the plane: the super-level set of phi at
/// height t is traded for the centered ball holding the same e^{U_theta}
/// mass.  Exact on the discrete measure; residuals are reported at n_sample
/// thresholds.
RearrangedField rearrange_equimeasurable(const RadialGrid& g, const Field& phi, const Field& v1,
                                         double theta, std::size_t n_sample = 100);

/// int_{phi = t} |grad phi| for a radial grid field, by segment inversion.
double gradient_level_integral(const RadialGrid& g, const Field& phi, double t);

/// int_{phi* = t} |grad phi*| for the rearrangement of phi with respect to
/// e^{v1} dx and a bubble measure.  The chain rule collapses it to
///     (1/2) m(t) (8 pi - m(t)) / D(t),
/// m(t) = int_{phi>t} e^{v1},  D(t) = int_{phi=t} e^{v1}/|grad phi|,
/// independent of theta; both integrals are evaluated from the linear
/// interpolant (segment inversion + quadrature) so the two sides of the
/// rearrangement comparison carry consistent discretization error.
double rearranged_gradient_integral(const RadialGrid& g, const Field& phi, const Field& v1,
                                    double t);

enum class RadialLemmaSide { inner, outer, boundary_value };

struct RadialLemmaReport {
  bool hypothesis_ok = false;  ///< flux condition held at every sampled radius
  double worst_hypothesis_margin = 0.0;
  bool inapplicable = false;   ///< hypothesis failed: no conclusion drawn
  // inner: which alternative holds for int_{B_R} e^psi vs the two bubbles
  bool alternative_lower = false;  ///< mass <= bubble(theta1) mass
  bool alternative_upper = false;  ///< mass >= bubble(theta2) mass
  // outer: sandwich between the two bubble tail masses
  bool sandwich_ok = false;
  // boundary_value: U_theta(R) <= psi(R) with theta matched to the ball mass
  bool boundary_comparison_ok = false;
  double psi_mass = 0.0;
  double bubble_mass_1 = 0.0;
  double bubble_mass_2 = 0.0;
  double psi_at_R = 0.0;
  double bubble_at_R = 0.0;
  double matched_theta = 0.0;
};

/// Numeric checks of the radial Bol dichotomy (inner), the reversed-Bol
/// sandwich (outer, profile truncated at r_max with the e^{U_tail} tail added
/// analytically), and the boundary-value comparison.  theta2 is derived from
/// theta1 and R when the two bubbles must agree at R.
RadialLemmaReport check_radial_lemmas(const RadialProfile& psi, double theta1, double R,
                                      RadialLemmaSide side, double tail_theta = 0.0);

}  // namespace kslab

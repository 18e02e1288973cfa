#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "kslab/grid.hpp"
#include "kslab/steady.hpp"

namespace kslab {

/// The nonlinearity pair (f, g) attached to a field: f(t) = lambda e^t / S
/// with the normalization S = int e^u frozen from the field, g(t) = beta t.
/// Custom pairs (for synthetic fields) may be built directly as long as f is
/// positive increasing and g nondecreasing on the field's range.
struct NonlinearityPair {
  std::function<double(double)> f;
  std::function<double(double)> fprime;
  std::function<double(double)> g;
  double A_f = 0.0;  ///< mean of f(u)
  double A_g = 0.0;  ///< mean of g(u)
};

NonlinearityPair make_pair(const RadialGrid& g, const Field& u, double lambda, double beta);
NonlinearityPair make_pair(const SteadySolution& sol);

/// Custom pair from callables; means are computed against the field.
NonlinearityPair make_custom_pair(const RadialGrid& g, const Field& u,
                                  std::function<double(double)> f,
                                  std::function<double(double)> fprime,
                                  std::function<double(double)> gg);

/// One atom of the discrete level-set measure: a group of nodes sharing a
/// value (within the plateau tolerance), with their aggregated weight.
struct LevelAtom {
  double value = 0.0;
  double weight = 0.0;
};

/// Sampled level-set data of one field: distribution functions and the
/// augmented functions Psi = A_g f mu^2 - F^2, Psi~ = A_g f mu~^2 - F~^2.
/// All measures are computed from the discrete measure (nodal values with
/// their quadrature weights), never by differentiating.
struct LevelSetTable {
  bool trivial = false;  ///< constant input field
  double area = 0.0;     ///< |B|
  double t0 = 0.0, t1 = 0.0;
  double A_f = 0.0, A_g = 0.0;

  std::vector<double> t, mu, mu_t, F, F_t, G, G_t, Psi, Psi_t;

  std::vector<LevelAtom> atoms;            ///< ascending by value
  std::vector<double> critical_values;     ///< values at discrete critical radii
  double delta_exclusion = 0.0;            ///< 2 grid-cell value-ranges

  // Right-continuous evaluations from the atoms (strict super/sub level sets).
  double mu_at(double t) const;
  double mu_tilde_at(double t) const;
  double plateau_measure_at(double a) const;  ///< |{u = a}| up to the plateau tolerance
  double F_at(double t) const;   ///< int_{u>t} f(u)
  double Ft_at(double t) const;  ///< int_{u<t} f(u)
  double G_at(double t) const;
  double Gt_at(double t) const;

  NonlinearityPair pair;

 private:
  friend LevelSetTable build_table(const RadialGrid&, const Field&, const NonlinearityPair&,
                                   std::size_t);
  std::vector<double> node_value_;   // node values sorted ascending (ties by index)
  std::vector<double> node_weight_;  // matching weights
  std::vector<double> node_f_, node_g_;
};

/// Build the table at n_levels thresholds spanning [min u, max u].
/// A constant field (range below 1e-10) yields a trivial-table marker.
LevelSetTable build_table(const RadialGrid& g, const Field& u, const NonlinearityPair& pair,
                          std::size_t n_levels = 256);

struct MeanValueReport {
  double A_h = 0.0;
  double worst_super_margin = 0.0;  ///< min over t of int_{u>t} h - A_h mu   (>= 0 expected)
  double worst_sub_margin = 0.0;    ///< min over t of A_h mu~ - int_{u<t} h  (>= 0 expected)
};

/// Mean value of h(u) plus the two monotone-weight comparisons at sampled
/// thresholds.  h must be nondecreasing on the field's range.
MeanValueReport mean_value(const RadialGrid& g, const Field& u,
                           const std::function<double(double)>& h, std::size_t n_sample = 200);

/// Roots of f(t) = g(t) on [0, t_max + margin], located by scan + bisection.
/// For pairs from Neumann solutions the count is 1 or 2 (f - g is convex).
std::vector<double> crossing_set(const NonlinearityPair& pair, double t_max);

struct PsiMonotonicityReport {
  double worst_backward_step = 0.0;  ///< most negative admissible increment of Psi or Psi~
  double worst_step_psi = 0.0;       ///< Psi alone (holds without the zero-flux condition
  double worst_step_psi_tilde = 0.0; ///< whenever super-level sets stay interior)
  double worst_t = 0.0;
  std::size_t n_checked = 0;
  std::size_t n_excluded = 0;
};

/// Checks that Psi and Psi~ are nondecreasing between consecutive crossings,
/// excluding a delta-neighborhood of crossings and of critical values.
PsiMonotonicityReport verify_monotone_psi(const LevelSetTable& table,
                                          const std::vector<double>& crossings);

struct JumpReport {
  double a = 0.0;                 ///< crossing value
  double plateau_measure = 0.0;   ///< |{u = a}|
  double jump_from_limits = 0.0;  ///< Psi(a+) + Psi~(a+) - Psi(a-) - Psi~(a-)
  double jump_closed_form = 0.0;  ///< 2 f(a)|{u=a}| [(F - mu A_g) + (mu~ A_g - F~)]
  bool degenerate = false;        ///< crossing at the field's min or max; skipped
};

/// Combined jump of Psi + Psi~ at each crossing, evaluated both from
/// one-sided limits and from the closed form.
std::vector<JumpReport> verify_jump_positivity(const LevelSetTable& table,
                                               const std::vector<double>& crossings);

enum class InequalityVariant { isoperimetric, perimeter, g_isoperimetric };

struct IntegralInequalityReport {
  double lhs = 0.0;     ///< (A_g/2) int f' mu (|B| - mu) dt
  double rhs = 0.0;
  double margin = 0.0;  ///< lhs - rhs, expected >= -tol
  InequalityVariant variant = InequalityVariant::isoperimetric;
};

/// The integral inequality on a nonconstant field, with the right-hand side
/// built from the disc profile, from the measured level perimeters, or from
/// the rotation-symmetric profile bound of order m.  The mu-weighted pieces
/// are exact sums over the discrete measure (f is its own antiderivative);
/// the measured-perimeter variant quadratures each inter-atom gap.
IntegralInequalityReport verify_integral_inequality(const RadialGrid& g, const Field& u,
                                                    const NonlinearityPair& pair,
                                                    InequalityVariant variant, unsigned m = 2);

struct ThresholdBoundReport {
  bool applicable = false;  ///< false for constant input
  double implied_bound_general = 0.0;  ///< 2|B| inf_t 4pi/max(mu, |B|-mu) = 8pi
  double implied_bound_disc = 0.0;     ///< 2|B| * 16/(pi |B|) = 32/pi
  double lambda = 0.0;
  bool respects_general = false;  ///< lambda > 8pi
  bool respects_disc = false;     ///< lambda > 32/pi
};

/// Lower bounds on lambda implied by the integral inequality for a
/// nonconstant radial Neumann solution, and whether the solution obeys them.
ThresholdBoundReport threshold_bound_from_inequality(const SteadySolution& sol);

/// Measured perimeter of the level set {u = t} of a radial field: one circle
/// 2 pi r per crossing radius, crossings located by monotone-segment
/// inversion with linear interpolation.
double level_perimeter(const RadialGrid& g, const Field& u, double t);

}  // namespace kslab

#include "kslab/bubbles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "kslab/errors.hpp"
#include "kslab/quadrature.hpp"

namespace kslab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTotalBubbleMass = 8.0 * std::numbers::pi;

double ball_mass(const RadialProfile& w, double r, double tol = 1e-12) {
  return adaptive_simpson([&](double s) { return 2.0 * kPi * s * std::exp(w.value(s)); }, 0.0, r,
                          tol);
}

double annulus_mass(const RadialProfile& w, double a, double b, double tol = 1e-12) {
  return adaptive_simpson([&](double s) { return 2.0 * kPi * s * std::exp(w.value(s)); }, a, b,
                          tol);
}

double profile_derivative(const RadialProfile& w, double r) {
  const double h = std::max(1e-6, 1e-7 * w.r_max);
  if (r - h < 0.0) return (w.value(r + h) - w.value(r)) / h;
  if (r + h > w.r_max) return (w.value(r) - w.value(r - h)) / h;
  return (w.value(r + h) - w.value(r - h)) / (2.0 * h);
}

}  // namespace

RadialProfile make_profile(const RadialGrid& g, const Field& u) {
  if (u.size() != g.n()) throw config_error("make_profile: field off-grid");
  RadialProfile p;
  p.r_max = g.R;
  p.value = [g, u](double r) { return g.interp(u, r); };
  return p;
}

double bubble_value(double theta, double r) {
  if (!(theta > 0.0)) throw config_error("bubble_value: theta must be positive");
  return -2.0 * std::log1p(theta * theta * r * r / 8.0) + 2.0 * std::log(theta);
}

double bubble_mass(double theta, double r) {
  if (!(theta > 0.0)) throw config_error("bubble_mass: theta must be positive");
  if (!(r >= 0.0)) throw config_error("bubble_mass: radius must be nonnegative");
  if (std::isinf(r)) return kTotalBubbleMass;
  const double s = theta * theta * r * r;
  return kTotalBubbleMass * s / (8.0 + s);
}

double bubble_radius_for_mass(double theta, double mass) {
  if (!(theta > 0.0)) throw config_error("bubble_radius_for_mass: theta must be positive");
  if (mass <= 0.0) return 0.0;
  if (!(mass < kTotalBubbleMass))
    throw config_error("bubble_radius_for_mass: a bubble holds less than 8 pi");
  return std::sqrt(8.0 * mass / (theta * theta * (kTotalBubbleMass - mass)));
}

BolReport bol_deficit(const RadialProfile& w, double r, double subsolution_tol) {
  if (!(r > 0.0) || r > w.r_max * (1.0 + 1e-12))
    throw config_error("bol_deficit: radius outside the profile domain");
  BolReport rep;
  rep.mass_total = ball_mass(w, w.r_max);
  if (rep.mass_total > kTotalBubbleMass * (1.0 + 1e-10))
    throw config_error("bol_deficit: total metric mass exceeds 8 pi");

  rep.mass_in_ball = ball_mass(w, std::min(r, w.r_max));
  const double boundary = 2.0 * kPi * r * std::exp(0.5 * w.value(r));
  rep.lhs = boundary * boundary;
  rep.rhs = 0.5 * rep.mass_in_ball * (kTotalBubbleMass - rep.mass_in_ball);
  rep.deficit = rep.lhs - rep.rhs;

  // Subsolution condition Lap w + e^w >= 0, sampled with centered differences
  // whose step adapts to the radius; the margin is measured relative to the
  // metric weight e^w, the natural scale of the condition.
  double worst = std::numeric_limits<double>::infinity();
  const int n_sample = 200;
  for (int j = 0; j <= n_sample; ++j) {
    const double rr = w.r_max * static_cast<double>(j) / n_sample;
    const double h = 1e-4 * (1.0 + rr);
    double lap;
    if (rr < h) {
      lap = 4.0 * (w.value(h) - w.value(0.0)) / (h * h);
    } else if (rr + h > w.r_max) {
      continue;  // one-sided boundary cell: skip
    } else {
      const double wm = w.value(rr - h), w0 = w.value(rr), wp = w.value(rr + h);
      lap = (wp - 2.0 * w0 + wm) / (h * h) + (wp - wm) / (2.0 * h * rr);
    }
    const double ew = std::exp(w.value(rr));
    worst = std::min(worst, (lap + ew) / (1.0 + ew));
  }
  rep.worst_subsolution_margin = worst;
  rep.subsolution_ok = worst >= -subsolution_tol;
  return rep;
}

BolReport bol_deficit(const RadialGrid& g, const Field& w_field, double r,
                      double subsolution_tol) {
  if (w_field.size() != g.n()) throw config_error("bol_deficit: field off-grid");
  BolReport rep;
  const RadialProfile w = make_profile(g, w_field);
  rep.mass_total = ball_mass(w, g.R);
  if (rep.mass_total > kTotalBubbleMass * (1.0 + 1e-10))
    throw config_error("bol_deficit: total metric mass exceeds 8 pi");
  rep.mass_in_ball = ball_mass(w, std::min(r, g.R));
  const double boundary = 2.0 * kPi * r * std::exp(0.5 * w.value(r));
  rep.lhs = boundary * boundary;
  rep.rhs = 0.5 * rep.mass_in_ball * (kTotalBubbleMass - rep.mass_in_ball);
  rep.deficit = rep.lhs - rep.rhs;

  // Nodal subsolution check with the grid Laplacian (the interpolant has no
  // pointwise second derivative).
  double worst = std::numeric_limits<double>::infinity();
  std::vector<double> flux(g.n() - 1);
  for (std::size_t i = 0; i + 1 < g.n(); ++i)
    flux[i] = 2.0 * kPi * g.face_r[i] * (w_field[i + 1] - w_field[i]) / (g.r[i + 1] - g.r[i]);
  for (std::size_t i = 0; i + 1 < g.n(); ++i) {
    const double incoming = (i > 0) ? flux[i - 1] : 0.0;
    const double lap = (flux[i] - incoming) / g.w[i];
    const double ew = std::exp(w_field[i]);
    worst = std::min(worst, (lap + ew) / (1.0 + ew));
  }
  rep.worst_subsolution_margin = worst;
  rep.subsolution_ok = worst >= -subsolution_tol;
  return rep;
}

double RearrangedField::value_at(double rho) const {
  if (radii.empty()) return 0.0;
  if (rho <= radii.front()) return values.front();
  auto it = std::lower_bound(radii.begin(), radii.end(), rho);
  if (it == radii.end()) return values.back();
  return values[static_cast<std::size_t>(it - radii.begin())];
}

double RearrangedField::super_level_radius(double t) const {
  // largest breakpoint radius whose value still exceeds t
  if (values.empty() || values.front() <= t) return 0.0;
  std::size_t lo = 0, hi = values.size();  // values nonincreasing
  while (lo + 1 < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (values[mid] > t)
      lo = mid;
    else
      hi = mid;
  }
  return radii[lo];
}

RearrangedField rearrange_equimeasurable(const RadialGrid& g, const Field& phi, const Field& v1,
                                         double theta, std::size_t n_sample) {
  if (phi.size() != g.n() || v1.size() != g.n())
    throw config_error("rearrange: fields off-grid");
  if (!(theta > 0.0)) throw config_error("rearrange: theta must be positive");

  const std::size_t n = g.n();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (phi[a] != phi[b]) return phi[a] > phi[b];
    return a < b;
  });

  RearrangedField rf;
  rf.theta = theta;
  double cum = 0.0;
  for (std::size_t k = 0; k < n;) {
    const double val = phi[order[k]];
    std::size_t j = k;
    while (j < n && val - phi[order[j]] <= 1e-13) {
      cum += g.w[order[j]] * std::exp(v1[order[j]]);
      ++j;
    }
    if (!(cum < kTotalBubbleMass))
      throw config_error("rearrange: target mass exceeds the bubble capacity 8 pi");
    rf.radii.push_back(bubble_radius_for_mass(theta, cum));
    rf.values.push_back(val);
    k = j;
  }
  rf.total_mass = cum;
  rf.outer_radius = rf.radii.back();
  for (std::size_t k = 0; k + 1 < rf.values.size(); ++k)
    if (rf.values[k + 1] > rf.values[k]) throw invariant_breach("rearrange: phi* not monotone");

  const double tmin = rf.values.back(), tmax = rf.values.front();
  for (std::size_t s = 0; s < n_sample; ++s) {
    const double t =
        tmin + (tmax - tmin) * (static_cast<double>(s) + 0.5) / static_cast<double>(n_sample);
    double base = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (phi[i] > t) base += g.w[i] * std::exp(v1[i]);
    const double ball = bubble_mass(theta, rf.super_level_radius(t));
    rf.sampled_t.push_back(t);
    rf.sampled_residual.push_back(std::abs(ball - base));
    rf.max_equimeasure_residual = std::max(rf.max_equimeasure_residual, std::abs(ball - base));
  }
  return rf;
}

double gradient_level_integral(const RadialGrid& g, const Field& phi, double t) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < g.n(); ++i) {
    const double da = phi[i] - t, db = phi[i + 1] - t;
    if ((da > 0.0 && db < 0.0) || (da < 0.0 && db > 0.0)) {
      const double h = g.r[i + 1] - g.r[i];
      const double frac = da / (da - db);
      const double rstar = g.r[i] + frac * h;
      total += 2.0 * kPi * rstar * std::abs(db - da) / h;
    }
  }
  return total;
}

double rearranged_gradient_integral(const RadialGrid& g, const Field& phi, const Field& v1,
                                    double t) {
  // crossing radii of {phi = t} and the co-area weight D in one sweep
  std::vector<double> crossings;
  double D = 0.0;
  for (std::size_t i = 0; i + 1 < g.n(); ++i) {
    const double da = phi[i] - t, db = phi[i + 1] - t;
    if ((da > 0.0 && db < 0.0) || (da < 0.0 && db > 0.0)) {
      const double h = g.r[i + 1] - g.r[i];
      const double frac = da / (da - db);
      const double rstar = g.r[i] + frac * h;
      const double slope = std::abs(db - da) / h;
      const double v1star = v1[i] + frac * (v1[i + 1] - v1[i]);
      crossings.push_back(rstar);
      D += 2.0 * kPi * rstar * std::exp(v1star) / slope;
    }
  }
  if (D == 0.0 || crossings.empty())
    return std::numeric_limits<double>::infinity();  // not a regular value

  // m(t) = int_{phi>t} e^{v1} over the union of annuli cut by the crossings,
  // quadratured on the interpolant for consistency with D
  const RadialProfile v1p = make_profile(g, v1);
  auto annulus = [&](double a, double b) {
    return adaptive_simpson([&](double s) { return 2.0 * kPi * s * std::exp(v1p.value(s)); }, a,
                            b, 1e-11);
  };
  double m = 0.0;
  double left = 0.0;
  bool inside = phi.front() > t;
  for (double rc : crossings) {
    if (inside) m += annulus(left, rc);
    left = rc;
    inside = !inside;
  }
  if (inside) m += annulus(left, g.R);
  return 0.5 * m * (kTotalBubbleMass - m) / D;
}

RadialLemmaReport check_radial_lemmas(const RadialProfile& psi, double theta1, double R,
                                      RadialLemmaSide side, double tail_theta) {
  if (!(theta1 > 0.0)) throw config_error("check_radial_lemmas: theta1 must be positive");
  if (!(R > 0.0)) throw config_error("check_radial_lemmas: R must be positive");
  const double theta2 = 8.0 / (R * R * theta1);  // the other bubble agreeing with U_theta1 at R
  if (tail_theta <= 0.0) tail_theta = theta1;

  RadialLemmaReport rep;
  const int n_sample = 200;
  const double mass_tol = 1e-6 * kTotalBubbleMass;
  double worst = std::numeric_limits<double>::infinity();

  if (side == RadialLemmaSide::inner || side == RadialLemmaSide::boundary_value) {
    // Hypothesis: 2 pi r |psi'(r)| <= int_{B_r} e^psi at a.e. r in (0, R).
    for (int j = 1; j < n_sample; ++j) {
      const double r = R * static_cast<double>(j) / n_sample;
      const double lhs = 2.0 * kPi * r * std::abs(profile_derivative(psi, r));
      const double rhs = ball_mass(psi, r, 1e-10);
      worst = std::min(worst, rhs - lhs);
    }
    rep.worst_hypothesis_margin = worst;
    rep.hypothesis_ok = worst >= -mass_tol;
    rep.inapplicable = !rep.hypothesis_ok;

    rep.psi_mass = ball_mass(psi, R, 1e-11);
    rep.bubble_mass_1 = bubble_mass(theta1, R);
    rep.bubble_mass_2 = bubble_mass(theta2, R);
    rep.psi_at_R = psi.value(R);

    if (side == RadialLemmaSide::inner) {
      rep.alternative_lower = rep.psi_mass <= rep.bubble_mass_1 + mass_tol;
      rep.alternative_upper = rep.psi_mass >= rep.bubble_mass_2 - mass_tol;
    } else {
      if (!(rep.psi_mass < kTotalBubbleMass))
        throw config_error("check_radial_lemmas: ball mass must stay below 8 pi");
      rep.matched_theta = std::sqrt(8.0 * rep.psi_mass /
                                    (R * R * (kTotalBubbleMass - rep.psi_mass)));
      rep.bubble_at_R = bubble_value(rep.matched_theta, R);
      rep.boundary_comparison_ok = rep.bubble_at_R <= rep.psi_at_R + 1e-8;
    }
    return rep;
  }

  // Outer side: psi lives on [R, r_max]; the mass beyond r_max is accounted
  // analytically as the tail of e^{U_tail}.
  const double rmax = psi.r_max;
  if (!(rmax > R)) throw config_error("check_radial_lemmas: outer profile must extend past R");
  const double tail = kTotalBubbleMass - bubble_mass(tail_theta, rmax);
  for (int j = 1; j < n_sample; ++j) {
    const double r = R + (rmax - R) * static_cast<double>(j) / n_sample;
    const double lhs = 2.0 * kPi * r * std::abs(profile_derivative(psi, r));
    const double outer = annulus_mass(psi, r, rmax, 1e-10) + tail;
    worst = std::min(worst, (kTotalBubbleMass - outer) - lhs);
  }
  rep.worst_hypothesis_margin = worst;
  rep.hypothesis_ok = worst >= -mass_tol;
  rep.inapplicable = !rep.hypothesis_ok;

  rep.psi_mass = annulus_mass(psi, R, rmax, 1e-11) + tail;
  rep.bubble_mass_1 = kTotalBubbleMass - bubble_mass(theta1, R);  // outer bubble masses
  rep.bubble_mass_2 = kTotalBubbleMass - bubble_mass(theta2, R);
  rep.sandwich_ok = rep.psi_mass >= rep.bubble_mass_2 - mass_tol &&
                    rep.psi_mass <= rep.bubble_mass_1 + mass_tol;
  return rep;
}

}  // namespace kslab

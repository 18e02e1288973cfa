#include "kslab/levelset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "kslab/errors.hpp"
#include "kslab/geometry.hpp"

namespace kslab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPlateauTol = 1e-13;  ///< nodal values this close form one plateau

// 5-point Gauss-Legendre on [a, b].
double gauss5(const std::function<double(double)>& f, double a, double b) {
  static const double x[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                              0.5384693101056831, 0.9061798459386640};
  static const double w[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                              0.4786286704993665, 0.2369268850561891};
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 5; ++i) s += w[i] * f(mid + half * x[i]);
  return s * half;
}

}  // namespace

NonlinearityPair make_pair(const RadialGrid& g, const Field& u, double lambda, double beta) {
  const double logS = log_int_exp(g, u);
  NonlinearityPair p;
  p.f = [lambda, logS](double t) { return lambda * std::exp(t - logS); };
  p.fprime = p.f;  // f' = f for the exponential nonlinearity
  p.g = [beta](double t) { return beta * t; };
  Field fu(u.size()), gu(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    fu[i] = p.f(u[i]);
    gu[i] = p.g(u[i]);
  }
  p.A_f = g.mean(fu);
  p.A_g = g.mean(gu);
  return p;
}

NonlinearityPair make_pair(const SteadySolution& sol) {
  return make_pair(sol.spec.grid, sol.u, sol.spec.lambda, sol.spec.beta);
}

NonlinearityPair make_custom_pair(const RadialGrid& g, const Field& u,
                                  std::function<double(double)> f,
                                  std::function<double(double)> fprime,
                                  std::function<double(double)> gg) {
  NonlinearityPair p;
  p.f = std::move(f);
  p.fprime = std::move(fprime);
  p.g = std::move(gg);
  Field fu(u.size()), gu(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    fu[i] = p.f(u[i]);
    gu[i] = p.g(u[i]);
  }
  p.A_f = g.mean(fu);
  p.A_g = g.mean(gu);
  return p;
}

// ---------------------------------------------------------------------------
// Table construction and atomic measure evaluation.
//
// Node values are kept sorted ascending (ties broken by node index); every
// measure below is a fresh accumulation over that canonical order, so two
// independent evaluations of the same set agree bit for bit.
// ---------------------------------------------------------------------------

double LevelSetTable::mu_at(double tv) const {
  double s = 0.0;
  for (std::size_t k = 0; k < node_value_.size(); ++k)
    if (node_value_[k] > tv) s += node_weight_[k];
  return s;
}

double LevelSetTable::mu_tilde_at(double tv) const {
  double s = 0.0;
  for (std::size_t k = 0; k < node_value_.size(); ++k)
    if (node_value_[k] < tv) s += node_weight_[k];
  return s;
}

double LevelSetTable::plateau_measure_at(double a) const {
  double s = 0.0;
  for (std::size_t k = 0; k < node_value_.size(); ++k)
    if (std::abs(node_value_[k] - a) <= kPlateauTol) s += node_weight_[k];
  return s;
}

double LevelSetTable::F_at(double tv) const {
  double s = 0.0;
  for (std::size_t k = 0; k < node_value_.size(); ++k)
    if (node_value_[k] > tv) s += node_weight_[k] * node_f_[k];
  return s;
}

double LevelSetTable::Ft_at(double tv) const {
  double s = 0.0;
  for (std::size_t k = 0; k < node_value_.size(); ++k)
    if (node_value_[k] < tv) s += node_weight_[k] * node_f_[k];
  return s;
}

double LevelSetTable::G_at(double tv) const {
  double s = 0.0;
  for (std::size_t k = 0; k < node_value_.size(); ++k)
    if (node_value_[k] > tv) s += node_weight_[k] * node_g_[k];
  return s;
}

double LevelSetTable::Gt_at(double tv) const {
  double s = 0.0;
  for (std::size_t k = 0; k < node_value_.size(); ++k)
    if (node_value_[k] < tv) s += node_weight_[k] * node_g_[k];
  return s;
}

LevelSetTable build_table(const RadialGrid& g, const Field& u, const NonlinearityPair& pair,
                          std::size_t n_levels) {
  if (u.size() != g.n()) throw config_error("build_table: field off-grid");
  if (n_levels < 64) throw config_error("build_table: need at least 64 levels");
  LevelSetTable tab;
  tab.pair = pair;
  tab.area = g.area();
  tab.A_f = pair.A_f;
  tab.A_g = pair.A_g;
  const auto [mn, mx] = std::minmax_element(u.begin(), u.end());
  tab.t0 = *mn;
  tab.t1 = *mx;
  if (tab.t1 - tab.t0 <= 1e-10) {
    tab.trivial = true;
    return tab;
  }

  const std::size_t n = g.n();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (u[a] != u[b]) return u[a] < u[b];
    return a < b;
  });
  tab.node_value_.resize(n);
  tab.node_weight_.resize(n);
  tab.node_f_.resize(n);
  tab.node_g_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    tab.node_value_[k] = u[order[k]];
    tab.node_weight_[k] = g.w[order[k]];
    tab.node_f_[k] = pair.f(u[order[k]]);
    tab.node_g_[k] = pair.g(u[order[k]]);
  }

  // Plateau-merged atoms.
  for (std::size_t k = 0; k < n;) {
    LevelAtom atom;
    atom.value = tab.node_value_[k];
    atom.weight = 0.0;
    std::size_t j = k;
    while (j < n && tab.node_value_[j] - atom.value <= kPlateauTol) {
      atom.weight += tab.node_weight_[j];
      ++j;
    }
    tab.atoms.push_back(atom);
    k = j;
  }

  // Critical values: the axis and boundary nodes (zero slope there for the
  // fields this table is used on) plus interior slope sign changes.
  tab.critical_values.push_back(u.front());
  tab.critical_values.push_back(u.back());
  double max_cell_range = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i)
    max_cell_range = std::max(max_cell_range, std::abs(u[i + 1] - u[i]));
  for (std::size_t i = 1; i + 1 < n; ++i)
    if ((u[i + 1] - u[i]) * (u[i] - u[i - 1]) <= 0.0) tab.critical_values.push_back(u[i]);
  std::sort(tab.critical_values.begin(), tab.critical_values.end());
  tab.critical_values.erase(
      std::unique(tab.critical_values.begin(), tab.critical_values.end()),
      tab.critical_values.end());
  tab.delta_exclusion = 2.0 * max_cell_range;

  tab.t.resize(n_levels);
  tab.mu.resize(n_levels);
  tab.mu_t.resize(n_levels);
  tab.F.resize(n_levels);
  tab.F_t.resize(n_levels);
  tab.G.resize(n_levels);
  tab.G_t.resize(n_levels);
  tab.Psi.resize(n_levels);
  tab.Psi_t.resize(n_levels);
  for (std::size_t k = 0; k < n_levels; ++k) {
    const double tv =
        tab.t0 + (tab.t1 - tab.t0) * static_cast<double>(k) / static_cast<double>(n_levels - 1);
    tab.t[k] = tv;
    tab.mu[k] = tab.mu_at(tv);
    tab.mu_t[k] = tab.mu_tilde_at(tv);
    tab.F[k] = tab.F_at(tv);
    tab.F_t[k] = tab.Ft_at(tv);
    tab.G[k] = tab.G_at(tv);
    tab.G_t[k] = tab.Gt_at(tv);
    const double ft = pair.f(tv);
    tab.Psi[k] = pair.A_g * ft * tab.mu[k] * tab.mu[k] - tab.F[k] * tab.F[k];
    tab.Psi_t[k] = pair.A_g * ft * tab.mu_t[k] * tab.mu_t[k] - tab.F_t[k] * tab.F_t[k];
  }
  return tab;
}

MeanValueReport mean_value(const RadialGrid& g, const Field& u,
                           const std::function<double(double)>& h, std::size_t n_sample) {
  if (u.size() != g.n()) throw config_error("mean_value: field off-grid");
  const auto [mn, mx] = std::minmax_element(u.begin(), u.end());
  const double t0 = *mn, t1 = *mx;
  const double scale = std::max({1.0, std::abs(h(t0)), std::abs(h(t1))});
  for (int k = 0; k + 1 < 1000; ++k) {
    const double a = t0 + (t1 - t0) * k / 999.0;
    const double b = t0 + (t1 - t0) * (k + 1) / 999.0;
    if (h(b) < h(a) - 1e-12 * scale)
      throw config_error("mean_value: weight function is not nondecreasing on the field range");
  }

  Field hu(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) hu[i] = h(u[i]);
  MeanValueReport rep;
  rep.A_h = g.mean(hu);

  double worst_sup = std::numeric_limits<double>::infinity();
  double worst_sub = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n_sample; ++k) {
    const double tv = t0 + (t1 - t0) * (static_cast<double>(k) + 0.5) /
                               static_cast<double>(n_sample);
    double mu = 0.0, mu_t = 0.0, H = 0.0, H_t = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (u[i] > tv) {
        mu += g.w[i];
        H += g.w[i] * hu[i];
      } else if (u[i] < tv) {
        mu_t += g.w[i];
        H_t += g.w[i] * hu[i];
      }
    }
    worst_sup = std::min(worst_sup, H - rep.A_h * mu);
    worst_sub = std::min(worst_sub, rep.A_h * mu_t - H_t);
  }
  rep.worst_super_margin = worst_sup;
  rep.worst_sub_margin = worst_sub;
  return rep;
}

std::vector<double> crossing_set(const NonlinearityPair& pair, double t_max) {
  const double hi = t_max + std::max(5.0, t_max);
  const int n_scan = 8000;
  auto d = [&](double t) { return pair.f(t) - pair.g(t); };
  std::vector<double> roots;
  double a = 0.0, da = d(a);
  for (int k = 1; k <= n_scan; ++k) {
    const double b = hi * static_cast<double>(k) / n_scan;
    const double db = d(b);
    if (da == 0.0) roots.push_back(a);
    if ((da < 0.0) != (db < 0.0)) {
      double lo = a, up = b, dlo = da;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + up);
        const double dm = d(mid);
        if ((dlo < 0.0) == (dm < 0.0)) {
          lo = mid;
          dlo = dm;
        } else {
          up = mid;
        }
        if (up - lo < 1e-14 * (1.0 + up)) break;
      }
      roots.push_back(0.5 * (lo + up));
    }
    a = b;
    da = db;
  }
  // Tangential roots (f - g touching zero without a sign change): locate local
  // minima of |d| and keep those that reach zero to tolerance.
  double prev2 = d(0.0), prev1 = d(hi / n_scan);
  for (int k = 2; k <= n_scan; ++k) {
    const double x = hi * static_cast<double>(k) / n_scan;
    const double cur = d(x);
    if (std::abs(prev1) < std::abs(prev2) && std::abs(prev1) <= std::abs(cur)) {
      // refine the extremum of d by golden-section on |d|
      double lo = hi * static_cast<double>(k - 2) / n_scan, up = x;
      for (int it = 0; it < 120; ++it) {
        const double m1 = lo + (up - lo) * 0.381966;
        const double m2 = up - (up - lo) * 0.381966;
        if (std::abs(d(m1)) < std::abs(d(m2)))
          up = m2;
        else
          lo = m1;
      }
      const double t_ext = 0.5 * (lo + up);
      const double scale = std::abs(pair.f(t_ext)) + std::abs(pair.g(t_ext)) + 1.0;
      if (std::abs(d(t_ext)) <= 1e-9 * scale) roots.push_back(t_ext);
    }
    prev2 = prev1;
    prev1 = cur;
  }

  // Merge near-duplicates from tangential sign flips.
  std::sort(roots.begin(), roots.end());
  std::vector<double> out;
  for (double r : roots)
    if (out.empty() || r - out.back() > 1e-7 * (1.0 + std::abs(r))) out.push_back(r);
  return out;
}

PsiMonotonicityReport verify_monotone_psi(const LevelSetTable& table,
                                          const std::vector<double>& crossings) {
  if (table.trivial) throw config_error("verify_monotone_psi: trivial table");
  PsiMonotonicityReport rep;
  rep.worst_backward_step = std::numeric_limits<double>::infinity();
  rep.worst_step_psi = std::numeric_limits<double>::infinity();
  rep.worst_step_psi_tilde = std::numeric_limits<double>::infinity();
  const double delta = table.delta_exclusion;
  auto admissible = [&](double tv) {
    for (double a : crossings)
      if (std::abs(tv - a) < delta) return false;
    for (double c : table.critical_values)
      if (std::abs(tv - c) < delta) return false;
    return true;
  };
  auto same_interval = [&](double a, double b) {
    for (double c : crossings)
      if (a < c && c < b) return false;
    return true;
  };
  for (std::size_t k = 0; k + 1 < table.t.size(); ++k) {
    const double ta = table.t[k], tb = table.t[k + 1];
    if (!admissible(ta) || !admissible(tb) || !same_interval(ta, tb)) {
      ++rep.n_excluded;
      continue;
    }
    const double d1 = table.Psi[k + 1] - table.Psi[k];
    const double d2 = table.Psi_t[k + 1] - table.Psi_t[k];
    rep.worst_step_psi = std::min(rep.worst_step_psi, d1);
    rep.worst_step_psi_tilde = std::min(rep.worst_step_psi_tilde, d2);
    const double worst = std::min(d1, d2);
    if (worst < rep.worst_backward_step) {
      rep.worst_backward_step = worst;
      rep.worst_t = ta;
    }
    ++rep.n_checked;
  }
  if (rep.n_checked == 0) {
    rep.worst_backward_step = 0.0;
    rep.worst_step_psi = 0.0;
    rep.worst_step_psi_tilde = 0.0;
  }
  return rep;
}

std::vector<JumpReport> verify_jump_positivity(const LevelSetTable& table,
                                               const std::vector<double>& crossings) {
  if (table.trivial) throw config_error("verify_jump_positivity: trivial table");
  std::vector<JumpReport> out;
  const double range = table.t1 - table.t0;
  for (double a : crossings) {
    JumpReport jr;
    jr.a = a;
    jr.plateau_measure = table.plateau_measure_at(a);
    jr.degenerate =
        std::abs(a - table.t0) <= 1e-12 * range || std::abs(a - table.t1) <= 1e-12 * range;
    const double fa = table.pair.f(a);
    const double Ag = table.A_g;
    const double mu = table.mu_at(a);
    const double mu_t = table.mu_tilde_at(a);
    const double F = table.F_at(a);
    const double F_t = table.Ft_at(a);
    const double gam = jr.plateau_measure;

    const double psi_plus = Ag * fa * mu * mu - F * F;
    const double psi_minus =
        Ag * fa * (mu + gam) * (mu + gam) - (F + fa * gam) * (F + fa * gam);
    const double psit_plus =
        Ag * fa * (mu_t + gam) * (mu_t + gam) - (F_t + fa * gam) * (F_t + fa * gam);
    const double psit_minus = Ag * fa * mu_t * mu_t - F_t * F_t;

    jr.jump_from_limits = (psi_plus - psi_minus) + (psit_plus - psit_minus);
    jr.jump_closed_form = 2.0 * fa * gam * ((F - mu * Ag) + (mu_t * Ag - F_t));
    out.push_back(jr);
  }
  return out;
}

IntegralInequalityReport verify_integral_inequality(const RadialGrid& g, const Field& u,
                                                    const NonlinearityPair& pair,
                                                    InequalityVariant variant, unsigned m) {
  const LevelSetTable tab = build_table(g, u, pair, 64);
  if (tab.trivial) throw config_error("verify_integral_inequality: constant field");

  IntegralInequalityReport rep;
  rep.variant = variant;
  const double area = g.area();

  for (std::size_t k = 0; k + 1 < tab.atoms.size(); ++k) {
    const double a = tab.atoms[k].value;
    const double b = tab.atoms[k + 1].value;
    const double tmid = 0.5 * (a + b);
    const double mu = tab.mu_at(tmid);  // constant on the open gap
    const double weight_mu = mu * (area - mu);

    // int_a^b f'(t) dt = f(b) - f(a), exactly.
    rep.lhs += 0.5 * pair.A_g * (pair.f(b) - pair.f(a)) * weight_mu;

    switch (variant) {
      case InequalityVariant::isoperimetric: {
        const double prof = disc_isoperimetric_profile(std::clamp(mu, 0.0, area), g.R);
        rep.rhs += prof * prof * gauss5(pair.f, a, b);
        break;
      }
      case InequalityVariant::perimeter: {
        rep.rhs += gauss5(
            [&](double t) {
              const double per = level_perimeter(g, u, t);
              return pair.f(t) * per * per;
            },
            a, b);
        break;
      }
      case InequalityVariant::g_isoperimetric: {
        const double bound = g_profile_ratio_bound(m, area);
        rep.rhs += bound * weight_mu * gauss5(pair.f, a, b);
        break;
      }
    }
  }
  rep.margin = rep.lhs - rep.rhs;
  return rep;
}

ThresholdBoundReport threshold_bound_from_inequality(const SteadySolution& sol) {
  ThresholdBoundReport rep;
  rep.lambda = sol.spec.lambda;
  const RadialGrid& g = sol.spec.grid;
  const auto [mn, mx] = std::minmax_element(sol.u.begin(), sol.u.end());
  if (*mx - *mn <= 1e-10) return rep;  // constant solution: not applicable
  rep.applicable = true;
  const double area = g.area();
  // inf over s in (0,|B|) of 4 pi / max(s, |B|-s) is attained as s -> 0 or |B|.
  rep.implied_bound_general = 2.0 * area * (4.0 * kPi / area);
  rep.implied_bound_disc = 2.0 * area * (16.0 / (kPi * area));
  rep.respects_general = rep.lambda > rep.implied_bound_general;
  rep.respects_disc = rep.lambda > rep.implied_bound_disc;
  return rep;
}

double level_perimeter(const RadialGrid& g, const Field& u, double t) {
  double per = 0.0;
  for (std::size_t i = 0; i + 1 < g.n(); ++i) {
    const double da = u[i] - t, db = u[i + 1] - t;
    if ((da > 0.0 && db < 0.0) || (da < 0.0 && db > 0.0)) {
      const double frac = da / (da - db);
      per += 2.0 * kPi * (g.r[i] + frac * (g.r[i + 1] - g.r[i]));
    }
  }
  return per;
}

}  // namespace kslab

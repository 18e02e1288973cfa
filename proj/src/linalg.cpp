#include "kslab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kslab/errors.hpp"

namespace kslab {

Tridiagonal Tridiagonal::zero(std::size_t n) {
  Tridiagonal t;
  t.diag.assign(n, 0.0);
  t.lower.assign(n > 0 ? n - 1 : 0, 0.0);
  t.upper.assign(n > 0 ? n - 1 : 0, 0.0);
  return t;
}

std::vector<double> Tridiagonal::apply(const std::vector<double>& x) const {
  const std::size_t m = n();
  if (x.size() != m) throw config_error("tridiagonal apply: size mismatch");
  std::vector<double> y(m);
  for (std::size_t i = 0; i < m; ++i) {
    double s = diag[i] * x[i];
    if (i > 0) s += lower[i - 1] * x[i - 1];
    if (i + 1 < m) s += upper[i] * x[i + 1];
    y[i] = s;
  }
  return y;
}

TridiagonalFactor::TridiagonalFactor(const Tridiagonal& a)
    : lower_(a.lower), piv_(a.diag), upper_(a.upper) {
  const std::size_t n = a.n();
  double max_diag = 0.0, min_piv = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(a.diag[i]));
  for (std::size_t i = 1; i < n; ++i) {
    if (piv_[i - 1] == 0.0) {
      min_piv = 0.0;
      break;
    }
    const double m = lower_[i - 1] / piv_[i - 1];
    lower_[i - 1] = m;
    piv_[i] -= m * upper_[i - 1];
    min_piv = std::min(min_piv, std::abs(piv_[i - 1]));
  }
  if (n > 0) min_piv = std::min(min_piv, std::abs(piv_[n - 1]));
  cond_ = (min_piv > 0.0) ? max_diag / min_piv : std::numeric_limits<double>::infinity();
}

std::vector<double> TridiagonalFactor::solve(const std::vector<double>& rhs) const {
  const std::size_t n = piv_.size();
  if (rhs.size() != n) throw config_error("tridiagonal solve: size mismatch");
  std::vector<double> x(rhs);
  for (std::size_t i = 1; i < n; ++i) x[i] -= lower_[i - 1] * x[i - 1];
  x[n - 1] /= piv_[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = (x[i] - upper_[i] * x[i + 1]) / piv_[i];
  return x;
}

RankOneUpdatedSolver::RankOneUpdatedSolver(const Tridiagonal& t, std::vector<double> a,
                                           std::vector<double> b, bool regularize_banded)
    : a_(std::move(a)), b_(std::move(b)) {
  if (a_.size() != t.n() || b_.size() != t.n())
    throw config_error("rank-one solver: vector size mismatch");
  factor_ = std::make_unique<TridiagonalFactor>(t);
  if (regularize_banded && factor_->near_singular(1e13)) {
    double scale = 0.0;
    for (double d : t.diag) scale = std::max(scale, std::abs(d));
    Tridiagonal shifted = t;
    const double delta = 1e-7 * std::max(1.0, scale);
    for (double& d : shifted.diag) d += delta;
    factor_ = std::make_unique<TridiagonalFactor>(shifted);
  }
  z_ = factor_->solve(a_);
  denom_ = 1.0 + dot(b_, z_);
}

std::vector<double> RankOneUpdatedSolver::solve(const std::vector<double>& rhs) const {
  std::vector<double> y = factor_->solve(rhs);
  const double c = dot(b_, y) / denom_;
  for (std::size_t i = 0; i < y.size(); ++i) y[i] -= c * z_[i];
  return y;
}

double RankOneUpdatedSolver::condition_estimate() const {
  const double banded = factor_->condition_estimate();
  if (std::abs(denom_) < 1e-300) return std::numeric_limits<double>::infinity();
  return std::max(banded, banded / std::abs(denom_));
}

double dot(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

namespace {

double hypot2(double a, double b) { return std::hypot(a, b); }

// Householder reduction of a symmetric matrix to tridiagonal form, without
// accumulating the transformation (eigenvalues only).
void householder_tridiag(std::vector<double>& a, std::size_t n, std::vector<double>& d,
                         std::vector<double>& e) {
  auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
  d.assign(n, 0.0);
  e.assign(n, 0.0);
  for (std::size_t i = n - 1; i >= 1; --i) {
    const std::size_t l = i - 1;
    double h = 0.0, scale = 0.0;
    if (l > 0) {
      for (std::size_t k = 0; k <= l; ++k) scale += std::abs(at(i, k));
      if (scale == 0.0) {
        e[i] = at(i, l);
      } else {
        for (std::size_t k = 0; k <= l; ++k) {
          at(i, k) /= scale;
          h += at(i, k) * at(i, k);
        }
        double f = at(i, l);
        double g = (f >= 0.0) ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale * g;
        h -= f * g;
        at(i, l) = f - g;
        f = 0.0;
        for (std::size_t j = 0; j <= l; ++j) {
          g = 0.0;
          for (std::size_t k = 0; k <= j; ++k) g += at(j, k) * at(i, k);
          for (std::size_t k = j + 1; k <= l; ++k) g += at(k, j) * at(i, k);
          e[j] = g / h;
          f += e[j] * at(i, j);
        }
        const double hh = f / (h + h);
        for (std::size_t j = 0; j <= l; ++j) {
          f = at(i, j);
          e[j] = g = e[j] - hh * f;
          for (std::size_t k = 0; k <= j; ++k) at(j, k) -= f * e[k] + g * at(i, k);
        }
      }
    } else {
      e[i] = at(i, l);
    }
    d[i] = h;
  }
  e[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i) d[i] = at(i, i);
}

// Implicit-shift QL on a symmetric tridiagonal matrix; eigenvalues in d.
void tridiag_ql(std::vector<double>& d, std::vector<double>& e) {
  const std::size_t n = d.size();
  if (n == 0) return;
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
      }
      if (m != l) {
        if (++iter == 60) throw numerical_error("eigen: QL iteration failed to converge");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = hypot2(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        for (std::size_t i = m; i-- > l;) {
          double f = s * e[i];
          const double b = c * e[i];
          r = hypot2(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
        }
        if (r == 0.0 && m >= l + 2) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

}  // namespace

std::vector<double> symmetric_eigenvalues(std::vector<double> a, std::size_t n) {
  if (a.size() != n * n) throw config_error("symmetric_eigenvalues: bad matrix size");
  std::vector<double> d, e;
  householder_tridiag(a, n, d, e);
  tridiag_ql(d, e);
  std::sort(d.begin(), d.end());
  return d;
}

std::vector<double> inverse_iteration(const Tridiagonal& t, const std::vector<double>& a,
                                      const std::vector<double>& b, double sigma,
                                      std::size_t max_iter) {
  const std::size_t n = t.n();
  Tridiagonal shifted = t;
  // Nudge the shift if it lands exactly on an eigenvalue.
  double shift = sigma;
  for (int attempt = 0; attempt < 4; ++attempt) {
    for (std::size_t i = 0; i < n; ++i) shifted.diag[i] = t.diag[i] - shift;
    RankOneUpdatedSolver solver(shifted, a, b);
    if (solver.condition_estimate() > 1e15) {
      shift += (std::abs(sigma) + 1.0) * 1e-8;
      continue;
    }
    std::vector<double> v(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + 1e-3 * static_cast<double>(i % 7);
    for (std::size_t it = 0; it < max_iter; ++it) {
      v = solver.solve(v);
      double m = 0.0;
      for (double x : v) m = std::max(m, std::abs(x));
      if (!(m > 0.0) || !std::isfinite(m)) throw numerical_error("inverse iteration broke down");
      for (double& x : v) x /= m;
    }
    double m = 0.0;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (std::abs(v[i]) > m) {
        m = std::abs(v[i]);
        arg = i;
      }
    const double sign = (v[arg] >= 0.0) ? 1.0 : -1.0;
    for (double& x : v) x *= sign / m;
    return v;
  }
  throw numerical_error("inverse iteration: shift kept hitting a singular matrix");
}

}  // namespace kslab

#include "kslab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kslab/errors.hpp"

namespace kslab {

namespace {

constexpr double kPi = std::numbers::pi;

// Build faces and cell areas from a strictly increasing node vector.
void finish_grid(RadialGrid& g) {
  const std::size_t n = g.r.size();
  g.face_r.resize(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) g.face_r[i] = 0.5 * (g.r[i] + g.r[i + 1]);

  g.w.resize(n);
  double prev = 0.0;  // inner face of cell i; r=0 for the center cell
  for (std::size_t i = 0; i < n; ++i) {
    const double outer = (i + 1 < n) ? g.face_r[i] : g.R;
    g.w[i] = kPi * (outer * outer - prev * prev);
    prev = outer;
  }
}

}  // namespace

double RadialGrid::integrate(const Field& f) const {
  if (f.size() != r.size()) throw config_error("integrate: field size does not match grid");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * f[i];
  return s;
}

double RadialGrid::mean(const Field& f) const { return integrate(f) / area(); }

double RadialGrid::area() const { return kPi * R * R; }

double RadialGrid::interp(const Field& f, double rho) const {
  if (f.size() != r.size()) throw config_error("interp: field size does not match grid");
  if (rho <= r.front()) return f.front();
  if (rho >= r.back()) return f.back();
  auto it = std::upper_bound(r.begin(), r.end(), rho);
  const std::size_t i = static_cast<std::size_t>(it - r.begin()) - 1;
  const double t = (rho - r[i]) / (r[i + 1] - r[i]);
  return (1.0 - t) * f[i] + t * f[i + 1];
}

RadialGrid build_radial_grid(std::size_t n, double R) {
  if (n < 16) throw config_error("build_radial_grid: need at least 16 nodes");
  if (!(R > 0.0)) throw config_error("build_radial_grid: radius must be positive");
  RadialGrid g;
  g.R = R;
  g.r.resize(n);
  const double h = R / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) g.r[i] = static_cast<double>(i) * h;
  g.r.back() = R;
  finish_grid(g);
  return g;
}

RadialGrid build_clustered_radial_grid(std::size_t n, double R, double strength) {
  if (n < 16) throw config_error("build_clustered_radial_grid: need at least 16 nodes");
  if (!(R > 0.0)) throw config_error("build_clustered_radial_grid: radius must be positive");
  if (!(strength >= 0.0)) throw config_error("build_clustered_radial_grid: strength must be >= 0");
  if (strength == 0.0) return build_radial_grid(n, R);
  RadialGrid g;
  g.R = R;
  g.r.resize(n);
  const double th = std::tanh(strength);
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = static_cast<double>(i) / static_cast<double>(n - 1);
    g.r[i] = R * std::tanh(strength * xi) / th;  // fine spacing near r = R
  }
  g.r.front() = 0.0;
  g.r.back() = R;
  finish_grid(g);
  return g;
}

RadialGrid build_radial_grid_from_nodes(std::vector<double> nodes) {
  if (nodes.size() < 16) throw config_error("grid from nodes: need at least 16 nodes");
  RadialGrid g;
  g.R = nodes.back();
  g.r = std::move(nodes);
  if (g.r.front() != 0.0 || !(g.R > 0.0))
    throw config_error("grid from nodes: nodes must run from 0 to R > 0");
  for (std::size_t i = 0; i + 1 < g.r.size(); ++i)
    if (!(g.r[i] < g.r[i + 1])) throw config_error("grid from nodes: not strictly increasing");
  finish_grid(g);
  return g;
}

void validate_grid(const RadialGrid& g) {
  const std::size_t n = g.n();
  if (n < 16) throw invariant_breach("grid: fewer than 16 nodes");
  if (g.r.front() != 0.0) throw invariant_breach("grid: first node must be r = 0");
  if (g.r.back() != g.R) throw invariant_breach("grid: last node must be r = R");
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (!(g.r[i] < g.r[i + 1])) throw invariant_breach("grid: nodes not strictly increasing");
  double sum = 0.0;
  for (double wi : g.w) {
    if (!(wi > 0.0)) throw invariant_breach("grid: nonpositive quadrature weight");
    sum += wi;
  }
  if (std::abs(sum - g.area()) > 1e-12 * g.area())
    throw invariant_breach("grid: weights do not sum to the disc area");
}

double sup_norm(const Field& f) {
  double m = 0.0;
  for (double v : f) m = std::max(m, std::abs(v));
  return m;
}

double sup_distance(const Field& a, const Field& b) {
  if (a.size() != b.size()) throw config_error("sup_distance: size mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

bool all_finite(const Field& f) {
  for (double v : f)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace kslab

#pragma once

#include <cstddef>
#include <vector>

namespace kslab {

/// Nodal values of a radial function; index i corresponds to RadialGrid::r[i].
using Field = std::vector<double>;

/// Discretization of the disc of radius R in the radial variable.
///
/// Nodes run from r[0] = 0 to r[n-1] = R.  The quadrature weight w[i] is the
/// area of the finite-volume cell around node i (faces at midpoints between
/// nodes, half cells at the ends), so that
///
///     integrate(f) = sum_i w[i] f(r[i])  ~  int_B f(|x|) dx.
///
/// The weights are all positive, sum to pi R^2 exactly (the cell areas
/// telescope), integrate constants exactly, and are second-order accurate for
/// smooth integrands.  The same cells define the discrete radial Laplacian in
/// steady.hpp, which makes that operator self-adjoint and exactly conservative
/// with respect to this quadrature.
struct RadialGrid {
  double R = 1.0;
  std::vector<double> r;       ///< nodes, strictly increasing, r.front()=0, r.back()=R
  std::vector<double> w;       ///< cell areas (quadrature weights)
  std::vector<double> face_r;  ///< n-1 interior face radii, face_r[i] between r[i], r[i+1]

  std::size_t n() const { return r.size(); }

  double integrate(const Field& f) const;

  /// (1/|B|) * integrate(f)
  double mean(const Field& f) const;

  double area() const;  ///< pi R^2

  /// Linear interpolation of nodal values at radius rho in [0, R].
  double interp(const Field& f, double rho) const;
};

/// Uniform grid with n >= 16 nodes on [0, R].
RadialGrid build_radial_grid(std::size_t n, double R = 1.0);

/// Grid with nodes clustered toward r = R (tanh map, strength a > 0) for
/// boundary-layer resolution in Dirichlet runs.  a -> 0 recovers uniform.
RadialGrid build_clustered_radial_grid(std::size_t n, double R, double strength);

/// Grid over an explicit node vector (0 = r_0 < ... < r_{n-1} = R); used when
/// replaying stored solutions.
RadialGrid build_radial_grid_from_nodes(std::vector<double> nodes);

/// Throws invariant_breach if the grid violates its declared invariants.
void validate_grid(const RadialGrid& g);

/// Sample a callable f(r) at the grid nodes.
template <typename F>
Field sample(const RadialGrid& g, F&& f) {
  Field out(g.n());
  for (std::size_t i = 0; i < g.n(); ++i) out[i] = f(g.r[i]);
  return out;
}

double sup_norm(const Field& f);
double sup_distance(const Field& a, const Field& b);
bool all_finite(const Field& f);

}  // namespace kslab

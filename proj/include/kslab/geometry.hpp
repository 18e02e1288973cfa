#pragma once

#include <cstddef>

namespace kslab {

/// Symmetry class for fields on the disc: the trivial group, or the cyclic
/// group generated by rotation through 2*pi/m (m >= 2).  Radial fields are
/// invariant under every rotation, hence belong to every class handled here.
struct SymmetryGroup {
  enum class Kind { trivial, rotation };
  Kind kind = Kind::trivial;
  unsigned m = 0;  ///< rotation order, >= 2 when kind == rotation

  static SymmetryGroup trivial() { return {Kind::trivial, 0}; }
  static SymmetryGroup rotation(unsigned m);
};

/// Relative isoperimetric profile of the disc of radius R: the least length,
/// inside the disc, of a boundary separating a subset of area s from its
/// complement.  The minimizers are circular arcs meeting the boundary circle
/// orthogonally (with the diameter as the limiting member), so the profile is
/// computed by inverting the area of that one-parameter family, bisecting the
/// family parameter until the enclosed area matches s to 1e-10.
///
/// Satisfies I(0) = I(pi R^2) = 0, the symmetry I(s) = I(pi R^2 - s), and
/// I(s) > 0 strictly in between.
double disc_isoperimetric_profile(double s, double R = 1.0);

/// Strict lower bound for the rotation-symmetric profile:
/// [I^G(s)]^2 / (s(|B|-s)) > min{4*pi/|B|, 16*m/(pi*|B|)} for the cyclic group
/// of order m on a disc of area |B|.
double g_profile_ratio_bound(unsigned m, double disc_area);

/// Uniqueness threshold for m-fold rotationally symmetric solutions on the
/// unit disc: 64/pi for m = 2, 8*pi for m >= 3.
double lambda_threshold(unsigned m);

}  // namespace kslab

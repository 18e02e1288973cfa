#pragma once

#include <cstddef>
#include <memory>
#include <vector>

namespace kslab {

/// Tridiagonal matrix: diag[i] on the diagonal, lower[i] = A(i+1,i),
/// upper[i] = A(i,i+1) for i = 0..n-2.
struct Tridiagonal {
  std::vector<double> lower, diag, upper;

  std::size_t n() const { return diag.size(); }
  static Tridiagonal zero(std::size_t n);
  std::vector<double> apply(const std::vector<double>& x) const;
};

/// LU factorization of a tridiagonal matrix (Thomas algorithm, no pivoting;
/// the operators assembled here are irreducibly diagonally dominant away from
/// bifurcation points, where near-singularity is detected instead).
class TridiagonalFactor {
 public:
  explicit TridiagonalFactor(const Tridiagonal& a);

  std::vector<double> solve(const std::vector<double>& rhs) const;

  /// max |diag| / min |pivot|; a cheap condition estimate used to flag
  /// near-singular Jacobians.
  double condition_estimate() const { return cond_; }
  bool near_singular(double threshold = 1e12) const { return !(cond_ < threshold); }

 private:
  std::vector<double> lower_, piv_, upper_;
  double cond_ = 0.0;
};

/// Solver for (T + a b^T) x = rhs via one factorization of T and the
/// Sherman-Morrison update
///     x = y - (b^T y) / (1 + b^T z) * z,   T y = rhs,  T z = a.
///
/// The banded part may be singular while the updated matrix is regular (the
/// zero-flux Laplacian loses its constant null space only through the
/// rank-one term); regularize_banded shifts such a T by a small diagonal so
/// the elimination stays stable, which perturbs the solve at the level of the
/// shift.  Shift-invert callers (inverse iteration) must leave it off.
class RankOneUpdatedSolver {
 public:
  RankOneUpdatedSolver(const Tridiagonal& t, std::vector<double> a, std::vector<double> b,
                       bool regularize_banded = false);

  std::vector<double> solve(const std::vector<double>& rhs) const;

  /// Condition estimate of the full updated matrix: combines the banded
  /// estimate with the smallness of the Sherman-Morrison denominator.
  double condition_estimate() const;
  bool near_singular(double threshold = 1e12) const { return !(condition_estimate() < threshold); }

  /// 1 + b^T T^{-1} a; vanishes where the updated matrix is singular.
  double denominator() const { return denom_; }

 private:
  std::unique_ptr<TridiagonalFactor> factor_;
  std::vector<double> a_, b_, z_;
  double denom_ = 1.0;
};

/// All eigenvalues (ascending) of a dense symmetric matrix, stored row-major.
/// Householder tridiagonalization followed by implicit-shift QL.
std::vector<double> symmetric_eigenvalues(std::vector<double> a, std::size_t n);

/// Eigenvector of (T + a b^T) closest to the shift sigma, by inverse
/// iteration; returns the vector normalized to sup-norm 1.
std::vector<double> inverse_iteration(const Tridiagonal& t, const std::vector<double>& a,
                                      const std::vector<double>& b, double sigma,
                                      std::size_t max_iter = 50);

double dot(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace kslab

#pragma once

// Dense symmetric linear algebra shared by every other module.

#include <Eigen/Dense>

namespace envkit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Symmetric p x p matrix with finite entries. The input is symmetrized as
/// (A + A^T) / 2 on construction.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Matrix& a);

  static SymMatrix identity(Eigen::Index p);
  static SymMatrix diagonal(const Vector& d);

  Eigen::Index dim() const { return a_.rows(); }
  const Matrix& mat() const { return a_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return a_(i, j); }

 private:
  Matrix a_;
};

/// p x k matrix with orthonormal columns (G^T G = I within 1e-10 Frobenius).
class SemiOrthoBasis {
 public:
  SemiOrthoBasis() = default;
  explicit SemiOrthoBasis(const Matrix& g);

  /// Orthonormalizes the columns of `g` by Householder QR. Column signs
  /// follow the sign of the diagonal of R so spans and orientation match `g`.
  static SemiOrthoBasis from_columns(const Matrix& g);

  Eigen::Index rows() const { return g_.rows(); }
  Eigen::Index cols() const { return g_.cols(); }
  const Matrix& mat() const { return g_; }

 private:
  Matrix g_;
};

struct SymEigen {
  Vector values;   // descending
  Matrix vectors;  // column i pairs with values(i)
};

SymEigen eigen_sym(const SymMatrix& a);

/// log|A| through a Cholesky factor. Throws NotPositiveDefinite.
double logdet_spd(const SymMatrix& a);

/// Solves A X = B for SPD A. Throws NotPositiveDefinite.
Matrix spd_solve(const SymMatrix& a, const Matrix& b);

/// Inverse of an SPD matrix, symmetrized.
SymMatrix spd_inverse(const SymMatrix& a);

/// Orthonormal basis of span(G)^perp from a complete Householder QR of G.
/// Throws DimensionError when G is square.
SemiOrthoBasis orthonormal_complement(const SemiOrthoBasis& g);

/// Largest principal angle between span(G1) and span(G2), in [0, pi/2].
double subspace_angle(const SemiOrthoBasis& g1, const SemiOrthoBasis& g2);

/// Flips each column so that its first entry with |x| > 1e-12 is positive.
void canonicalize_signs(Matrix& g);

/// Orthogonality defect ||G^T G - I||_F.
double orthogonality_error(const Matrix& g);

}  // namespace envkit

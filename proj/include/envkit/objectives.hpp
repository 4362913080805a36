#pragma once

// Envelope objective functions and their Euclidean gradients.
//
//   J(G)   = log|G^T M G| + log|G^T (M + U)^{-1} G|       G: p x k
//   phi(v) = log(v^T M v) + log(v^T (M + U)^{-1} v)       v: unit vector
//
// Both are minimized. J is invariant under G -> G O for orthogonal O, so it
// depends only on span(G).

#include <cstddef>

#include "envkit/linalg.hpp"

namespace envkit {

/// The pair (M, U) driving envelope estimation, plus the sample size behind
/// it. M is SPD, U is PSD. The inverse of M + U is computed once here and
/// shared read-only by every objective evaluation.
class MomentPair {
 public:
  /// Empty placeholder; dim() == 0.
  MomentPair() = default;
  MomentPair(SymMatrix m, SymMatrix u, std::size_t n);

  const SymMatrix& M() const { return m_; }
  const SymMatrix& U() const { return u_; }
  std::size_t n() const { return n_; }
  Eigen::Index dim() const { return m_.dim(); }

  /// (M + U)^{-1}
  const Matrix& inv_mu() const { return inv_mu_; }

  /// log|M| - log|M + U|, the value of J for any square orthogonal G.
  double full_dimension_value() const { return logdet_m_ - logdet_mu_; }

 private:
  SymMatrix m_;
  SymMatrix u_;
  std::size_t n_ = 0;
  Matrix inv_mu_;
  double logdet_m_ = 0.0;
  double logdet_mu_ = 0.0;
};

double j_objective(const SemiOrthoBasis& g, const MomentPair& mp);
Matrix j_gradient(const SemiOrthoBasis& g, const MomentPair& mp);

/// Unconstrained forms used by the solver and finite-difference checks; G
/// only needs full column rank. Returns J and writes the gradient if `grad`
/// is non-null.
double j_value_grad(const Matrix& g, const MomentPair& mp, Matrix* grad);

/// phi for one deflation step. Holds (Mk + Uk)^{-1} so repeated evaluations
/// at different v do not refactor.
class PhiProblem {
 public:
  PhiProblem(const SymMatrix& mk, const SymMatrix& uk);

  Eigen::Index dim() const { return mk_.dim(); }
  const SymMatrix& Mk() const { return mk_; }
  const SymMatrix& Uk() const { return uk_; }
  const SymMatrix& inv_mu() const { return inv_mu_; }

  double value(const Vector& v) const;
  double value_grad(const Vector& v, Vector* grad) const;

 private:
  SymMatrix mk_;
  SymMatrix uk_;
  SymMatrix inv_mu_;
};

double phi_objective(const Vector& v, const SymMatrix& mk, const SymMatrix& uk);
Vector phi_gradient(const Vector& v, const SymMatrix& mk, const SymMatrix& uk);

}  // namespace envkit

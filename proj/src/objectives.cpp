#include "envkit/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "envkit/error.hpp"

namespace envkit {

MomentPair::MomentPair(SymMatrix m, SymMatrix u, std::size_t n)
    : m_(std::move(m)), u_(std::move(u)), n_(n) {
  if (m_.dim() != u_.dim() || m_.dim() == 0) {
    throw Error(ErrorCode::DimensionError, "M and U must be non-empty and of equal dimension");
  }
  if (n_ == 0) throw Error(ErrorCode::InvalidConfig, "moment pair needs n >= 1");
  logdet_m_ = logdet_spd(m_);
  const SymMatrix mu(m_.mat() + u_.mat());
  logdet_mu_ = logdet_spd(mu);
  const double min_u = eigen_sym(u_).values.minCoeff();
  const double scale = std::max(1.0, u_.mat().cwiseAbs().maxCoeff());
  if (min_u < -1e-10 * scale) {
    throw Error(ErrorCode::InvalidMatrix, "U is not positive semi-definite (min eigenvalue " +
                                              std::to_string(min_u) + ")");
  }
  inv_mu_ = spd_inverse(mu).mat();
}

double j_value_grad(const Matrix& g, const MomentPair& mp, Matrix* grad) {
  if (g.rows() != mp.dim() || g.cols() < 1) {
    throw Error(ErrorCode::DimensionError, "basis shape does not match moment pair");
  }
  const Matrix mg = mp.M().mat() * g;
  const Matrix ng = mp.inv_mu() * g;
  const SymMatrix a(g.transpose() * mg);
  const SymMatrix b(g.transpose() * ng);
  Eigen::LLT<Matrix> la(a.mat());
  Eigen::LLT<Matrix> lb(b.mat());
  if (la.info() != Eigen::Success || lb.info() != Eigen::Success ||
      !(la.matrixLLT().diagonal().minCoeff() > 0.0) ||
      !(lb.matrixLLT().diagonal().minCoeff() > 0.0)) {
    throw Error(ErrorCode::NotPositiveDefinite, "G^T M G or G^T (M+U)^{-1} G is singular");
  }
  const double value = 2.0 * la.matrixLLT().diagonal().array().log().sum() +
                       2.0 * lb.matrixLLT().diagonal().array().log().sum();
  if (grad != nullptr) {
    // 2 M G (G^T M G)^{-1} + 2 N G (G^T N G)^{-1}, using symmetry of the inner inverses.
    *grad = 2.0 * la.solve(mg.transpose()).transpose() + 2.0 * lb.solve(ng.transpose()).transpose();
  }
  return value;
}

double j_objective(const SemiOrthoBasis& g, const MomentPair& mp) {
  return j_value_grad(g.mat(), mp, nullptr);
}

Matrix j_gradient(const SemiOrthoBasis& g, const MomentPair& mp) {
  Matrix grad;
  j_value_grad(g.mat(), mp, &grad);
  return grad;
}

PhiProblem::PhiProblem(const SymMatrix& mk, const SymMatrix& uk)
    : mk_(mk), uk_(uk), inv_mu_(spd_inverse(SymMatrix(mk.mat() + uk.mat()))) {
  if (mk.dim() != uk.dim()) throw Error(ErrorCode::DimensionError, "Mk and Uk differ in size");
}

double PhiProblem::value_grad(const Vector& v, Vector* grad) const {
  if (v.size() != dim()) throw Error(ErrorCode::DimensionError, "phi: vector size mismatch");
  const Vector mv = mk_.mat() * v;
  const Vector nv = inv_mu_.mat() * v;
  const double a = v.dot(mv);
  const double b = v.dot(nv);
  if (!(a > 0.0) || !(b > 0.0)) {
    throw Error(ErrorCode::NotPositiveDefinite, "phi: non-positive quadratic form");
  }
  if (grad != nullptr) *grad = 2.0 * mv / a + 2.0 * nv / b;
  return std::log(a) + std::log(b);
}

double PhiProblem::value(const Vector& v) const { return value_grad(v, nullptr); }

double phi_objective(const Vector& v, const SymMatrix& mk, const SymMatrix& uk) {
  return PhiProblem(mk, uk).value(v);
}

Vector phi_gradient(const Vector& v, const SymMatrix& mk, const SymMatrix& uk) {
  Vector g;
  PhiProblem(mk, uk).value_grad(v, &g);
  return g;
}

}  // namespace envkit

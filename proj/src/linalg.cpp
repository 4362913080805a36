#include "envkit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "envkit/error.hpp"

namespace envkit {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidMatrix: return "InvalidMatrix";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::DimensionError: return "DimensionError";
    case ErrorCode::NonFiniteObjective: return "NonFiniteObjective";
    case ErrorCode::InvalidPenalty: return "InvalidPenalty";
    case ErrorCode::DegenerateWeights: return "DegenerateWeights";
    case ErrorCode::OverflowGuard: return "OverflowGuard";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::Separation: return "Separation";
    case ErrorCode::TooManyFailures: return "TooManyFailures";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::FamilyMismatch: return "FamilyMismatch";
  }
  return "Unknown";
}

namespace {

Eigen::LLT<Matrix> factor_spd(const SymMatrix& a, const char* what) {
  Eigen::LLT<Matrix> llt(a.mat());
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::NotPositiveDefinite, std::string(what) + ": Cholesky factorization failed");
  }
  // Eigen's LLT does not flag a zero or negative pivot on every path.
  const auto& l = llt.matrixLLT();
  for (Eigen::Index i = 0; i < l.rows(); ++i) {
    if (!(l(i, i) > 0.0) || !std::isfinite(l(i, i))) {
      throw Error(ErrorCode::NotPositiveDefinite, std::string(what) + ": non-positive pivot");
    }
  }
  return llt;
}

}  // namespace

SymMatrix::SymMatrix(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorCode::DimensionError,
                "symmetric matrix must be square, got " + std::to_string(a.rows()) + "x" +
                    std::to_string(a.cols()));
  }
  if (!a.allFinite()) throw Error(ErrorCode::InvalidMatrix, "non-finite entry");
  a_ = 0.5 * (a + a.transpose());
}

SymMatrix SymMatrix::identity(Eigen::Index p) { return SymMatrix(Matrix::Identity(p, p)); }

SymMatrix SymMatrix::diagonal(const Vector& d) { return SymMatrix(Matrix(d.asDiagonal())); }

SemiOrthoBasis::SemiOrthoBasis(const Matrix& g) : g_(g) {
  if (g.cols() > g.rows()) {
    throw Error(ErrorCode::DimensionError, "basis has more columns than rows");
  }
  if (!g.allFinite()) throw Error(ErrorCode::InvalidMatrix, "non-finite basis entry");
  if (orthogonality_error(g) > 1e-10) {
    throw Error(ErrorCode::InvalidMatrix, "columns are not orthonormal");
  }
}

SemiOrthoBasis SemiOrthoBasis::from_columns(const Matrix& g) {
  if (g.cols() > g.rows()) {
    throw Error(ErrorCode::DimensionError, "basis has more columns than rows");
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(g.rows(), g.cols());
  const Matrix& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return SemiOrthoBasis(q);
}

double orthogonality_error(const Matrix& g) {
  return (g.transpose() * g - Matrix::Identity(g.cols(), g.cols())).norm();
}

SymEigen eigen_sym(const SymMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.mat());
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::InvalidMatrix, "symmetric eigensolver did not converge");
  }
  const Eigen::Index p = a.dim();
  SymEigen out{Vector(p), Matrix(p, p)};
  for (Eigen::Index i = 0; i < p; ++i) {
    out.values(i) = es.eigenvalues()(p - 1 - i);
    out.vectors.col(i) = es.eigenvectors().col(p - 1 - i);
  }
  return out;
}

double logdet_spd(const SymMatrix& a) {
  auto llt = factor_spd(a, "logdet");
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

Matrix spd_solve(const SymMatrix& a, const Matrix& b) {
  if (b.rows() != a.dim()) throw Error(ErrorCode::DimensionError, "spd_solve: row mismatch");
  auto llt = factor_spd(a, "spd_solve");
  return llt.solve(b);
}

SymMatrix spd_inverse(const SymMatrix& a) {
  return SymMatrix(spd_solve(a, Matrix::Identity(a.dim(), a.dim())));
}

SemiOrthoBasis orthonormal_complement(const SemiOrthoBasis& g) {
  const Eigen::Index p = g.rows();
  const Eigen::Index k = g.cols();
  if (k >= p) {
    throw Error(ErrorCode::DimensionError, "complement requires k < p (k=" + std::to_string(k) +
                                               ", p=" + std::to_string(p) + ")");
  }
  Eigen::HouseholderQR<Matrix> qr(g.mat());
  Matrix q = qr.householderQ() * Matrix::Identity(p, p);
  return SemiOrthoBasis(Matrix(q.rightCols(p - k)));
}

double subspace_angle(const SemiOrthoBasis& g1, const SemiOrthoBasis& g2) {
  if (g1.rows() != g2.rows() || g1.cols() != g2.cols()) {
    throw Error(ErrorCode::DimensionError, "subspace_angle: bases differ in shape");
  }
  if (g1.cols() == 0) return 0.0;
  const Matrix cross = g1.mat().transpose() * g2.mat();
  const Matrix resid = g2.mat() - g1.mat() * cross;
  Eigen::JacobiSVD<Matrix> svd_cos(cross);
  Eigen::JacobiSVD<Matrix> svd_sin(resid);
  const double cos_min = svd_cos.singularValues().minCoeff();
  const double sin_max = svd_sin.singularValues().maxCoeff();
  return std::atan2(std::clamp(sin_max, 0.0, 1.0), std::clamp(cos_min, 0.0, 1.0));
}

void canonicalize_signs(Matrix& g) {
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
      if (std::abs(g(i, j)) > 1e-12) {
        if (g(i, j) < 0.0) g.col(j) = -g.col(j);
        break;
      }
    }
  }
}

}  // namespace envkit

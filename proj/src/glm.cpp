#include "envkit/glm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

#include "envkit/simd.hpp"

namespace envkit {

std::string_view to_string(Family f) {
  switch (f) {
    case Family::Linear: return "linear";
    case Family::Logistic: return "logistic";
    case Family::Poisson: return "poisson";
  }
  return "unknown";
}

Family parse_family(std::string_view s) {
  if (s == "linear") return Family::Linear;
  if (s == "logistic" || s == "binomial") return Family::Logistic;
  if (s == "poisson") return Family::Poisson;
  throw Error(ErrorCode::InvalidConfig, "unknown family '" + std::string(s) + "'");
}

void Dataset::validate() const {
  if (y.size() != X.rows()) throw Error(ErrorCode::DimensionError, "X and y differ in rows");
  if (X.cols() < 1) throw Error(ErrorCode::DimensionError, "no predictors");
  const Eigen::Index q = X.cols() + (has_intercept ? 1 : 0);
  if (X.rows() <= q) {
    throw Error(ErrorCode::DimensionError, "need n > p (n=" + std::to_string(X.rows()) +
                                               ", p=" + std::to_string(q) + ")");
  }
  if (!predictor_names.empty() && static_cast<Eigen::Index>(predictor_names.size()) != X.cols()) {
    throw Error(ErrorCode::DimensionError, "predictor name count does not match columns");
  }
  if (!X.allFinite()) throw Error(ErrorCode::InvalidMatrix, "non-finite predictor value");
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double v = y(i);
    const std::string where = "observation " + std::to_string(i) + " has response ";
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidMatrix, where + "that is not finite");
    if (family == Family::Logistic && v != 0.0 && v != 1.0) {
      throw Error(ErrorCode::FamilyMismatch, where + std::to_string(v) + ", logistic needs 0/1");
    }
    if (family == Family::Poisson && (v < 0.0 || v != std::floor(v))) {
      throw Error(ErrorCode::FamilyMismatch,
                  where + std::to_string(v) + ", poisson needs non-negative integers");
    }
  }
}

Dataset Dataset::take_rows(const std::vector<std::size_t>& idx) const {
  Dataset out;
  out.family = family;
  out.has_intercept = has_intercept;
  out.predictor_names = predictor_names;
  out.X.resize(static_cast<Eigen::Index>(idx.size()), X.cols());
  out.y.resize(static_cast<Eigen::Index>(idx.size()));
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const double* src = X.col(j).data();
    double* dst = out.X.col(j).data();
    for (std::size_t i = 0; i < idx.size(); ++i) dst[i] = src[idx[i]];
  }
  for (std::size_t i = 0; i < idx.size(); ++i) out.y(static_cast<Eigen::Index>(i)) = y(static_cast<Eigen::Index>(idx[i]));
  return out;
}

namespace {

std::span<const double> col_span(const Matrix& m, Eigen::Index j) {
  return {m.col(j).data(), static_cast<std::size_t>(m.rows())};
}

std::span<const double> vec_span(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

Matrix design_matrix(const Dataset& ds) {
  if (!ds.has_intercept) return ds.X;
  Matrix z(ds.n(), ds.p() + 1);
  z.col(0).setOnes();
  z.rightCols(ds.p()) = ds.X;
  return z;
}

// z * beta, accumulated column by column.
Vector linear_predictor(const Matrix& z, const Vector& beta) {
  Vector eta = Vector::Zero(z.rows());
  std::span<double> out{eta.data(), static_cast<std::size_t>(eta.size())};
  for (Eigen::Index j = 0; j < z.cols(); ++j) simd::axpy(beta(j), col_span(z, j), out);
  return eta;
}

double softplus(double t) { return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t))); }

double logistic(double t) {
  if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double log_likelihood(Family fam, const Vector& y, const Vector& eta) {
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    const double t = eta(i);
    switch (fam) {
      case Family::Linear: ll -= 0.5 * (y(i) - t) * (y(i) - t); break;
      case Family::Logistic: ll += y(i) * t - softplus(t); break;
      case Family::Poisson:
        if (t > 700.0) return -std::numeric_limits<double>::infinity();
        ll += y(i) * t - std::exp(t);
        break;
    }
  }
  return ll;
}

void mean_and_variance(Family fam, const Vector& eta, Vector& mu, Vector& w) {
  mu.resize(eta.size());
  w.resize(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    const double t = eta(i);
    switch (fam) {
      case Family::Linear:
        mu(i) = t;
        w(i) = 1.0;
        break;
      case Family::Logistic:
        mu(i) = logistic(t);
        w(i) = mu(i) * (1.0 - mu(i));
        break;
      case Family::Poisson:
        mu(i) = std::exp(t);
        w(i) = mu(i);
        break;
    }
  }
}

GlmFit unpack(const Dataset& ds, const Vector& beta, int iterations, bool converged, double gnorm) {
  GlmFit fit;
  fit.intercept = ds.has_intercept ? beta(0) : 0.0;
  fit.coefficients = ds.has_intercept ? Vector(beta.tail(ds.p())) : beta;
  fit.iterations = iterations;
  fit.converged = converged;
  fit.gradient_norm = gnorm;
  return fit;
}

[[noreturn]] void fail_fit(const Dataset& ds, const Vector& beta, const Vector& w, int iter,
                           double gnorm, const std::string& why) {
  const bool separated = ds.family == Family::Logistic && w.size() > 0 && w.minCoeff() < 1e-10;
  throw GlmFitError(separated ? ErrorCode::Separation : ErrorCode::NonConvergence,
                    why + (separated ? " (fitted probabilities at 0 or 1)" : ""),
                    unpack(ds, beta, iter, false, gnorm));
}

}  // namespace

GlmFit fit_glm_mle(const Dataset& ds, const IrlsOptions& opts) {
  ds.validate();
  const Matrix z = design_matrix(ds);
  const Eigen::Index q = z.cols();
  const double n = static_cast<double>(ds.n());
  {
    Eigen::ColPivHouseholderQR<Matrix> qr(z);
    qr.setThreshold(1e-10);
    if (qr.rank() < q) {
      throw Error(ErrorCode::RankDeficient, "design matrix has rank " + std::to_string(qr.rank()) +
                                                " < " + std::to_string(q) + " columns");
    }
  }

  Vector beta = Vector::Zero(q);
  Vector eta = Vector::Zero(ds.n());
  double ll = log_likelihood(ds.family, ds.y, eta);
  Vector mu, w;
  double gnorm = 0.0;
  for (int iter = 0; iter <= opts.max_iter; ++iter) {
    mean_and_variance(ds.family, eta, mu, w);
    const Vector resid = ds.y - mu;
    Vector grad(q);
    for (Eigen::Index j = 0; j < q; ++j) grad(j) = simd::dot(col_span(z, j), vec_span(resid));
    gnorm = grad.norm() / n;
    if (gnorm < opts.gradient_tol) {
      // A vanishing gradient with saturated probabilities means the
      // coefficients are running off to infinity, not converging.
      if (ds.family == Family::Logistic && w.minCoeff() < 1e-10) {
        fail_fit(ds, beta, w, iter, gnorm, "likelihood has no finite maximizer");
      }
      return unpack(ds, beta, iter, true, gnorm);
    }
    if (iter == opts.max_iter) break;

    Matrix h(q, q);
    for (Eigen::Index j = 0; j < q; ++j) {
      for (Eigen::Index l = 0; l <= j; ++l) {
        h(j, l) = h(l, j) = simd::wdot(vec_span(w), col_span(z, j), col_span(z, l));
      }
    }
    Eigen::LLT<Matrix> llt(h);
    if (llt.info() != Eigen::Success || !(llt.matrixLLT().diagonal().minCoeff() > 0.0)) {
      fail_fit(ds, beta, w, iter, gnorm, "information matrix became singular");
    }
    const Vector delta = llt.solve(grad);

    double step = 1.0;
    bool accepted = false;
    for (int h_i = 0; h_i <= opts.max_halvings; ++h_i, step *= 0.5) {
      const Vector cand = beta + step * delta;
      const Vector cand_eta = linear_predictor(z, cand);
      const double cand_ll = log_likelihood(ds.family, ds.y, cand_eta);
      if (std::isfinite(cand_ll) && cand_ll >= ll - 1e-12 * (1.0 + std::abs(ll))) {
        beta = cand;
        eta = cand_eta;
        ll = cand_ll;
        accepted = true;
        break;
      }
    }
    if (!accepted) fail_fit(ds, beta, w, iter, gnorm, "step halving could not improve the likelihood");
  }
  fail_fit(ds, beta, w, opts.max_iter, gnorm,
           "no convergence after " + std::to_string(opts.max_iter) + " iterations");
}

namespace {

// Shared weighted-moment construction once weights and the working response
// are known. `w` must average to one.
MomentPair weighted_moments(const Dataset& ds, const Vector& w, const Vector& s, UScaling scaling) {
  const Eigen::Index p = ds.p();
  const double n = static_cast<double>(ds.n());
  Matrix xc(ds.n(), p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double mean_j = simd::dot(vec_span(w), col_span(ds.X, j)) / n;
    xc.col(j) = ds.X.col(j).array() - mean_j;
  }
  const double s_mean = simd::dot(vec_span(w), vec_span(s)) / n;
  const Vector sc = s.array() - s_mean;

  Matrix m(p, p);
  Vector c(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index l = 0; l <= j; ++l) {
      m(j, l) = m(l, j) = simd::wdot(vec_span(w), col_span(xc, j), col_span(xc, l)) / n;
    }
    c(j) = simd::wdot(vec_span(w), col_span(xc, j), vec_span(sc)) / n;
  }
  const double v = simd::wdot(vec_span(w), vec_span(sc), vec_span(sc)) / n;
  const double s_scale = std::max(1.0, s.cwiseAbs().maxCoeff());

  Matrix u = Matrix::Zero(p, p);
  if (v > 1e-24 * s_scale * s_scale) {
    u = c * c.transpose();
    if (scaling == UScaling::ByResponseVariance) u /= v;
  }
  try {
    return MomentPair(SymMatrix(m), SymMatrix(u), static_cast<std::size_t>(ds.n()));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NotPositiveDefinite) {
      throw Error(ErrorCode::RankDeficient, std::string("weighted predictor covariance is singular: ") + e.what());
    }
    throw;
  }
}

MomentPair glm_family_moments(const Dataset& ds, const GlmFit& fit, UScaling scaling) {
  ds.validate();
  if (fit.coefficients.size() != ds.p()) {
    throw Error(ErrorCode::DimensionError, "fit does not match dataset predictors");
  }
  Vector t = Vector::Constant(ds.n(), fit.intercept);
  {
    std::span<double> out{t.data(), static_cast<std::size_t>(t.size())};
    for (Eigen::Index j = 0; j < ds.p(); ++j) simd::axpy(fit.coefficients(j), col_span(ds.X, j), out);
  }
  if (ds.family == Family::Poisson) {
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      if (t(i) > kMaxLinearPredictor) {
        throw Error(ErrorCode::OverflowGuard, "observation " + std::to_string(i) +
                                                  " has linear predictor " + std::to_string(t(i)) +
                                                  " > " + std::to_string(kMaxLinearPredictor));
      }
    }
  }
  Vector mu, w;
  mean_and_variance(ds.family, t, mu, w);
  const double mean_w = simd::sum(vec_span(w)) / static_cast<double>(ds.n());
  if (!(mean_w > 0.0)) throw Error(ErrorCode::DegenerateWeights, "all weights are zero");
  w /= mean_w;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (w(i) < 1e-12) {
      throw Error(ErrorCode::DegenerateWeights,
                  "observation " + std::to_string(i) + " has normalized weight " + std::to_string(w(i)));
    }
  }
  Vector s(ds.n());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    s(i) = t(i) + (ds.y(i) - mu(i)) / std::max(w(i), 1e-12);
  }
  return weighted_moments(ds, w, s, scaling);
}

}  // namespace

MomentPair moments_linear(const Dataset& ds, const GlmFit& fit, UScaling scaling) {
  ds.validate();
  if (fit.coefficients.size() != ds.p()) {
    throw Error(ErrorCode::DimensionError, "fit does not match dataset predictors");
  }
  return weighted_moments(ds, Vector::Ones(ds.n()), ds.y, scaling);
}

MomentPair moments_logistic(const Dataset& ds, const GlmFit& fit, UScaling scaling) {
  if (ds.family != Family::Logistic) throw Error(ErrorCode::FamilyMismatch, "dataset is not logistic");
  return glm_family_moments(ds, fit, scaling);
}

MomentPair moments_poisson(const Dataset& ds, const GlmFit& fit, UScaling scaling) {
  if (ds.family != Family::Poisson) throw Error(ErrorCode::FamilyMismatch, "dataset is not poisson");
  return glm_family_moments(ds, fit, scaling);
}

MomentPair glm_moments(const Dataset& ds, const GlmFit& fit, UScaling scaling) {
  switch (ds.family) {
    case Family::Linear: return moments_linear(ds, fit, scaling);
    case Family::Logistic: return moments_logistic(ds, fit, scaling);
    case Family::Poisson: return moments_poisson(ds, fit, scaling);
  }
  throw Error(ErrorCode::InvalidConfig, "unknown family");
}

}  // namespace envkit

#pragma once

// Baseline estimators and moment pairs for linear, logistic and Poisson
// regression.
//
// For the GLM families, with linear predictor t_i = a + x_i^T b:
//   w_i  = Var(Y_i | t_i), normalized to mean 1
//   E    = n^{-1} sum_i w_i x_i
//   M    = n^{-1} sum_i w_i (x_i - E)(x_i - E)^T
//   s_i  = t_i + (y_i - mu_i) / w_i             (working response)
//   c    = n^{-1} sum_i w_i (x_i - E)(s_i - s_w)
//   v    = n^{-1} sum_i w_i (s_i - s_w)^2
//   U    = c c^T / v
// The linear family is the same construction with w_i = 1 and s_i = y_i.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "envkit/error.hpp"
#include "envkit/linalg.hpp"
#include "envkit/objectives.hpp"

namespace envkit {

enum class Family { Linear, Logistic, Poisson };

std::string_view to_string(Family f);
Family parse_family(std::string_view s);

struct Dataset {
  Matrix X;  // n x p, column-major so each predictor is contiguous
  Vector y;
  Family family = Family::Linear;
  bool has_intercept = false;
  std::vector<std::string> predictor_names;  // empty or length p

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index p() const { return X.cols(); }

  /// Throws DimensionError, InvalidMatrix or FamilyMismatch.
  void validate() const;

  /// Rows `idx` in order, with the same family and names.
  Dataset take_rows(const std::vector<std::size_t>& idx) const;
};

struct GlmFit {
  double intercept = 0.0;
  Vector coefficients;
  bool converged = false;
  int iterations = 0;
  double gradient_norm = 0.0;  // ||grad loglik|| / n at the returned iterate
};

/// Raised when Newton iterations fail to converge; carries the best iterate.
class GlmFitError : public Error {
 public:
  GlmFitError(ErrorCode code, const std::string& what, GlmFit best)
      : Error(code, what), best_(std::move(best)) {}
  const GlmFit& best() const { return best_; }

 private:
  GlmFit best_;
};

struct IrlsOptions {
  double gradient_tol = 1e-8;
  int max_iter = 100;
  int max_halvings = 20;
};

/// Maximum likelihood by Newton's method with step halving.
GlmFit fit_glm_mle(const Dataset& ds, const IrlsOptions& opts = {});

enum class UScaling {
  ByResponseVariance,  // U = c c^T / v
  Unscaled,            // U = c c^T
};

MomentPair moments_linear(const Dataset& ds, const GlmFit& fit,
                          UScaling scaling = UScaling::ByResponseVariance);
MomentPair moments_logistic(const Dataset& ds, const GlmFit& fit,
                            UScaling scaling = UScaling::ByResponseVariance);
MomentPair moments_poisson(const Dataset& ds, const GlmFit& fit,
                           UScaling scaling = UScaling::ByResponseVariance);

/// Dispatches on ds.family.
MomentPair glm_moments(const Dataset& ds, const GlmFit& fit,
                       UScaling scaling = UScaling::ByResponseVariance);

/// Linear predictors that push exp() past this are rejected.
inline constexpr double kMaxLinearPredictor = 30.0;

}  // namespace envkit

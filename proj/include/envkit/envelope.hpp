#pragma once

#include <string_view>
#include <vector>

#include "envkit/linalg.hpp"
#include "envkit/manifold.hpp"
#include "envkit/objectives.hpp"

namespace envkit {

enum class Method { OneD, FG };

std::string_view to_string(Method m);

/// Fit at one candidate dimension k >= 1.
struct PathEntry {
  int k = 0;
  SemiOrthoBasis basis;             // p x k
  std::vector<double> phi_values;   // 1D only: phi at each extracted direction
  double j_value = 0.0;             // J evaluated at `basis`
  Vector theta_k;                   // basis basis^T theta_tilde
};

/// Fits for k = 1..p. The k = 0 fit is implicit: zero estimator, zero
/// objective.
struct EnvelopePath {
  std::vector<PathEntry> entries;  // entries[k-1] holds dimension k
  Vector theta_tilde;
  MomentPair mp;
  Method method = Method::OneD;

  Eigen::Index dim() const { return theta_tilde.size(); }
  const PathEntry& at(int k) const { return entries.at(static_cast<std::size_t>(k - 1)); }

  /// Projected estimator at dimension k in [0, p]; zero for k = 0.
  Vector estimator(int k) const;
};

/// Sequential 1D algorithm: extract one direction at a time by minimizing
/// phi on the deflated pair, then deflate by a fresh orthonormal complement.
/// Bases are nested; each direction has its first non-negligible coordinate
/// positive.
EnvelopePath fit_1d_path(const MomentPair& mp, const Vector& theta_tilde,
                         const SolverOptions& opts = {});

/// Minimizes J over p x k orthonormal bases for each k < p, starting from the
/// 1D basis at k. Never returns a basis worse than its warm start.
EnvelopePath fit_fg_path(const MomentPair& mp, const Vector& theta_tilde, const SolverOptions& opts,
                         const EnvelopePath& warm_start);

/// Convenience dispatch: 1D path, refined by FG when method == FG.
EnvelopePath fit_path(const MomentPair& mp, const Vector& theta_tilde, Method method,
                      const SolverOptions& opts = {});

/// G G^T theta.
Vector project_estimator(const SemiOrthoBasis& basis, const Vector& theta_tilde);

}  // namespace envkit

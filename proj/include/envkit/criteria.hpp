#pragma once

// Information criteria over candidate envelope dimensions, softmax weights,
// dimension selection and the weighted envelope estimator.
//
//   FG:  I(k) = J(G_k) + C k log(n) / n
//   1D:  I(k) = sum_{j<=k} ( phi_j(v_j) + C log(n) / n )
//   w_k = exp{-n I(k)} / sum_j exp{-n I(j)}

#include <cstddef>
#include <string_view>
#include <vector>

#include "envkit/envelope.hpp"

namespace envkit {

enum class CandidateRange { ZeroToP, OneToP };

/// Standard weights use exp{-n I(k)}; Halved uses exp{-n I(k) / 2} and is
/// provided for comparison only.
enum class WeightScheme { Standard, Halved };

std::string_view to_string(CandidateRange r);

struct CriterionVector {
  std::vector<double> values;  // values[k] for k = 0..p; values[0] = 0
  std::size_t n = 0;
  double C = 1.0;
  Method method = Method::OneD;

  int p() const { return static_cast<int>(values.size()) - 1; }
};

struct WeightVector {
  std::vector<double> weights;  // weights[i] is the weight of dimension first_k() + i
  CandidateRange range = CandidateRange::OneToP;

  int first_k() const { return range == CandidateRange::ZeroToP ? 0 : 1; }
  /// Weight of dimension k; zero when k is outside the range.
  double at(int k) const;
};

CriterionVector criterion_fg(const EnvelopePath& path, std::size_t n, double C = 1.0);
CriterionVector criterion_1d(const EnvelopePath& path, std::size_t n, double C = 1.0);

/// Dispatches on path.method.
CriterionVector criterion(const EnvelopePath& path, std::size_t n, double C = 1.0);

/// argmin over the candidate range; ties go to the smaller k.
int select_dimension(const CriterionVector& cv, CandidateRange range = CandidateRange::OneToP);

WeightVector compute_weights(const CriterionVector& cv,
                             CandidateRange range = CandidateRange::OneToP,
                             WeightScheme scheme = WeightScheme::Standard);

/// sum_k w_k theta_k, with theta_0 = 0 and theta_p = theta_tilde.
Vector weighted_estimator(const EnvelopePath& path, const WeightVector& wv);

}  // namespace envkit

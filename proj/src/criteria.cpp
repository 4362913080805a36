#include "envkit/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "envkit/error.hpp"

namespace envkit {

std::string_view to_string(CandidateRange r) {
  return r == CandidateRange::ZeroToP ? "0p" : "1p";
}

double WeightVector::at(int k) const {
  const int i = k - first_k();
  if (i < 0 || i >= static_cast<int>(weights.size())) return 0.0;
  return weights[static_cast<std::size_t>(i)];
}

namespace {

double penalty_per_dimension(std::size_t n, double C) {
  if (!(C > 0.0) || !std::isfinite(C)) {
    throw Error(ErrorCode::InvalidPenalty, "penalty constant must be positive, got " +
                                               std::to_string(C));
  }
  if (n < 2) throw Error(ErrorCode::InvalidConfig, "criteria need n >= 2");
  return C * std::log(static_cast<double>(n)) / static_cast<double>(n);
}

}  // namespace

CriterionVector criterion_fg(const EnvelopePath& path, std::size_t n, double C) {
  const double pen = penalty_per_dimension(n, C);
  CriterionVector cv{std::vector<double>(path.entries.size() + 1, 0.0), n, C, Method::FG};
  for (const PathEntry& e : path.entries) {
    cv.values[static_cast<std::size_t>(e.k)] = e.j_value + pen * e.k;
  }
  return cv;
}

CriterionVector criterion_1d(const EnvelopePath& path, std::size_t n, double C) {
  if (path.method != Method::OneD) {
    throw Error(ErrorCode::InvalidConfig, "1D criterion needs a 1D path");
  }
  const double pen = penalty_per_dimension(n, C);
  CriterionVector cv{std::vector<double>(path.entries.size() + 1, 0.0), n, C, Method::OneD};
  if (path.entries.empty()) return cv;
  const std::vector<double>& phi = path.entries.back().phi_values;
  double acc = 0.0;
  for (std::size_t k = 1; k < cv.values.size(); ++k) {
    acc += phi[k - 1] + pen;
    cv.values[k] = acc;
  }
  return cv;
}

CriterionVector criterion(const EnvelopePath& path, std::size_t n, double C) {
  return path.method == Method::OneD ? criterion_1d(path, n, C) : criterion_fg(path, n, C);
}

int select_dimension(const CriterionVector& cv, CandidateRange range) {
  const int first = range == CandidateRange::ZeroToP ? 0 : 1;
  if (cv.p() < first) throw Error(ErrorCode::DimensionError, "empty candidate range");
  int best = first;
  for (int k = first + 1; k <= cv.p(); ++k) {
    if (cv.values[static_cast<std::size_t>(k)] < cv.values[static_cast<std::size_t>(best)]) best = k;
  }
  return best;
}

WeightVector compute_weights(const CriterionVector& cv, CandidateRange range, WeightScheme scheme) {
  WeightVector wv;
  wv.range = range;
  const int first = wv.first_k();
  if (cv.p() < first) throw Error(ErrorCode::DimensionError, "empty candidate range");
  const double scale =
      static_cast<double>(cv.n) * (scheme == WeightScheme::Halved ? 0.5 : 1.0);
  std::vector<double> scaled;
  for (int k = first; k <= cv.p(); ++k) {
    const double v = cv.values[static_cast<std::size_t>(k)];
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidConfig, "non-finite criterion value");
    scaled.push_back(scale * v);
  }
  const double lo = *std::min_element(scaled.begin(), scaled.end());
  double total = 0.0;
  for (double s : scaled) {
    wv.weights.push_back(std::exp(lo - s));
    total += wv.weights.back();
  }
  for (double& w : wv.weights) w /= total;
  return wv;
}

Vector weighted_estimator(const EnvelopePath& path, const WeightVector& wv) {
  const int p = static_cast<int>(path.dim());
  const int last = wv.first_k() + static_cast<int>(wv.weights.size()) - 1;
  if (last != p) {
    throw Error(ErrorCode::DimensionError, "weights cover dimensions up to " +
                                               std::to_string(last) + " but p=" + std::to_string(p));
  }
  Vector out = Vector::Zero(p);
  for (int k = std::max(1, wv.first_k()); k <= p; ++k) {
    out += wv.at(k) * path.estimator(k);
  }
  return out;
}

}  // namespace envkit

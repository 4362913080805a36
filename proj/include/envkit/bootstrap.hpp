#pragma once

// Nonparametric pairs bootstrap of the weighted envelope estimator, the
// envelope estimator under re-selected (variable) and original (fixed)
// dimension, and the MLE.
//
// Replicate b draws from the Philox substream (seed, b, attempt), so results
// do not depend on the number of workers or on scheduling. A replicate whose
// fit fails is retried on the next attempt substream; after `max_retries`
// retries it is recorded as skipped.

#include <cstdint>
#include <vector>

#include "envkit/criteria.hpp"
#include "envkit/envelope.hpp"
#include "envkit/glm.hpp"
#include "envkit/rng.hpp"

namespace envkit {

/// Full envelope analysis of one sample: MLE, moments, path, criteria,
/// weights, selected dimension and the two envelope estimators.
struct EnvelopeAnalysis {
  GlmFit mle;
  EnvelopePath path;
  CriterionVector criteria;
  WeightVector weights;
  int u_hat = 0;
  Vector theta_w;     // weighted estimator
  Vector theta_uhat;  // projected estimator at u_hat
};

struct AnalysisOptions {
  Method method = Method::OneD;
  double C = 1.0;
  CandidateRange range = CandidateRange::OneToP;
  WeightScheme scheme = WeightScheme::Standard;
  UScaling u_scaling = UScaling::ByResponseVariance;
  SolverOptions solver{};
};

EnvelopeAnalysis analyze(const Dataset& ds, const AnalysisOptions& opts = {});

enum class ResampleMode {
  Pairs,     // n rows with replacement
  Identity,  // the original rows; for tests
};

struct BootstrapConfig {
  int B = 1000;
  std::uint64_t seed = 13;
  AnalysisOptions analysis{};
  int workers = 0;  // < 1 means hardware concurrency
  ResampleMode resample = ResampleMode::Pairs;
  int max_retries = 10;
  double max_skip_fraction = 0.05;

  void validate() const;
};

struct ReplicateRecord {
  Vector dev_w;     // theta_w - theta_w*
  Vector dev_varu;  // theta_uhat - theta*_{u*}
  Vector dev_fixu;  // theta_uhat - theta*_{uhat}
  Vector dev_mle;   // theta_tilde - theta_tilde*
  int u_star = 0;
  int attempts = 0;  // substreams consumed
  bool skipped = false;
};

struct BootstrapReplicates {
  EnvelopeAnalysis original;
  std::vector<ReplicateRecord> rows;  // index b = replicate b
  int skipped = 0;

  /// B x (4p + 1) deviation matrix [dev_w | dev_varu | dev_fixu | dev_mle | u*]
  /// over non-skipped replicates, in replicate order.
  Matrix as_matrix() const;
};

struct BootstrapSummary {
  Matrix sd_w, sd_varu, sd_fixu, sd_mle;  // (1/B) D^T D, centered at the original estimates
  Vector se_w, se_varu, se_fixu, se_mle;  // square roots of the diagonals
  Vector ratio_w, ratio_varu, ratio_fixu; // se_mle / se_env; NaN when se_env == 0
  std::vector<double> u_distribution;     // frequency of u* = k, k = 0..p
  int used = 0;
  int skipped = 0;
};

/// Indices of n draws with replacement.
std::vector<std::size_t> resample_indices(std::size_t n, Philox4x32& rng);
Dataset resample(const Dataset& ds, Philox4x32& rng);

BootstrapReplicates run_bootstrap(const Dataset& ds, const BootstrapConfig& cfg);

/// Throws InvalidConfig with fewer than two usable replicates.
BootstrapSummary summarize(const BootstrapReplicates& reps);

}  // namespace envkit

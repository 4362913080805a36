#include "envkit/bootstrap.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>

#include "envkit/error.hpp"
#include "envkit/parallel.hpp"

namespace envkit {

EnvelopeAnalysis analyze(const Dataset& ds, const AnalysisOptions& opts) {
  EnvelopeAnalysis a;
  a.mle = fit_glm_mle(ds);
  const MomentPair mp = glm_moments(ds, a.mle, opts.u_scaling);
  a.path = fit_path(mp, a.mle.coefficients, opts.method, opts.solver);
  a.criteria = criterion(a.path, static_cast<std::size_t>(ds.n()), opts.C);
  a.weights = compute_weights(a.criteria, opts.range, opts.scheme);
  a.u_hat = select_dimension(a.criteria, opts.range);
  a.theta_w = weighted_estimator(a.path, a.weights);
  a.theta_uhat = a.path.estimator(a.u_hat);
  return a;
}

void BootstrapConfig::validate() const {
  if (B < 1) throw Error(ErrorCode::InvalidConfig, "bootstrap needs B >= 1");
  if (max_retries < 0) throw Error(ErrorCode::InvalidConfig, "max_retries must be >= 0");
  if (!(max_skip_fraction >= 0.0 && max_skip_fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "max_skip_fraction must lie in [0, 1]");
  }
  analysis.solver.validate();
}

std::vector<std::size_t> resample_indices(std::size_t n, Philox4x32& rng) {
  std::vector<std::size_t> idx(n);
  if (n == 0) return idx;
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (auto& i : idx) i = pick(rng);
  return idx;
}

Dataset resample(const Dataset& ds, Philox4x32& rng) {
  return ds.take_rows(resample_indices(static_cast<std::size_t>(ds.n()), rng));
}

namespace {

ReplicateRecord replicate_once(const Dataset& ds, const EnvelopeAnalysis& orig,
                               const BootstrapConfig& cfg, std::size_t b, std::uint32_t attempt) {
  Philox4x32 rng(cfg.seed, replicate_stream(b, attempt));
  std::vector<std::size_t> idx;
  if (cfg.resample == ResampleMode::Pairs) {
    idx = resample_indices(static_cast<std::size_t>(ds.n()), rng);
  } else {
    idx.resize(static_cast<std::size_t>(ds.n()));
    std::iota(idx.begin(), idx.end(), std::size_t{0});
  }
  const EnvelopeAnalysis star = analyze(ds.take_rows(idx), cfg.analysis);
  ReplicateRecord rec;
  rec.dev_w = orig.theta_w - star.theta_w;
  rec.dev_varu = orig.theta_uhat - star.theta_uhat;
  rec.dev_fixu = orig.theta_uhat - star.path.estimator(orig.u_hat);
  rec.dev_mle = orig.mle.coefficients - star.mle.coefficients;
  rec.u_star = star.u_hat;
  const bool finite = rec.dev_w.allFinite() && rec.dev_varu.allFinite() &&
                      rec.dev_fixu.allFinite() && rec.dev_mle.allFinite();
  if (!finite) throw Error(ErrorCode::NonFiniteObjective, "replicate produced non-finite estimates");
  return rec;
}

}  // namespace

BootstrapReplicates run_bootstrap(const Dataset& ds, const BootstrapConfig& cfg) {
  cfg.validate();
  BootstrapReplicates out;
  out.original = analyze(ds, cfg.analysis);
  const std::size_t B = static_cast<std::size_t>(cfg.B);
  out.rows.resize(B);

  parallel_for(B, resolve_workers(cfg.workers), [&](std::size_t b) {
    ReplicateRecord rec;
    rec.skipped = true;
    for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
      try {
        rec = replicate_once(ds, out.original, cfg, b, static_cast<std::uint32_t>(attempt));
        rec.attempts = attempt + 1;
        break;
      } catch (const Error&) {
        rec.attempts = attempt + 1;
      }
    }
    out.rows[b] = std::move(rec);
  });

  for (const auto& r : out.rows) out.skipped += r.skipped ? 1 : 0;
  if (out.skipped > cfg.max_skip_fraction * static_cast<double>(B)) {
    throw Error(ErrorCode::TooManyFailures, std::to_string(out.skipped) + " of " +
                                                std::to_string(B) + " replicates failed");
  }
  return out;
}

Matrix BootstrapReplicates::as_matrix() const {
  const Eigen::Index p = original.mle.coefficients.size();
  Matrix m(static_cast<Eigen::Index>(rows.size()) - skipped, 4 * p + 1);
  Eigen::Index r = 0;
  for (const auto& rec : rows) {
    if (rec.skipped) continue;
    m.row(r).segment(0, p) = rec.dev_w.transpose();
    m.row(r).segment(p, p) = rec.dev_varu.transpose();
    m.row(r).segment(2 * p, p) = rec.dev_fixu.transpose();
    m.row(r).segment(3 * p, p) = rec.dev_mle.transpose();
    m(r, 4 * p) = rec.u_star;
    ++r;
  }
  return m;
}

BootstrapSummary summarize(const BootstrapReplicates& reps) {
  const Matrix d = reps.as_matrix();
  const Eigen::Index used = d.rows();
  if (used < 2) throw Error(ErrorCode::InvalidConfig, "summary needs at least two replicates");
  const Eigen::Index p = (d.cols() - 1) / 4;

  BootstrapSummary s;
  s.used = static_cast<int>(used);
  s.skipped = reps.skipped;
  auto block_sd = [&](Eigen::Index offset) -> Matrix {
    const auto blk = d.middleCols(offset, p);
    return (blk.transpose() * blk) / static_cast<double>(used);
  };
  s.sd_w = block_sd(0);
  s.sd_varu = block_sd(p);
  s.sd_fixu = block_sd(2 * p);
  s.sd_mle = block_sd(3 * p);
  s.se_w = s.sd_w.diagonal().cwiseSqrt();
  s.se_varu = s.sd_varu.diagonal().cwiseSqrt();
  s.se_fixu = s.sd_fixu.diagonal().cwiseSqrt();
  s.se_mle = s.sd_mle.diagonal().cwiseSqrt();

  auto ratio = [&](const Vector& env) {
    Vector r(p);
    for (Eigen::Index j = 0; j < p; ++j) {
      r(j) = env(j) > 0.0 ? s.se_mle(j) / env(j) : std::numeric_limits<double>::quiet_NaN();
    }
    return r;
  };
  s.ratio_w = ratio(s.se_w);
  s.ratio_varu = ratio(s.se_varu);
  s.ratio_fixu = ratio(s.se_fixu);

  s.u_distribution.assign(static_cast<std::size_t>(p) + 1, 0.0);
  for (Eigen::Index r = 0; r < used; ++r) s.u_distribution[static_cast<std::size_t>(d(r, 4 * p))] += 1.0;
  for (double& f : s.u_distribution) f /= static_cast<double>(used);
  return s;
}

}  // namespace envkit

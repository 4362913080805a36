#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "envkit/bootstrap.hpp"
#include "envkit/error.hpp"
#include "support/testgen.hpp"

using namespace envkit;

namespace {

// Replicates holding hand-made deviation rows, for the summary arithmetic.
BootstrapReplicates synthetic(const std::vector<Vector>& dev, std::vector<int> u = {}) {
  BootstrapReplicates reps;
  const Eigen::Index p = dev.front().size();
  reps.original.mle.coefficients = Vector::Zero(p);
  for (std::size_t b = 0; b < dev.size(); ++b) {
    ReplicateRecord r;
    r.dev_w = dev[b];
    r.dev_varu = 2.0 * dev[b];
    r.dev_fixu = 0.5 * dev[b];
    r.dev_mle = dev[b];
    r.u_star = u.empty() ? 1 : u[b];
    r.attempts = 1;
    reps.rows.push_back(r);
  }
  return reps;
}

}  // namespace

TEST_CASE("resample_indices") {
  Philox4x32 a(1, 2), b(1, 2);
  const auto ia = resample_indices(50, a);
  const auto ib = resample_indices(50, b);
  CHECK(ia == ib);
  for (auto i : ia) CHECK(i < 50);
  Philox4x32 c(1, 3);
  CHECK(resample_indices(1, c) == std::vector<std::size_t>{0});
  CHECK(resample_indices(0, c).empty());
}

TEST_CASE("resample single row") {
  Dataset ds;
  ds.X = (Matrix(1, 2) << 1.5, -2.0).finished();
  ds.y = (Vector(1) << 1.0).finished();
  Philox4x32 r(0, 0);
  const Dataset out = ds.take_rows(resample_indices(1, r));
  CHECK(out.X == ds.X);
  CHECK(out.y == ds.y);
}

TEST_CASE("distinct-row fraction approaches 1 - 1/e") {
  double total = 0.0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    Philox4x32 r(777, s);
    const auto idx = resample_indices(1000, r);
    total += static_cast<double>(std::set<std::size_t>(idx.begin(), idx.end()).size()) / 1000.0;
  }
  CHECK(std::abs(total / 100.0 - (1.0 - std::exp(-1.0))) < 0.02);
}

TEST_CASE("BootstrapConfig validation") {
  BootstrapConfig c;
  CHECK_NOTHROW(c.validate());
  c.B = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.max_skip_fraction = 1.5;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.max_retries = -1;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.analysis.solver.max_iter = 0;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("analyze is internally consistent") {
  Dataset ds = testgen::logistic_toy(71, 200, 4);
  for (Method m : {Method::OneD, Method::FG}) {
    AnalysisOptions o;
    o.method = m;
    const EnvelopeAnalysis a = analyze(ds, o);
    CHECK(a.path.method == m);
    CHECK(a.criteria.values.size() == 5);
    CHECK(a.u_hat == select_dimension(a.criteria, o.range));
    CHECK((a.theta_w - weighted_estimator(a.path, a.weights)).norm() == 0.0);
    CHECK(a.theta_uhat == a.path.estimator(a.u_hat));
    CHECK(a.path.theta_tilde == a.mle.coefficients);
  }
}

TEST_CASE("identity resampling gives zero deviations") {
  Dataset ds = testgen::logistic_toy(72, 120, 3);
  BootstrapConfig c;
  c.B = 3;
  c.resample = ResampleMode::Identity;
  c.workers = 2;
  const BootstrapReplicates reps = run_bootstrap(ds, c);
  REQUIRE(reps.rows.size() == 3);
  for (const auto& r : reps.rows) {
    CHECK_FALSE(r.skipped);
    CHECK(r.dev_w.norm() == 0.0);
    CHECK(r.dev_varu.norm() == 0.0);
    CHECK(r.dev_fixu.norm() == 0.0);
    CHECK(r.dev_mle.norm() == 0.0);
    CHECK(r.u_star == reps.original.u_hat);
  }
  const BootstrapSummary s = summarize(reps);
  CHECK(s.se_w.norm() == 0.0);
  for (Eigen::Index j = 0; j < 3; ++j) CHECK(std::isnan(s.ratio_w(j)));
}

TEST_CASE("worker count does not change replicates") {
  Dataset ds = testgen::logistic_toy(73, 150, 3);
  BootstrapConfig c;
  c.B = 40;
  c.seed = 99;
  c.workers = 1;
  const Matrix one = run_bootstrap(ds, c).as_matrix();
  c.workers = 8;
  const Matrix eight = run_bootstrap(ds, c).as_matrix();
  CHECK(one.rows() == 40);
  CHECK(one.cols() == 4 * 3 + 1);
  CHECK(one == eight);
  c.seed = 100;
  CHECK_FALSE(run_bootstrap(ds, c).as_matrix() == one);
}

TEST_CASE("replicate fields follow their definitions") {
  Dataset ds = testgen::poisson_toy(74, 150, 3);
  BootstrapConfig c;
  c.B = 5;
  c.seed = 3;
  const BootstrapReplicates reps = run_bootstrap(ds, c);
  const EnvelopeAnalysis& o = reps.original;
  for (std::size_t b = 0; b < reps.rows.size(); ++b) {
    const auto& r = reps.rows[b];
    REQUIRE_FALSE(r.skipped);
    // Re-run the replicate by hand from its substream.
    Philox4x32 rng(c.seed, replicate_stream(b, static_cast<std::uint32_t>(r.attempts - 1)));
    const EnvelopeAnalysis star = analyze(ds.take_rows(resample_indices(150, rng)), c.analysis);
    CHECK((r.dev_w - (o.theta_w - star.theta_w)).norm() == 0.0);
    CHECK((r.dev_varu - (o.theta_uhat - star.theta_uhat)).norm() == 0.0);
    CHECK((r.dev_fixu - (o.theta_uhat - star.path.estimator(o.u_hat))).norm() == 0.0);
    CHECK((r.dev_mle - (o.mle.coefficients - star.mle.coefficients)).norm() == 0.0);
    CHECK(r.u_star == star.u_hat);
    CHECK(r.u_star >= 1);
    CHECK(r.u_star <= 3);
  }
}

TEST_CASE("failing replicates are retried then skipped") {
  // Tiny separable-prone logistic data: many resamples separate.
  Dataset ds;
  ds.family = Family::Logistic;
  ds.X = (Matrix(8, 1) << -2, -1.5, -1, -0.2, 0.2, 1, 1.5, 2).finished();
  ds.y = (Vector(8) << 0, 0, 1, 0, 1, 0, 1, 1).finished();
  BootstrapConfig c;
  c.B = 60;
  c.seed = 5;
  c.max_retries = 0;
  c.max_skip_fraction = 1.0;
  const BootstrapReplicates reps = run_bootstrap(ds, c);
  CHECK(reps.skipped > 0);
  int skipped = 0;
  for (const auto& r : reps.rows) {
    skipped += r.skipped;
    CHECK(r.attempts == 1);
  }
  CHECK(skipped == reps.skipped);
  CHECK(reps.as_matrix().rows() == 60 - reps.skipped);

  c.max_retries = 10;
  const BootstrapReplicates retried = run_bootstrap(ds, c);
  CHECK(retried.skipped < reps.skipped);
  bool any_retry = false;
  for (const auto& r : retried.rows) any_retry |= r.attempts > 1;
  CHECK(any_retry);

  c.max_retries = 0;
  c.max_skip_fraction = 0.05;
  try {
    run_bootstrap(ds, c);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooManyFailures);
  }
}

TEST_CASE("summarize arithmetic") {
  SUBCASE("+-d rows give SD |d|") {
    const Vector d = (Vector(3) << 0.3, -1.25, 2.0).finished();
    const BootstrapSummary s = summarize(synthetic({d, -d}));
    for (Eigen::Index j = 0; j < 3; ++j) {
      CHECK(s.se_w(j) == std::abs(d(j)));
      CHECK(s.se_mle(j) == std::abs(d(j)));
      CHECK(s.ratio_w(j) == 1.0);
      CHECK(s.ratio_varu(j) == doctest::Approx(0.5));
      CHECK(s.ratio_fixu(j) == doctest::Approx(2.0));
    }
    CHECK(s.used == 2);
  }
  SUBCASE("centering at the original estimate") {
    // Deviations m + e and m - e: mean-centering would give |e|.
    const Vector m = (Vector(2) << 1.0, -2.0).finished();
    const Vector e = (Vector(2) << 0.5, 0.25).finished();
    const BootstrapSummary s = summarize(synthetic({m + e, m - e}));
    for (Eigen::Index j = 0; j < 2; ++j) {
      CHECK(s.se_w(j) == doctest::Approx(std::sqrt(m(j) * m(j) + e(j) * e(j))).epsilon(1e-15));
      CHECK(s.se_w(j) > std::abs(e(j)));
    }
    CHECK(s.sd_w(0, 1) == doctest::Approx(m(0) * m(1) + e(0) * e(1)));
  }
  SUBCASE("u distribution") {
    const Vector d = Vector::Ones(3);
    const BootstrapSummary s = summarize(synthetic({d, d, d, d}, {1, 1, 3, 2}));
    REQUIRE(s.u_distribution.size() == 4);
    CHECK(s.u_distribution[0] == 0.0);
    CHECK(s.u_distribution[1] == 0.5);
    CHECK(s.u_distribution[2] == 0.25);
    CHECK(s.u_distribution[3] == 0.25);
  }
  SUBCASE("too few replicates") {
    CHECK_THROWS_AS(summarize(synthetic({Vector::Ones(2)})), Error);
  }
}

TEST_CASE("summary properties on a real bootstrap") {
  Dataset ds = testgen::logistic_toy(75, 200, 3);
  BootstrapConfig c;
  c.B = 30;
  const BootstrapSummary s = summarize(run_bootstrap(ds, c));
  CHECK(std::accumulate(s.u_distribution.begin(), s.u_distribution.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  for (const Matrix* m : {&s.sd_w, &s.sd_varu, &s.sd_fixu, &s.sd_mle}) {
    CHECK((*m - m->transpose()).norm() < 1e-14);
    Eigen::SelfAdjointEigenSolver<Matrix> es(*m);
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
  }
  for (Eigen::Index j = 0; j < 3; ++j) {
    CHECK(s.ratio_w(j) > 0.0);
    CHECK(s.ratio_varu(j) > 0.0);
    CHECK(s.ratio_fixu(j) > 0.0);
  }
}

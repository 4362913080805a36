#include "envkit/sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "envkit/error.hpp"
#include "envkit/parallel.hpp"

namespace envkit {

std::string_view to_string(SettingId s) { return s == SettingId::A ? "A" : "B"; }

SettingId parse_setting(std::string_view s) {
  if (s == "A" || s == "a") return SettingId::A;
  if (s == "B" || s == "b") return SettingId::B;
  throw Error(ErrorCode::InvalidConfig, "unknown setting '" + std::string(s) + "' (expected A or B)");
}

namespace {

Vector exp_range(int lo, int hi) {
  Vector v(hi - lo + 1);
  for (int i = lo; i <= hi; ++i) v(i - lo) = std::exp(static_cast<double>(i));
  return v;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

SimSetting build_setting(Family family, SettingId setting) {
  if (family == Family::Linear) {
    throw Error(ErrorCode::InvalidConfig, "simulation designs exist for logistic and poisson only");
  }
  SimSetting ss;
  ss.family = family;
  ss.setting = setting;
  const int p = ss.p;
  const int u = ss.u;

  const Vector v1 = Vector::Constant(p, 1.0 / std::sqrt(static_cast<double>(p)));
  Eigen::HouseholderQR<Matrix> qr(v1);
  const Matrix q = qr.householderQ() * Matrix::Identity(p, p);
  if (family == Family::Logistic) {
    ss.gamma = q.leftCols(u);
    ss.gamma0 = q.rightCols(p - u);
  } else {
    ss.gamma = q.rightCols(u);
    ss.gamma0 = q.leftCols(p - u);
  }

  const bool a = setting == SettingId::A;
  if (family == Family::Logistic) {
    ss.omega = a ? Vector((Vector(2) << 2.0, 3.0).finished()) : Vector((Vector(2) << std::exp(-4.0), std::exp(-5.0)).finished());
    ss.omega0 = a ? exp_range(-4, 1) : exp_range(-3, 2);
  } else {
    ss.omega = a ? Vector((Vector(2) << 1.0, 10.0).finished()) : Vector((Vector(2) << std::exp(-3.0), std::exp(-2.0)).finished());
    ss.omega0 = a ? exp_range(-6, -1) : exp_range(-4, 1);
  }

  ss.sigma_x = SymMatrix(ss.gamma * ss.omega.asDiagonal() * ss.gamma.transpose() +
                         ss.gamma0 * ss.omega0.asDiagonal() * ss.gamma0.transpose());
  const SymEigen eig = eigen_sym(ss.sigma_x);
  ss.sigma_x_half = eig.vectors * eig.values.cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                    eig.vectors.transpose();

  const Vector eta = Vector::Ones(u);
  ss.theta = ss.gamma * eta;
  ss.theta *= (family == Family::Logistic ? 1.0 : 0.5) / ss.theta.norm();
  return ss;
}

Dataset generate_dataset(const SimSetting& ss, std::size_t n, Philox4x32& rng) {
  if (n < 1) throw Error(ErrorCode::InvalidConfig, "simulated sample size must be >= 1");
  const Eigen::Index rows = static_cast<Eigen::Index>(n);
  Matrix z(rows, ss.p);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (int j = 0; j < ss.p; ++j) z(i, j) = normal(rng);
  }
  Dataset ds;
  ds.family = ss.family;
  ds.has_intercept = false;
  ds.X = z * ss.sigma_x_half;
  ds.y.resize(rows);
  for (int j = 0; j < ss.p; ++j) ds.predictor_names.push_back("x" + std::to_string(j + 1));
  const Vector t = ds.X * ss.theta;
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (ss.family == Family::Logistic) {
      std::bernoulli_distribution coin(1.0 / (1.0 + std::exp(-t(i))));
      ds.y(i) = coin(rng) ? 1.0 : 0.0;
    } else {
      std::poisson_distribution<long long> count(std::exp(std::min(t(i), kMaxLinearPredictor)));
      ds.y(i) = static_cast<double>(count(rng));
    }
  }
  return ds;
}

std::uint64_t cell_tag(Family family, SettingId setting, std::size_t n) {
  return (static_cast<std::uint64_t>(family) << 56) ^ (static_cast<std::uint64_t>(setting) << 48) ^
         static_cast<std::uint64_t>(n);
}

std::vector<RatioCell> run_ratio_table(const RatioTableConfig& cfg) {
  struct CellSpec {
    const SimSetting* ss;
    std::size_t n;
  };
  std::vector<CellSpec> specs;
  for (const SimSetting& ss : cfg.settings) {
    for (std::size_t n : cfg.ns) specs.push_back({&ss, n});
  }
  const std::size_t workers = resolve_workers(cfg.workers);
  const std::size_t outer = std::min(workers, std::max<std::size_t>(specs.size(), 1));
  const int inner = static_cast<int>(std::max<std::size_t>(1, workers / outer));

  std::vector<RatioCell> cells(specs.size());
  parallel_for(specs.size(), outer, [&](std::size_t c) {
    const SimSetting& ss = *specs[c].ss;
    const std::size_t n = specs[c].n;
    const std::uint64_t tag = cell_tag(ss.family, ss.setting, n);
    Philox4x32 rng(cfg.seed, dataset_stream(tag));
    const Dataset ds = generate_dataset(ss, n, rng);

    BootstrapConfig bc;
    bc.B = cfg.B;
    bc.seed = mix64(cfg.seed ^ mix64(tag));
    bc.analysis = cfg.analysis;
    bc.workers = inner;
    const BootstrapReplicates reps = run_bootstrap(ds, bc);
    cells[c] = RatioCell{ss.family, ss.setting, n, reps.original.u_hat, summarize(reps)};
  });
  return cells;
}

}  // namespace envkit

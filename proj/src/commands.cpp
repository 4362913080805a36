#include "envkit/commands.hpp"

#include <cstdlib>
#include <string>

#include "envkit/dataset_csv.hpp"
#include "envkit/error.hpp"

namespace envkit {

void RunConfig::validate() const {
  if (command != "fit" && command != "bootstrap" && command != "simulate") {
    throw Error(ErrorCode::InvalidConfig, "unknown command '" + command + "'");
  }
  if (!(C > 0.0)) throw Error(ErrorCode::InvalidPenalty, "C must be positive");
  if (B < 1) throw Error(ErrorCode::InvalidConfig, "B must be >= 1");
  if (command == "simulate") {
    if (family == Family::Linear) {
      throw Error(ErrorCode::InvalidConfig, "simulate needs --family logistic or poisson");
    }
    if (settings.empty() || ns.empty()) {
      throw Error(ErrorCode::InvalidConfig, "simulate needs at least one setting and one n");
    }
    for (std::size_t n : ns) {
      if (n < 2) throw Error(ErrorCode::InvalidConfig, "simulated n must be >= 2");
    }
  } else {
    if (input_path.empty()) throw Error(ErrorCode::InvalidConfig, "--input is required");
    if (response.empty()) throw Error(ErrorCode::InvalidConfig, "--response is required");
  }
}

AnalysisOptions RunConfig::analysis() const {
  AnalysisOptions a;
  a.method = method;
  a.C = C;
  a.range = range;
  return a;
}

namespace {

Dataset load(const RunConfig& cfg) {
  return read_dataset_csv_file(cfg.input_path, CsvDatasetOptions{cfg.response, cfg.family, cfg.intercept});
}

std::vector<std::string> names_of(const Dataset& ds) {
  if (static_cast<Eigen::Index>(ds.predictor_names.size()) == ds.p()) return ds.predictor_names;
  std::vector<std::string> out;
  for (Eigen::Index j = 0; j < ds.p(); ++j) out.push_back("x" + std::to_string(j + 1));
  return out;
}

void common_meta(Report& r, const RunConfig& cfg, const Dataset& ds, const EnvelopeAnalysis& a) {
  r.meta.emplace_back("family", std::string(to_string(cfg.family)));
  r.meta.emplace_back("method", std::string(to_string(cfg.method)));
  r.meta.emplace_back("n", static_cast<double>(ds.n()));
  r.meta.emplace_back("p", static_cast<double>(ds.p()));
  r.meta.emplace_back("C", cfg.C);
  r.meta.emplace_back("range", std::string(to_string(cfg.range)));
  r.meta.emplace_back("u_hat", static_cast<double>(a.u_hat));
  if (ds.has_intercept) r.meta.emplace_back("intercept", a.mle.intercept);
}

Matrix sd_table_source(const BootstrapSummary& s, int which) {
  switch (which) {
    case 0: return s.sd_w;
    case 1: return s.sd_varu;
    case 2: return s.sd_fixu;
    default: return s.sd_mle;
  }
}

}  // namespace

Report cmd_fit(const RunConfig& cfg) {
  cfg.validate();
  const Dataset ds = load(cfg);
  const EnvelopeAnalysis a = analyze(ds, cfg.analysis());
  const auto names = names_of(ds);

  Report r;
  r.command = "fit";
  common_meta(r, cfg, ds, a);

  ReportTable coef{"coefficients", {"theta_tilde", "theta_w", "theta_uhat"}, {}, {}};
  for (Eigen::Index j = 0; j < ds.p(); ++j) {
    coef.add_row(names[static_cast<std::size_t>(j)],
                 {a.path.theta_tilde(j), a.theta_w(j), a.theta_uhat(j)});
  }
  ReportTable dims{"dimensions", {"k", "criterion", "weight"}, {}, {}};
  for (int k = a.weights.first_k(); k <= a.criteria.p(); ++k) {
    dims.add_row(std::to_string(k), {static_cast<double>(k),
                                     a.criteria.values[static_cast<std::size_t>(k)],
                                     a.weights.at(k)});
  }
  r.tables.push_back(std::move(coef));
  r.tables.push_back(std::move(dims));
  return r;
}

Report cmd_bootstrap(const RunConfig& cfg) {
  cfg.validate();
  const Dataset ds = load(cfg);
  BootstrapConfig bc;
  bc.B = cfg.B;
  bc.seed = cfg.seed;
  bc.analysis = cfg.analysis();
  bc.workers = cfg.workers;
  const BootstrapReplicates reps = run_bootstrap(ds, bc);
  const BootstrapSummary s = summarize(reps);
  const EnvelopeAnalysis& a = reps.original;
  const auto names = names_of(ds);

  Report r;
  r.command = "bootstrap";
  common_meta(r, cfg, ds, a);
  r.meta.emplace_back("B", static_cast<double>(cfg.B));
  r.meta.emplace_back("seed", static_cast<double>(cfg.seed));
  r.meta.emplace_back("used", static_cast<double>(s.used));
  r.meta.emplace_back("skipped", static_cast<double>(s.skipped));

  ReportTable coef{"coefficients",
                   {"theta_w", "sd_w", "theta_uhat", "sd_varu", "sd_fixu", "theta_mle", "sd_mle",
                    "ratio_w", "ratio_varu", "ratio_fixu"},
                   {},
                   {}};
  for (Eigen::Index j = 0; j < ds.p(); ++j) {
    coef.add_row(names[static_cast<std::size_t>(j)],
                 {a.theta_w(j), s.se_w(j), a.theta_uhat(j), s.se_varu(j), s.se_fixu(j),
                  a.path.theta_tilde(j), s.se_mle(j), s.ratio_w(j), s.ratio_varu(j),
                  s.ratio_fixu(j)});
  }
  r.tables.push_back(std::move(coef));

  const char* sd_names[] = {"sd_matrix_w", "sd_matrix_varu", "sd_matrix_fixu", "sd_matrix_mle"};
  for (int which = 0; which < 4; ++which) {
    const Matrix m = sd_table_source(s, which);
    ReportTable t{sd_names[which], names, {}, {}};
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      std::vector<double> row(static_cast<std::size_t>(m.cols()));
      for (Eigen::Index j = 0; j < m.cols(); ++j) row[static_cast<std::size_t>(j)] = m(i, j);
      t.add_row(names[static_cast<std::size_t>(i)], std::move(row));
    }
    r.tables.push_back(std::move(t));
  }

  ReportTable ud{"u_distribution", {"k", "frequency"}, {}, {}};
  for (std::size_t k = 0; k < s.u_distribution.size(); ++k) {
    ud.add_row(std::to_string(k), {static_cast<double>(k), s.u_distribution[k]});
  }
  r.tables.push_back(std::move(ud));
  return r;
}

Report cmd_simulate(const RunConfig& cfg) {
  cfg.validate();
  RatioTableConfig rc;
  for (SettingId s : cfg.settings) rc.settings.push_back(build_setting(cfg.family, s));
  rc.ns = cfg.ns;
  rc.B = cfg.B;
  rc.seed = cfg.seed;
  rc.analysis = cfg.analysis();
  rc.workers = cfg.workers;
  const auto cells = run_ratio_table(rc);

  Report r;
  r.command = "simulate";
  r.meta.emplace_back("family", std::string(to_string(cfg.family)));
  r.meta.emplace_back("method", std::string(to_string(cfg.method)));
  r.meta.emplace_back("C", cfg.C);
  r.meta.emplace_back("range", std::string(to_string(cfg.range)));
  r.meta.emplace_back("B", static_cast<double>(cfg.B));
  r.meta.emplace_back("seed", static_cast<double>(cfg.seed));

  ReportTable t{"ratios", {"n", "u_hat", "component", "ratio_w", "ratio_varu", "ratio_fixu"}, {}, {}};
  for (const RatioCell& c : cells) {
    const std::string prefix = std::string(to_string(c.setting)) + "/n=" + std::to_string(c.n) + "/x";
    for (Eigen::Index j = 0; j < c.summary.ratio_w.size(); ++j) {
      t.add_row(prefix + std::to_string(j + 1),
                {static_cast<double>(c.n), static_cast<double>(c.u_hat), static_cast<double>(j + 1),
                 c.summary.ratio_w(j), c.summary.ratio_varu(j), c.summary.ratio_fixu(j)});
    }
  }
  r.tables.push_back(std::move(t));
  return r;
}

Report run_command(const RunConfig& cfg) {
  if (cfg.command == "fit") return cmd_fit(cfg);
  if (cfg.command == "bootstrap") return cmd_bootstrap(cfg);
  if (cfg.command == "simulate") return cmd_simulate(cfg);
  throw Error(ErrorCode::InvalidConfig, "unknown command '" + cfg.command + "'");
}

std::string render(const Report& r, OutputFormat format) {
  return format == OutputFormat::Json ? to_json(r) : to_csv(r);
}

int workers_from_env(int flag_value, bool flag_given) {
  if (flag_given) return flag_value;
  const char* env = std::getenv("ENVKIT_WORKERS");
  if (env == nullptr || *env == '\0') return 0;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 0 || v > 4096) {
    throw Error(ErrorCode::InvalidConfig, std::string("ENVKIT_WORKERS is not a valid count: '") + env + "'");
  }
  return static_cast<int>(v);
}

}  // namespace envkit

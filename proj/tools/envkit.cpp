#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "envkit/commands.hpp"
#include "envkit/error.hpp"

namespace {

struct Flags {
  std::string input, response, family = "linear", method = "1d", range = "1p", format = "json", out;
  double C = 1.0;
  int B = 1000;
  std::uint64_t seed = 13;
  int workers = 0;
  bool intercept = false;
  std::vector<std::string> settings{"A"};
  std::vector<std::size_t> ns{300};
};

void add_common(CLI::App* sub, Flags& f, bool needs_input) {
  if (needs_input) {
    sub->add_option("--input", f.input, "CSV file with a header row")->required()->check(CLI::ExistingFile);
    sub->add_option("--response", f.response, "response column name")->required();
    sub->add_flag("--intercept", f.intercept, "fit an intercept in the baseline model");
  }
  sub->add_option("--family", f.family, "linear, logistic or poisson")
      ->check(CLI::IsMember({"linear", "logistic", "poisson"}));
  sub->add_option("--method", f.method, "1d or fg")->check(CLI::IsMember({"1d", "fg"}));
  sub->add_option("--C", f.C, "penalty multiplier")->check(CLI::PositiveNumber);
  sub->add_option("--B", f.B, "bootstrap replicates")->check(CLI::Range(1, 100000000));
  sub->add_option("--seed", f.seed, "random seed");
  sub->add_option("--range", f.range, "candidate dimensions: 0p or 1p")->check(CLI::IsMember({"0p", "1p"}));
  sub->add_option("--workers", f.workers, "worker threads (0 = all cores); falls back to ENVKIT_WORKERS")
      ->check(CLI::Range(0, 4096));
  sub->add_option("--out", f.out, "output file (default stdout)");
  sub->add_option("--format", f.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
}

envkit::RunConfig to_config(const std::string& command, const Flags& f, bool workers_given) {
  envkit::RunConfig cfg;
  cfg.command = command;
  cfg.input_path = f.input;
  cfg.response = f.response;
  cfg.family = envkit::parse_family(f.family);
  cfg.intercept = f.intercept;
  cfg.method = f.method == "fg" ? envkit::Method::FG : envkit::Method::OneD;
  cfg.C = f.C;
  cfg.B = f.B;
  cfg.seed = f.seed;
  cfg.range = f.range == "0p" ? envkit::CandidateRange::ZeroToP : envkit::CandidateRange::OneToP;
  cfg.format = f.format == "csv" ? envkit::OutputFormat::Csv : envkit::OutputFormat::Json;
  cfg.workers = envkit::workers_from_env(f.workers, workers_given);
  cfg.settings.clear();
  for (const auto& s : f.settings) cfg.settings.push_back(envkit::parse_setting(s));
  cfg.ns = f.ns;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted envelope estimation"};
  app.require_subcommand(1);
  Flags f;

  auto* fit = app.add_subcommand("fit", "fit envelopes at every candidate dimension");
  add_common(fit, f, true);
  auto* boot = app.add_subcommand("bootstrap", "nonparametric bootstrap of the envelope estimators");
  add_common(boot, f, true);
  auto* sim = app.add_subcommand("simulate", "bootstrap ratio table on a simulated design");
  add_common(sim, f, false);
  sim->add_option("--setting", f.settings, "design setting(s): A, B")
      ->delimiter(',')
      ->check(CLI::IsMember({"A", "B"}));
  sim->add_option("--n", f.ns, "sample size(s), comma separated")->delimiter(',')->check(CLI::Range(2, 100000000));

  CLI11_PARSE(app, argc, argv);

  CLI::App* chosen = app.get_subcommands().front();
  const bool workers_given = chosen->count("--workers") > 0;
  try {
    const envkit::RunConfig cfg = to_config(chosen->get_name(), f, workers_given);
    const envkit::Report report = envkit::run_command(cfg);
    const std::string text = envkit::render(report, cfg.format);
    if (f.out.empty()) {
      std::cout << text;
      std::cout.flush();
      if (!std::cout) return 3;
    } else {
      std::ofstream os(f.out, std::ios::binary | std::ios::trunc);
      os << text;
      os.close();
      if (!os) {
        std::cerr << "error: cannot write '" << f.out << "'\n";
        return 3;
      }
    }
  } catch (const envkit::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

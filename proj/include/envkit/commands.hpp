#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "envkit/bootstrap.hpp"
#include "envkit/report.hpp"
#include "envkit/sim.hpp"

namespace envkit {

enum class OutputFormat { Json, Csv };

struct RunConfig {
  std::string command;  // fit, bootstrap or simulate
  std::string input_path;
  std::string response;
  Family family = Family::Linear;
  bool intercept = false;
  Method method = Method::OneD;
  double C = 1.0;
  int B = 1000;
  std::uint64_t seed = 13;
  CandidateRange range = CandidateRange::OneToP;
  OutputFormat format = OutputFormat::Json;
  int workers = 0;
  // simulate only
  std::vector<SettingId> settings{SettingId::A};
  std::vector<std::size_t> ns{300};

  /// Throws InvalidConfig.
  void validate() const;
  AnalysisOptions analysis() const;
};

Report cmd_fit(const RunConfig& cfg);
Report cmd_bootstrap(const RunConfig& cfg);
Report cmd_simulate(const RunConfig& cfg);

/// Dispatches on cfg.command.
Report run_command(const RunConfig& cfg);

std::string render(const Report& r, OutputFormat format);

/// Worker count from the flag, else ENVKIT_WORKERS, else 0 (auto).
int workers_from_env(int flag_value, bool flag_given);

}  // namespace envkit

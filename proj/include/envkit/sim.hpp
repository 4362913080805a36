#pragma once

// Simulation designs with p = 8 predictors and a u = 2 dimensional envelope:
// X ~ N(0, Sigma_X), Sigma_X = Gamma Omega Gamma^T + Gamma0 Omega0 Gamma0^T,
// theta in span(Gamma). Gamma comes from the complete Q factor of the QR
// decomposition of the constant unit vector; logistic designs take its first
// u columns, Poisson designs its last u columns.

#include <cstdint>
#include <string_view>
#include <vector>

#include "envkit/bootstrap.hpp"
#include "envkit/glm.hpp"
#include "envkit/rng.hpp"

namespace envkit {

enum class SettingId { A, B };

std::string_view to_string(SettingId s);
SettingId parse_setting(std::string_view s);

struct SimSetting {
  Family family = Family::Logistic;
  SettingId setting = SettingId::A;
  int p = 8;
  int u = 2;
  Matrix gamma;    // p x u
  Matrix gamma0;   // p x (p - u)
  Vector omega;    // diagonal of Omega
  Vector omega0;   // diagonal of Omega0
  SymMatrix sigma_x;
  Matrix sigma_x_half;  // symmetric square root
  Vector theta;
};

SimSetting build_setting(Family family, SettingId setting);

/// Rows x_i = Sigma_X^{1/2} z_i with z_i standard normal; responses are
/// Bernoulli(1 / (1 + exp(-theta^T x))) or Poisson(exp(theta^T x)) with the
/// exponent capped at kMaxLinearPredictor. No intercept.
Dataset generate_dataset(const SimSetting& ss, std::size_t n, Philox4x32& rng);

struct RatioTableConfig {
  std::vector<SimSetting> settings;
  std::vector<std::size_t> ns;
  int B = 500;
  std::uint64_t seed = 13;
  AnalysisOptions analysis{};
  int workers = 0;
};

struct RatioCell {
  Family family;
  SettingId setting;
  std::size_t n;
  int u_hat;
  BootstrapSummary summary;
};

/// One dataset and one bootstrap per (setting, n) cell, in settings-major
/// order. Dataset and bootstrap streams are derived from `seed` and the cell.
std::vector<RatioCell> run_ratio_table(const RatioTableConfig& cfg);

/// Stream tag identifying a (family, setting, n) cell.
std::uint64_t cell_tag(Family family, SettingId setting, std::size_t n);

}  // namespace envkit

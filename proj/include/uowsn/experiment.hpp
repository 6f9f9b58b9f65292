#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uowsn/channel.hpp"
#include "uowsn/localization.hpp"
#include "uowsn/netgraph.hpp"

namespace uowsn::simcli {

enum class ExperimentKind { kConnectivitySweep, kLocalizationSweep, kChannelTable };

std::string_view kind_name(ExperimentKind kind);

/// A validated experiment. Lengths in meters, angles in radians, noise in
/// percent of the true distance.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kConnectivitySweep;
  std::string output;  // empty: chosen by the caller

  // Sweeps.
  double area_side = 100.0;
  std::size_t trials = 0;
  std::uint64_t seed = 1;
  std::vector<std::size_t> M;
  std::vector<double> R;
  std::vector<double> phi;
  std::vector<netgraph::BorderMode> border_mode;

  // connectivity_sweep
  std::vector<std::size_t> k;

  // localization_sweep
  std::vector<double> noise_pct;
  std::vector<std::size_t> anchors;
  /// Fixed anchors: nodes 0..n-1 are moved to these points.
  std::vector<std::array<double, 2>> anchor_positions;
  std::vector<localization::Method> methods;
  localization::RmseFormula rmse = localization::RmseFormula::kRootSumOverCount;
  int max_iters = 500;
  double tol = 1e-6;
  bool allow_reflection = true;

  // channel_table
  std::vector<std::string> water;
  std::vector<double> wavelength_nm;
  std::vector<double> chlorophyll;
  std::vector<double> distance;
  double tx_power = 0.1;
  double tx_efficiency = 0.9;
  double rx_efficiency = 0.9;
  double rx_aperture = 0.01;
  double divergence = 0.5235987755982988;
  double incidence = 0.0;
  std::string water_config;  // empty: built-in tables

  bool operator==(const ExperimentConfig&) const = default;
};

struct ConfigError {
  std::size_t line = 0;  // 0: not tied to a line
  std::string message;
};

struct ValidationResult {
  std::optional<ExperimentConfig> config;
  std::vector<ConfigError> errors;

  bool ok() const { return config.has_value(); }
};

/// Parses and checks a whole config file, reporting every problem at once.
/// Missing optional keys get their defaults.
ValidationResult validate(std::string_view text);

/// Canonical text form: every applicable key, defaults included. Feeding it
/// back to validate() yields an identical config.
std::string to_text(const ExperimentConfig& config);

/// FNV-1a 64 of the canonical text with `output` cleared.
std::uint64_t config_hash(const ExperimentConfig& config);

/// Parses one scalar: a decimal number, optionally with a `pi` factor and a
/// divisor, e.g. "0.5", "pi", "2pi/9", "3*pi/4", "1/3".
std::optional<double> parse_real(std::string_view text);

/// Shortest plain decimal that reads back as the same double.
std::string format_decimal(double value);

/// Prints a real so that parse_real returns the same double; multiples of pi
/// with small denominators keep their symbolic form.
std::string format_real(double value);

}  // namespace uowsn::simcli

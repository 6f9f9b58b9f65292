#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "uowsn/experiment.hpp"

namespace uowsn::simcli {

inline constexpr std::string_view kToolVersion = "1.0.0";

/// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "UOWSN_OUTPUT_DIR";

/// I/O or compute failure during a run (as opposed to a bad config).
class RunError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunOptions {
  /// 0 = all cores. Output bytes never depend on it.
  unsigned threads = 0;
  /// Progress lines go here when set.
  std::ostream* log = nullptr;
};

struct SweepResult {
  std::filesystem::path path;
  std::uint64_t config_hash = 0;
  std::size_t rows = 0;
  /// Rows already present from an earlier, interrupted run.
  std::size_t reused = 0;
  std::size_t computed = 0;
};

/// One localization trial as a sweep builds it: deployment, anchors and
/// noisy ranges all come from substreams of the config seed keyed by the grid
/// point, with the trial index as counter. noise_pct is in percent.
struct LocalizationScenario {
  netgraph::DirectedSectorGraph graph;
  localization::AnchorSet anchors;
  localization::ObservedDistanceMatrix observed;
};

LocalizationScenario make_localization_scenario(const ExperimentConfig& config,
                                                std::size_t M, std::size_t anchor_count,
                                                double phi, double R, double noise_pct,
                                                std::uint64_t trial);

/// Column names of each kind's CSV.
const std::vector<std::string>& csv_columns(ExperimentKind kind);

/// `output` when set, else $UOWSN_OUTPUT_DIR (or ./results) / <stem>.csv.
std::filesystem::path resolve_output(const ExperimentConfig& config,
                                     std::string_view stem);

/// Runs the whole grid and writes the CSV at config.output (which must be
/// set). Rows are written in canonical grid order and flushed one by one. An
/// existing file from the same config is resumed: rows already there are
/// kept and only the missing ones computed. A file from a different config
/// is an error. The output is checked for writability before any work.
SweepResult run(const ExperimentConfig& config, const RunOptions& options = {});

}  // namespace uowsn::simcli

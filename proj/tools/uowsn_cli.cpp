// Command-line front end: run and validate experiment configs, hand CSVs to
// the figure renderer.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uowsn/experiment.hpp"
#include "uowsn/sweep.hpp"

namespace fs = std::filesystem;
using namespace uowsn::simcli;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

const char* const kPlotterEnv = "UOWSN_PLOTTER";
const std::vector<std::string> kFigureIds = {"fig7",  "fig8",  "fig9",
                                             "fig10", "fig11", "fig12",
                                             "fig13", "fig14", "channel"};

std::optional<std::string> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Validation errors go to stderr as "<file>:<line>: message".
std::optional<ExperimentConfig> load_config(const fs::path& path) {
  const auto text = read_file(path);
  if (!text) {
    std::cerr << path.string() << ": cannot read file\n";
    return std::nullopt;
  }
  auto result = validate(*text);
  for (const auto& e : result.errors) {
    std::cerr << path.string();
    if (e.line) std::cerr << ':' << e.line;
    std::cerr << ": " << e.message << '\n';
  }
  return result.config;
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Underwater optical sensor network connectivity and localization lab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  auto* run_cmd = app.add_subcommand("run", "Run an experiment config and write its CSV");
  std::string run_config;
  std::optional<std::uint64_t> seed;
  std::string output;
  unsigned threads = 0;
  run_cmd->add_option("config", run_config, "Experiment config file")->required();
  run_cmd->add_option("--seed", seed, "Override the config's root seed");
  run_cmd->add_option("--output,-o", output,
                      "CSV path (default: $UOWSN_OUTPUT_DIR/<config name>.csv)");
  run_cmd->add_option("--threads,-j", threads, "Worker threads, 0 = all cores");

  auto* validate_cmd =
      app.add_subcommand("validate", "Check a config and print its canonical form");
  std::string validate_config;
  validate_cmd->add_option("config", validate_config, "Experiment config file")
      ->required();

  auto* figures_cmd =
      app.add_subcommand("figures", "Render figures from a directory of CSVs");
  std::string csv_dir;
  std::string figures_out;
  std::vector<std::string> figure_ids;
  figures_cmd->add_option("csv-dir", csv_dir, "Directory holding sweep CSVs")
      ->required();
  figures_cmd->add_option("--out", figures_out, "Image directory (default: <csv-dir>/figures)");
  figures_cmd->add_option("--figure", figure_ids, "Figure ids (default: all)")
      ->check(CLI::IsMember(kFigureIds));

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  if (*validate_cmd) {
    const auto config = load_config(validate_config);
    if (!config) return kExitValidation;
    std::cout << to_text(*config);
    return kExitOk;
  }

  if (*run_cmd) {
    auto config = load_config(run_config);
    if (!config) return kExitValidation;
    if (seed) config->seed = *seed;
    if (!output.empty()) config->output = output;
    config->output = resolve_output(*config, fs::path(run_config).stem().string()).string();
    try {
      RunOptions options;
      options.threads = threads;
      options.log = &std::cerr;
      run(*config, options);
    } catch (const std::exception& e) {
      std::cerr << "run failed: " << e.what() << '\n';
      return kExitRuntime;
    }
    return kExitOk;
  }

  if (*figures_cmd) {
    if (!fs::is_directory(csv_dir)) {
      std::cerr << csv_dir << ": not a directory\n";
      return kExitValidation;
    }
    const char* plotter = std::getenv(kPlotterEnv);
    if (!plotter || !*plotter) {
      std::cerr << "figures: the plotting component is not available; set "
                << kPlotterEnv << " to its command (it is called as "
                << "'<cmd> render --figure <id> --csv <dir> --out <dir>')\n";
      return kExitRuntime;
    }
    if (figures_out.empty()) figures_out = (fs::path(csv_dir) / "figures").string();
    if (figure_ids.empty()) figure_ids = kFigureIds;
    int failures = 0;
    for (const auto& id : figure_ids) {
      const std::string cmd = std::string(plotter) + " render --figure " + shell_quote(id) +
                              " --csv " + shell_quote(csv_dir) + " --out " +
                              shell_quote(figures_out);
      if (std::system(cmd.c_str()) != 0) {
        std::cerr << "figures: rendering " << id << " failed\n";
        ++failures;
      }
    }
    return failures ? kExitRuntime : kExitOk;
  }
  return kExitValidation;
}

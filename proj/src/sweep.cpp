#include "uowsn/sweep.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "uowsn/connectivity.hpp"
#include "uowsn/parallel.hpp"
#include "uowsn/rng.hpp"

namespace uowsn::simcli {

namespace fs = std::filesystem;

namespace {

using localization::Method;
using netgraph::BorderMode;

struct Unit {
  std::string key;
  std::function<std::string()> compute;
};

struct Plan {
  std::vector<Unit> units;
  std::vector<std::size_t> key_columns;
};

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string border_text(BorderMode m) {
  return m == BorderMode::kTorus ? "torus" : "bounded";
}

std::string num(double v) { return format_decimal(v); }

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream in(line);
  std::string field;
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string key_of(const std::vector<std::string>& fields,
                   const std::vector<std::size_t>& columns) {
  std::string key;
  for (std::size_t c : columns) {
    if (!key.empty()) key += ',';
    key += c < fields.size() ? fields[c] : std::string();
  }
  return key;
}

Plan connectivity_plan(const ExperimentConfig& c) {
  Plan plan;
  plan.key_columns = {0, 1, 2, 3, 4};
  for (double phi : c.phi) {
    for (double R : c.R) {
      for (std::size_t M : c.M) {
        for (std::size_t k : c.k) {
          for (BorderMode mode : c.border_mode) {
            const std::string key = num(phi) + "," + num(R) + "," +
                                    std::to_string(M) + "," + std::to_string(k) +
                                    "," + border_text(mode);
            plan.units.push_back({key, [=, &c] {
              double analytic = std::numeric_limits<double>::quiet_NaN();
              if (k <= 2) {
                const auto params = connectivity::ConnectivityParams::from_meters(
                    M, R, c.area_side, phi);
                analytic = connectivity::p_connected_k(params, k).value;
              }
              connectivity::MonteCarloOptions mc;
              mc.trials = c.trials;
              mc.border = mode;
              mc.seed = c.seed;
              mc.stream = fnv1a(key);
              mc.threads = 1;
              const auto est = connectivity::monte_carlo_p_connected(
                  M, c.area_side, phi, R, k, mc);
              return key + "," + num(analytic) + "," + num(est.estimate) + "," +
                     num(est.standard_error) + "," + std::to_string(c.trials) +
                     "," + std::to_string(c.seed);
            }});
          }
        }
      }
    }
  }
  return plan;
}

localization::LocalizationResult localization_run(const ExperimentConfig& c,
                                                  Method method, std::size_t M,
                                                  std::size_t anchor_count,
                                                  double phi, double R,
                                                  double noise_pct,
                                                  std::uint64_t trial) {
  const auto sc = make_localization_scenario(c, M, anchor_count, phi, R, noise_pct, trial);
  localization::LocalizeOptions opts;
  opts.completion.max_iters = c.max_iters;
  opts.completion.tol = c.tol;
  opts.procrustes.allow_reflection = c.allow_reflection;
  opts.rmse = c.rmse;
  return localization::localize(sc.graph, sc.observed, sc.anchors, method, opts);
}

Plan localization_plan(const ExperimentConfig& c) {
  Plan plan;
  plan.key_columns = {0, 1, 2, 3, 4, 5, 6};
  for (Method method : c.methods) {
    for (std::size_t M : c.M) {
      for (std::size_t a : c.anchors) {
        for (double phi : c.phi) {
          for (double R : c.R) {
            for (double noise : c.noise_pct) {
              for (std::uint64_t t = 0; t < c.trials; ++t) {
                const std::string key =
                    std::string(localization::method_name(method)) + "," +
                    std::to_string(M) + "," + std::to_string(a) + "," + num(phi) +
                    "," + num(R) + "," + num(noise) + "," + std::to_string(t);
                plan.units.push_back({key, [=, &c] {
                  const auto r = localization_run(c, method, M, a, phi, R, noise, t);
                  return key + "," + num(r.rmse) + "," + std::to_string(r.unlocalized) +
                         "," + std::to_string(r.iterations) + "," +
                         num(r.completion_residual);
                }});
              }
            }
          }
        }
      }
    }
  }
  return plan;
}

Plan channel_plan(const ExperimentConfig& c) {
  Plan plan;
  plan.key_columns = {0, 1, 2, 6};
  auto water_cfg = std::make_shared<channel::WaterConfig>(
      c.water_config.empty() ? channel::default_water_config()
                             : channel::load_water_config(c.water_config));
  auto link_at = [&c](double d) {
    return channel::OpticalLink{c.tx_power,    c.tx_efficiency, c.rx_efficiency,
                                c.rx_aperture, c.divergence,    c.incidence, d};
  };
  auto row = [link_at](const channel::WaterModel& w, double d) {
    const auto link = link_at(d);
    const double pr = channel::received_power(link, w);
    // Power that underflows to 0 carries no range information.
    const double range = pr > 0.0 ? channel::estimate_range(pr, link, w)
                                  : std::numeric_limits<double>::quiet_NaN();
    return num(w.absorption()) + "," + num(w.scattering()) + "," +
           num(w.extinction()) + "," + num(d) + "," + num(pr) + "," + num(range);
  };
  for (const auto& name : c.water) {
    for (double d : c.distance) {
      const std::string key = name + ",,," + num(d);
      plan.units.push_back({key, [=] {
        return name + ",,," + row(channel::WaterModel::preset(name, *water_cfg), d);
      }});
    }
  }
  for (double lambda : c.wavelength_nm) {
    for (double ce : c.chlorophyll) {
      for (double d : c.distance) {
        const std::string prefix = "chlorophyll," + num(lambda) + "," + num(ce) + ",";
        plan.units.push_back({prefix + num(d), [=] {
          return prefix +
                 row(channel::WaterModel::from_chlorophyll(lambda, ce, *water_cfg), d);
        }});
      }
    }
  }
  return plan;
}

std::string header_line(ExperimentKind kind) {
  std::string out;
  for (const auto& col : csv_columns(kind)) {
    if (!out.empty()) out += ',';
    out += col;
  }
  return out;
}

std::string metadata(const ExperimentConfig& c, std::uint64_t hash) {
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016" PRIx64, hash);
  std::string out;
  out += "# uowsn " + std::string(kToolVersion) + "\n";
  out += "# kind " + std::string(kind_name(c.kind)) + "\n";
  out += "# config_hash " + std::string(hex) + "\n";
  if (c.kind != ExperimentKind::kChannelTable) {
    out += "# seed " + std::to_string(c.seed) + "\n";
  }
  return out;
}

// Rows of an existing output file, by unit index, plus the byte length of
// its complete lines.
struct Existing {
  std::vector<std::optional<std::string>> rows;
  std::size_t count = 0;
  std::size_t prefix = 0;  // rows 0..prefix-1 present, in file order
  bool in_order = true;
  std::uintmax_t valid_bytes = 0;
};

Existing read_existing(const fs::path& path, const std::string& head,
                       const Plan& plan) {
  Existing ex;
  ex.rows.resize(plan.units.size());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RunError("cannot read existing output " + path.string());
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  const auto last_newline = content.rfind('\n');
  ex.valid_bytes = last_newline == std::string::npos ? 0 : last_newline + 1;
  content.resize(ex.valid_bytes);

  if (content.compare(0, head.size(), head) != 0) {
    throw RunError(path.string() +
                   " exists but was written by a different config or tool "
                   "version; remove it or choose another output");
  }
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < plan.units.size(); ++i) index.emplace(plan.units[i].key, i);

  std::istringstream lines(content.substr(head.size()));
  std::string line;
  std::size_t expected = 0;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    const auto key = key_of(split_csv(line), plan.key_columns);
    const auto it = index.find(key);
    if (it == index.end()) {
      throw RunError(path.string() + ": row '" + key + "' is not part of this grid");
    }
    if (ex.rows[it->second]) {
      throw RunError(path.string() + ": duplicate row '" + key + "'");
    }
    ex.rows[it->second] = line;
    ++ex.count;
    if (it->second != expected) ex.in_order = false;
    ++expected;
  }
  ex.prefix = ex.in_order ? ex.count : 0;
  return ex;
}

}  // namespace

LocalizationScenario make_localization_scenario(const ExperimentConfig& c,
                                                std::size_t M, std::size_t anchor_count,
                                                double phi, double R, double noise_pct,
                                                std::uint64_t trial) {
  const BorderMode mode = c.border_mode.front();
  const std::string graph_key = std::to_string(M) + "|" + num(phi) + "|" + num(R) +
                                "|" + border_text(mode);
  Rng graph_rng = make_substream(c.seed, fnv1a("graph|" + graph_key), trial);
  LocalizationScenario sc;
  sc.graph = netgraph::deploy(M, c.area_side, phi, R, graph_rng, {mode, false});

  if (!c.anchor_positions.empty()) {
    auto nodes = sc.graph.nodes();
    const auto n = c.anchor_positions.size();
    sc.anchors.true_positions.resize(static_cast<Eigen::Index>(n), 2);
    for (std::size_t a = 0; a < n; ++a) {
      nodes[a].coords = {c.anchor_positions[a][0], c.anchor_positions[a][1]};
      sc.anchors.indices.push_back(a);
      sc.anchors.true_positions.row(static_cast<Eigen::Index>(a)) =
          nodes[a].coords.transpose();
    }
    sc.graph = netgraph::DirectedSectorGraph(std::move(nodes), c.area_side, mode);
  } else {
    // Shared across anchor counts so smaller anchor sets nest in larger ones.
    Rng anchor_rng = make_substream(c.seed, fnv1a("anchors|" + graph_key), trial);
    sc.anchors = localization::choose_anchors(sc.graph, anchor_count, anchor_rng);
  }

  Rng noise_rng = make_substream(
      c.seed, fnv1a("noise|" + graph_key + "|" + num(noise_pct)), trial);
  sc.observed = localization::observe_distances(sc.graph, noise_pct / 100.0, noise_rng);
  return sc;
}

const std::vector<std::string>& csv_columns(ExperimentKind kind) {
  static const std::vector<std::string> connectivity = {
      "phi", "R", "M", "k", "mode", "p_analytic", "p_mc", "stderr", "trials", "seed"};
  static const std::vector<std::string> localization = {
      "method", "M",    "anchors",    "phi",        "R",       "noise_pct",
      "seed",   "rmse", "unlocalized", "iterations", "residual"};
  static const std::vector<std::string> channel = {
      "water",      "lambda_nm", "Ce",           "absorption",     "scattering",
      "extinction", "distance",  "received_power", "estimated_range"};
  switch (kind) {
    case ExperimentKind::kConnectivitySweep: return connectivity;
    case ExperimentKind::kLocalizationSweep: return localization;
    case ExperimentKind::kChannelTable: return channel;
  }
  return channel;
}

fs::path resolve_output(const ExperimentConfig& config, std::string_view stem) {
  if (!config.output.empty()) return config.output;
  const char* dir = std::getenv(kOutputDirEnv);
  const fs::path base = (dir && *dir) ? fs::path(dir) : fs::path("results");
  return base / (std::string(stem) + ".csv");
}

SweepResult run(const ExperimentConfig& config, const RunOptions& options) {
  if (config.output.empty()) throw RunError("run: no output path set");
  SweepResult result;
  result.path = config.output;
  result.config_hash = config_hash(config);

  Plan plan;
  switch (config.kind) {
    case ExperimentKind::kConnectivitySweep: plan = connectivity_plan(config); break;
    case ExperimentKind::kLocalizationSweep: plan = localization_plan(config); break;
    case ExperimentKind::kChannelTable: plan = channel_plan(config); break;
  }
  const std::size_t n = plan.units.size();
  const std::string head = metadata(config, result.config_hash) +
                           header_line(config.kind) + "\n";

  std::error_code ec;
  if (result.path.has_parent_path()) fs::create_directories(result.path.parent_path(), ec);
  if (ec) {
    throw RunError("cannot create " + result.path.parent_path().string() + ": " +
                   ec.message());
  }

  std::vector<std::optional<std::string>> ready(n);
  std::size_t next = 0;
  fs::path write_path = result.path;
  std::ofstream out;
  const bool exists = fs::exists(result.path) && fs::file_size(result.path) > 0;
  if (exists) {
    Existing ex = read_existing(result.path, head, plan);
    result.reused = ex.count;
    ready = std::move(ex.rows);
    if (ex.in_order) {
      // An interrupted run leaves a canonical prefix: drop any torn last line
      // and keep appending.
      fs::resize_file(result.path, ex.valid_bytes);
      for (std::size_t i = 0; i < ex.prefix; ++i) ready[i].reset();
      next = ex.prefix;
      out.open(result.path, std::ios::binary | std::ios::app);
    } else {
      write_path = result.path;
      write_path += ".tmp";
      out.open(write_path, std::ios::binary | std::ios::trunc);
      out << head;
    }
  } else {
    out.open(result.path, std::ios::binary | std::ios::trunc);
    out << head;
  }
  out.flush();
  if (!out) throw RunError("cannot write " + write_path.string());

  std::vector<std::size_t> todo;
  for (std::size_t i = next; i < n; ++i) {
    if (!ready[i]) todo.push_back(i);
  }

  std::mutex mutex;
  auto drain = [&] {
    bool wrote = false;
    while (next < n && ready[next]) {
      out << *ready[next] << '\n';
      ready[next].reset();
      ++next;
      wrote = true;
    }
    if (wrote) out.flush();
    if (!out) throw RunError("write failed on " + write_path.string());
  };
  drain();
  parallel_for(todo.size(), options.threads, [&](std::size_t t) {
    const std::size_t i = todo[t];
    std::string row = plan.units[i].compute();
    std::lock_guard lock(mutex);
    ready[i] = std::move(row);
    drain();
  });
  drain();
  out.close();
  if (!out) throw RunError("write failed on " + write_path.string());
  if (write_path != result.path) fs::rename(write_path, result.path);

  result.rows = n;
  result.computed = todo.size();
  if (options.log) {
    *options.log << "wrote " << n << " rows to " << result.path.string() << " ("
                 << result.computed << " computed, " << result.reused
                 << " reused)\n";
  }
  return result;
}

}  // namespace uowsn::simcli

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "uowsn/experiment.hpp"
#include "uowsn/sweep.hpp"

using namespace uowsn;
using namespace uowsn::simcli;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

// Fresh scratch directory per test case.
struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("uowsn_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::vector<std::string> data_lines(const std::string& csv) {
  std::vector<std::string> lines;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') lines.push_back(line);
  }
  return lines;
}

ExperimentConfig must_validate(const std::string& text) {
  auto r = validate(text);
  for (const auto& e : r.errors) MESSAGE("line " << e.line << ": " << e.message);
  REQUIRE(r.ok());
  return *r.config;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(UOWSN_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* const kSmallConnectivity =
    "kind = connectivity_sweep\n"
    "M = 30, 60\n"
    "R = 10, 20\n"
    "phi = pi/2, 2pi\n"
    "k = 1, 2, 3\n"
    "border_mode = torus, bounded\n"
    "trials = 20\n"
    "seed = 9\n";

const char* const kSmallLocalization =
    "kind = localization_sweep\n"
    "M = 30\n"
    "R = 40\n"
    "phi = 3pi/4\n"
    "noise_pct = 2, 6\n"
    "anchors = 4, 6\n"
    "trials = 3\n"
    "max_iters = 60\n";

}  // namespace

TEST_CASE("real parsing and printing") {
  CHECK(parse_real("0.5") == 0.5);
  CHECK(parse_real(" pi ") == kPi);
  CHECK(parse_real("2pi/9") == 2.0 * kPi / 9.0);
  CHECK(parse_real("3*pi/4") == 3.0 * kPi / 4.0);
  CHECK(parse_real("-pi") == -kPi);
  CHECK(parse_real("1/3") == 1.0 / 3.0);
  CHECK(parse_real("1e-6") == 1e-6);
  for (const char* bad : {"", "pi/0", "two", "2pi/", "1/0", "pi pi", "*pi", "nan", "inf"}) {
    CHECK_FALSE(parse_real(bad).has_value());
  }
  CHECK(format_real(2.0 * kPi / 9.0) == "2pi/9");
  CHECK(format_real(kPi) == "pi");
  CHECK(format_real(-kPi / 2.0) == "-pi/2");
  CHECK(format_real(2.0 * kPi) == "2pi");
  CHECK(format_real(10.0) == "10");
  CHECK(format_real(0.1) == "0.1");
  CHECK(format_decimal(std::nan("")) == "nan");
  Rng rng(1);
  for (int i = 0; i < 2000; ++i) {
    const double v = (uniform01(rng) - 0.5) * std::pow(10.0, 12.0 * uniform01(rng) - 6.0);
    CHECK(parse_real(format_real(v)) == v);
    CHECK(parse_real(format_decimal(v)) == v);
  }
  for (int num = -48; num <= 48; ++num) {
    for (int den = 1; den <= 12; ++den) {
      const double v = num * kPi / den;
      CHECK(parse_real(format_real(v)) == v);
    }
  }
}

TEST_CASE("empty file names the required kind") {
  const auto r = validate("");
  REQUIRE(r.errors.size() == 1);
  CHECK(r.errors[0].line == 0);
  CHECK(r.errors[0].message.find("'kind'") != std::string::npos);
  CHECK(r.errors[0].message.find("connectivity_sweep") != std::string::npos);
}

TEST_CASE("a kind with nothing else lists every missing key") {
  const auto r = validate("kind = connectivity_sweep\n");
  CHECK_FALSE(r.ok());
  std::string all;
  for (const auto& e : r.errors) all += e.message + "\n";
  for (const char* key : {"'M'", "'R'", "'phi'"}) CHECK(all.find(key) != std::string::npos);
}

TEST_CASE("errors are aggregated and line-numbered") {
  const auto r = validate(
      "kind = connectivity_sweep\n"
      "M = 100\n"
      "R = 5, -1\n"         // 3
      "phi = pi/2\n"
      "frobnicate = 1\n"    // 5
      "M = 200\n"           // 6
      "trials = 0\n"        // 7
      "noise_pct = 2\n"     // 8: wrong kind
      "this line is junk\n" // 9
  );
  CHECK_FALSE(r.ok());
  std::vector<std::size_t> lines;
  for (const auto& e : r.errors) lines.push_back(e.line);
  CHECK(lines == std::vector<std::size_t>{3, 5, 6, 7, 8, 9});
  CHECK(r.errors[1].message.find("unknown key 'frobnicate'") != std::string::npos);
  CHECK(r.errors[2].message.find("duplicate") != std::string::npos);
}

TEST_CASE("defaults are filled in and echoed") {
  const auto c = must_validate("kind = connectivity_sweep\nM = 100\nR = 1:20:1\nphi = 2pi\n");
  CHECK(c.trials == 1000);
  CHECK(c.seed == 1);
  CHECK(c.area_side == 100.0);
  CHECK(c.k == std::vector<std::size_t>{1});
  CHECK(c.border_mode == std::vector<netgraph::BorderMode>{netgraph::BorderMode::kTorus});
  CHECK(c.R.size() == 20);
  CHECK(c.R.back() == 20.0);
  const std::string echo = to_text(c);
  CHECK(echo.find("trials = 1000\n") != std::string::npos);
  CHECK(echo.find("phi = 2pi\n") != std::string::npos);
  CHECK(echo.find("border_mode = torus\n") != std::string::npos);

  const auto loc = must_validate("kind = localization_sweep\nM = 100\nR = 40\nphi = 3pi/4\nnoise_pct = 2:10:2\n");
  CHECK(loc.trials == 100);
  CHECK(loc.anchors == std::vector<std::size_t>{5});
  CHECK(loc.methods.size() == 3);
  CHECK(loc.noise_pct == std::vector<double>{2, 4, 6, 8, 10});
  CHECK(loc.border_mode == std::vector<netgraph::BorderMode>{netgraph::BorderMode::kBounded});
}

TEST_CASE("degrees are converted to radians") {
  const auto c = must_validate(
      "kind = connectivity_sweep\nM = 10\nR = 5\nphi_unit = degrees\nphi = 40, 90, 135, 360\n");
  CHECK(c.phi[0] == doctest::Approx(2.0 * kPi / 9.0).epsilon(1e-15));
  CHECK(c.phi[1] == doctest::Approx(kPi / 2.0).epsilon(1e-15));
  CHECK(c.phi[3] == 2.0 * kPi);
  const std::string echo = to_text(c);
  CHECK(echo.find("phi_unit") == std::string::npos);
  CHECK(echo.find("2pi\n") != std::string::npos);
  CHECK(validate("kind = connectivity_sweep\nM = 10\nR = 5\nphi_unit = degrees\nphi = 400\n")
            .errors.size() == 1);
}

TEST_CASE("echo round trip re-validates to the same config") {
  for (const std::string& text :
       {std::string(kSmallConnectivity), std::string(kSmallLocalization),
        std::string("kind = localization_sweep\nM = 50\nR = 30\nphi = 1.234\n"
                    "noise_pct = 0.5\nanchor_positions = 0 0; 100 0; 50 1/3\n"
                    "methods = dv_hop\nrmse = conventional\nallow_reflection = no\n"
                    "output = somewhere/else.csv\n"),
        std::string("kind = channel_table\nwater = coastal, harbor\nchlorophyll = 0:12:3\n"
                    "wavelength_nm = 450, 532\ndistance = 1, 2.5, 10\nincidence = pi/12\n")}) {
    const auto c = must_validate(text);
    const auto again = must_validate(to_text(c));
    CHECK(again == c);
    CHECK(to_text(again) == to_text(c));
    CHECK(config_hash(again) == config_hash(c));
  }
  // The output path does not enter the hash.
  auto a = must_validate(kSmallConnectivity);
  auto b = a;
  b.output = "x.csv";
  CHECK(config_hash(a) == config_hash(b));
  b.seed = 10;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("kind-specific validation") {
  CHECK_FALSE(validate("kind = localization_sweep\nM = 10\nR = 5\nphi = 1\nnoise_pct = 1\n"
                       "anchors = 2\n").ok());
  CHECK_FALSE(validate("kind = localization_sweep\nM = 10\nR = 5\nphi = 1\nnoise_pct = 1\n"
                       "anchors = 10\n").ok());
  CHECK_FALSE(validate("kind = localization_sweep\nM = 10\nR = 5\nphi = 1\nnoise_pct = 1\n"
                       "border_mode = torus, bounded\n").ok());
  CHECK_FALSE(validate("kind = localization_sweep\nM = 10\nR = 5\nphi = 1\nnoise_pct = 1\n"
                       "methods = proposed, gps\n").ok());
  CHECK_FALSE(validate("kind = connectivity_sweep\nM = 10\nR = 5\nphi = 7\n").ok());
  CHECK_FALSE(validate("kind = connectivity_sweep\nM = 2\nR = 5\nphi = 1\nk = 2\n").ok());
  CHECK_FALSE(validate("kind = channel_table\ndistance = 1\n").ok());
  CHECK_FALSE(validate("kind = channel_table\nwater = murky\ndistance = 1\n").ok());
  CHECK_FALSE(validate("kind = channel_table\nchlorophyll = 13\ndistance = 1\n").ok());
  CHECK_FALSE(validate("kind = channel_table\nwater = coastal\ndistance = 1\n"
                       "rx_efficiency = 2\n").ok());
  CHECK_FALSE(validate("kind = channel_table\nwater = coastal\ndistance = 1\nM = 3\n").ok());
  CHECK(validate("kind = channel_table\nwater = coastal\ndistance = 1 # meters\n").ok());
}

TEST_CASE("CSV headers") {
  CHECK(csv_columns(ExperimentKind::kConnectivitySweep) ==
        std::vector<std::string>{"phi", "R", "M", "k", "mode", "p_analytic", "p_mc",
                                 "stderr", "trials", "seed"});
  CHECK(csv_columns(ExperimentKind::kLocalizationSweep) ==
        std::vector<std::string>{"method", "M", "anchors", "phi", "R", "noise_pct", "seed",
                                 "rmse", "unlocalized", "iterations", "residual"});
  CHECK(csv_columns(ExperimentKind::kChannelTable) ==
        std::vector<std::string>{"water", "lambda_nm", "Ce", "absorption", "scattering",
                                 "extinction", "distance", "received_power",
                                 "estimated_range"});
}

TEST_CASE("a single grid point gives one row plus the header") {
  TempDir tmp;
  auto c = must_validate(
      "kind = connectivity_sweep\nM = 50\nR = 15\nphi = pi\ntrials = 1\nseed = 3\n");
  c.output = (tmp.path / "one.csv").string();
  const auto result = run(c, {1, nullptr});
  CHECK(result.rows == 1);
  CHECK(result.computed == 1);
  const std::string text = slurp(c.output);
  const auto lines = data_lines(text);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "phi,R,M,k,mode,p_analytic,p_mc,stderr,trials,seed");
  CHECK(lines[1].rfind("3.141592653589793,15,50,1,torus,", 0) == 0);
  CHECK(text.rfind("# uowsn 1.0.0\n# kind connectivity_sweep\n# config_hash ", 0) == 0);
}

TEST_CASE("grid size and row order") {
  TempDir tmp;
  auto c = must_validate(kSmallConnectivity);
  c.output = (tmp.path / "grid.csv").string();
  run(c, {2, nullptr});
  const auto lines = data_lines(slurp(c.output));
  CHECK(lines.size() == 1 + 2 * 2 * 2 * 3 * 2);
  // k = 3 has no closed form.
  int nan_rows = 0;
  for (const auto& l : lines) nan_rows += l.find(",3,torus,nan,") != std::string::npos ||
                                          l.find(",3,bounded,nan,") != std::string::npos;
  CHECK(nan_rows == 2 * 2 * 2 * 2);
  CHECK(lines[1].rfind("1.5707963267948966,10,30,1,torus,", 0) == 0);
  CHECK(lines[2].rfind("1.5707963267948966,10,30,1,bounded,", 0) == 0);
}

TEST_CASE("output bytes do not depend on the thread count") {
  TempDir tmp;
  int n = 0;
  for (const char* text : {kSmallConnectivity, kSmallLocalization}) {
    auto c = must_validate(text);
    const fs::path one = tmp.path / ("one" + std::to_string(n) + ".csv");
    const fs::path many = tmp.path / ("many" + std::to_string(n++) + ".csv");
    c.output = one.string();
    run(c, {1, nullptr});
    c.output = many.string();
    run(c, {4, nullptr});
    CHECK(slurp(one) == slurp(many));
    // And a second identical run changes nothing.
    fs::remove(many);
    run(c, {3, nullptr});
    CHECK(slurp(one) == slurp(many));
  }
}

TEST_CASE("localization rows") {
  TempDir tmp;
  auto c = must_validate(kSmallLocalization);
  c.output = (tmp.path / "loc.csv").string();
  run(c, {0, nullptr});
  const auto lines = data_lines(slurp(c.output));
  REQUIRE(lines.size() == 1 + 3 * 2 * 2 * 3);
  CHECK(lines[1].rfind("proposed,30,4,2.356194490192345,40,2,0,", 0) == 0);
  CHECK(lines.back().rfind("dv_hop,30,6,2.356194490192345,40,6,2,", 0) == 0);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::vector<std::string> f;
    std::stringstream in(lines[i]);
    std::string field;
    while (std::getline(in, field, ',')) f.push_back(field);
    REQUIRE(f.size() == 11);
    const double rmse = std::stod(f[7]);
    CHECK(std::isfinite(rmse));
    CHECK(rmse >= 0.0);
    if (f[0] != "proposed") {
      CHECK(f[9] == "0");
      CHECK(f[10] == "0");
    }
  }
}

TEST_CASE("fixed anchor positions") {
  TempDir tmp;
  auto c = must_validate(
      "kind = localization_sweep\nM = 40\nR = 50\nphi = pi\nnoise_pct = 1\n"
      "anchor_positions = 0 0; 100 0; 0 100; 100 100\nmethods = mds_map\ntrials = 2\n");
  CHECK(c.anchors == std::vector<std::size_t>{4});
  c.output = (tmp.path / "fixed.csv").string();
  run(c, {1, nullptr});
  const auto lines = data_lines(slurp(c.output));
  REQUIRE(lines.size() == 3);
  CHECK(lines[1].rfind("mds_map,40,4,3.141592653589793,50,1,0,", 0) == 0);
}

TEST_CASE("channel table") {
  TempDir tmp;
  auto c = must_validate(
      "kind = channel_table\nwater = pure_sea, harbor\nchlorophyll = 0, 1\n"
      "distance = 1, 10\n");
  c.output = (tmp.path / "chan.csv").string();
  run(c, {1, nullptr});
  const std::string text = slurp(c.output);
  CHECK(text.find("# seed") == std::string::npos);
  const auto lines = data_lines(text);
  REQUIRE(lines.size() == 1 + 2 * 2 + 2 * 2);
  CHECK(lines[1].rfind("pure_sea,,,", 0) == 0);
  CHECK(lines[5].rfind("chlorophyll,532,0,", 0) == 0);
  // Estimated range echoes the distance.
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::vector<std::string> f;
    std::stringstream in(lines[i]);
    std::string field;
    while (std::getline(in, field, ',')) f.push_back(field);
    REQUIRE(f.size() == 9);
    CHECK(std::stod(f[8]) == doctest::Approx(std::stod(f[6])).epsilon(1e-9));
  }
}

TEST_CASE("received power that underflows leaves the range as nan") {
  TempDir tmp;
  auto c = must_validate("kind = channel_table\nchlorophyll = 12\nwavelength_nm = 520\n"
                         "distance = 10, 100\n");
  c.output = (tmp.path / "deep.csv").string();
  run(c, {1, nullptr});
  const auto lines = data_lines(slurp(c.output));
  REQUIRE(lines.size() == 3);
  CHECK(lines[1].substr(lines[1].rfind(',') + 1) == "10");
  CHECK(lines[2].ends_with(",0,nan"));
}

TEST_CASE("resuming after losing the last row reproduces the file") {
  TempDir tmp;
  auto c = must_validate(kSmallConnectivity);
  c.output = (tmp.path / "resume.csv").string();
  run(c, {2, nullptr});
  const std::string full = slurp(c.output);

  // Drop the last row.
  std::string cut = full.substr(0, full.size() - 1);
  cut = cut.substr(0, cut.rfind('\n') + 1);
  spit(c.output, cut);
  auto r = run(c, {2, nullptr});
  CHECK(r.computed == 1);
  CHECK(r.reused == r.rows - 1);
  CHECK(slurp(c.output) == full);

  // A torn final line is discarded and recomputed.
  spit(c.output, full.substr(0, full.size() - 7));
  r = run(c, {1, nullptr});
  CHECK(r.computed == 1);
  CHECK(slurp(c.output) == full);

  // A hole in the middle is filled in canonical order.
  auto lines = data_lines(full);
  std::string holed = full;
  const auto pos = holed.find(lines[5] + "\n");
  holed.erase(pos, lines[5].size() + 1);
  spit(c.output, holed);
  r = run(c, {1, nullptr});
  CHECK(r.computed == 1);
  CHECK(slurp(c.output) == full);

  // Nothing left to do.
  r = run(c, {1, nullptr});
  CHECK(r.computed == 0);
  CHECK(slurp(c.output) == full);
}

TEST_CASE("a file from another config is not touched") {
  TempDir tmp;
  auto c = must_validate(kSmallConnectivity);
  c.output = (tmp.path / "other.csv").string();
  run(c, {1, nullptr});
  const std::string before = slurp(c.output);
  c.seed = 10;
  CHECK_THROWS_AS(run(c, {1, nullptr}), RunError);
  CHECK(slurp(c.output) == before);
}

TEST_CASE("an unwritable output fails before any compute") {
  TempDir tmp;
  spit(tmp.path / "blocker", "not a directory");
  auto c = must_validate(
      "kind = connectivity_sweep\nM = 500\nR = 1:20:1\nphi = pi\ntrials = 100000\n");
  c.output = (tmp.path / "blocker" / "out.csv").string();
  const auto start = std::chrono::steady_clock::now();
  CHECK_THROWS_AS(run(c, {1, nullptr}), RunError);
  CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(2));
  c.output.clear();
  CHECK_THROWS_AS(run(c, {1, nullptr}), RunError);
}

TEST_CASE("default output location") {
  auto c = must_validate(kSmallConnectivity);
  ::unsetenv(kOutputDirEnv);
  CHECK(resolve_output(c, "fig") == fs::path("results") / "fig.csv");
  ::setenv(kOutputDirEnv, "/tmp/somewhere", 1);
  CHECK(resolve_output(c, "fig") == fs::path("/tmp/somewhere") / "fig.csv");
  c.output = "mine.csv";
  CHECK(resolve_output(c, "fig") == fs::path("mine.csv"));
  ::unsetenv(kOutputDirEnv);
}

TEST_CASE("command-line exit codes") {
  TempDir tmp;
  const fs::path good = tmp.path / "good.cfg";
  const fs::path bad = tmp.path / "bad.cfg";
  spit(good, "kind = connectivity_sweep\nM = 20\nR = 10\nphi = pi\ntrials = 5\n");
  spit(bad, "kind = connectivity_sweep\nM = 20\n");
  const std::string out = (tmp.path / "cli.csv").string();
  CHECK(run_cli("validate " + good.string()) == 0);
  CHECK(run_cli("validate " + bad.string()) == 1);
  CHECK(run_cli("validate " + (tmp.path / "missing.cfg").string()) == 1);
  CHECK(run_cli("run " + bad.string()) == 1);
  CHECK(run_cli("run " + good.string() + " -o " + out + " -j 2") == 0);
  CHECK(fs::exists(out));
  CHECK(run_cli("run " + good.string() + " -o " + out + " --seed 4") == 2);
  CHECK(run_cli("bogus") == 1);
  spit(tmp.path / "wall", "");
  CHECK(run_cli("run " + good.string() + " -o " + (tmp.path / "wall" / "x.csv").string()) == 2);
}

TEST_CASE("figures delegates to the plotter") {
  TempDir tmp;
  const fs::path log = tmp.path / "calls.txt";
  const fs::path script = tmp.path / "plotter.sh";
  spit(script, "#!/bin/sh\necho \"$@\" >> '" + log.string() + "'\n");
  fs::permissions(script, fs::perms::owner_all);
  fs::create_directories(tmp.path / "csv dir");

  ::unsetenv("UOWSN_PLOTTER");
  CHECK(run_cli("figures '" + (tmp.path / "csv dir").string() + "'") == 2);
  ::setenv("UOWSN_PLOTTER", script.c_str(), 1);
  CHECK(run_cli("figures '" + (tmp.path / "csv dir").string() +
                "' --figure fig7 --figure channel --out '" + (tmp.path / "img").string() +
                "'") == 0);
  const std::string calls = slurp(log);
  CHECK(calls == "render --figure fig7 --csv " + (tmp.path / "csv dir").string() + " --out " +
                     (tmp.path / "img").string() + "\n" + "render --figure channel --csv " +
                     (tmp.path / "csv dir").string() + " --out " +
                     (tmp.path / "img").string() + "\n");
  CHECK(run_cli("figures '" + (tmp.path / "csv dir").string() + "' --figure fig99") == 1);
  CHECK(run_cli("figures " + (tmp.path / "nowhere").string()) == 1);
  ::setenv("UOWSN_PLOTTER", "false", 1);
  CHECK(run_cli("figures '" + (tmp.path / "csv dir").string() + "' --figure fig8") == 2);
  ::unsetenv("UOWSN_PLOTTER");
}

#include "uowsn/channel.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "uowsn/lambert_w.hpp"

namespace uowsn::channel {

// Generated from data/water_haltrin.txt at configure time.
extern const char* const kDefaultWaterConfigText;

namespace {

// Fulvic and humic acid specific absorption, m^2/mg.
constexpr double kFulvicAbsorption = 35.959;
constexpr double kHumicAbsorption = 18.828;

constexpr double kMinWavelength = 400.0;
constexpr double kMaxWavelength = 700.0;
constexpr double kMaxChlorophyll = 12.0;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail_at(int line, const std::string& what) {
  throw std::runtime_error("line " + std::to_string(line) + ": " + what);
}

double parse_number(std::string_view token, int line) {
  token = trim(token);
  double value = 0.0;
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc() || ptr != end || token.empty()) {
    fail_at(line, "expected a number, got '" + std::string(token) + "'");
  }
  return value;
}

std::vector<double> parse_row(std::string_view row, int line) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = row.find(',', start);
    out.push_back(parse_number(row.substr(start, comma - start), line));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double interpolate(const std::vector<double>& xs, const std::vector<double>& ys,
                   double x) {
  if (xs.empty()) throw std::runtime_error("water table is empty");
  if (x < xs.front() || x > xs.back()) {
    throw std::domain_error("wavelength_nm outside the water table range");
  }
  auto hi = std::lower_bound(xs.begin(), xs.end(), x);
  const auto i = static_cast<std::size_t>(hi - xs.begin());
  if (xs[i] == x) return ys[i];
  const double t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
  return ys[i - 1] + t * (ys[i] - ys[i - 1]);
}

void check_water_inputs(double wavelength_nm, double Ce) {
  if (!(wavelength_nm >= kMinWavelength && wavelength_nm <= kMaxWavelength)) {
    throw std::domain_error("wavelength_nm must lie in [400, 700] nm");
  }
  if (!(Ce >= 0.0 && Ce <= kMaxChlorophyll)) {
    throw std::domain_error("chlorophyll_Ce must lie in [0, 12] mg/m^3");
  }
}

}  // namespace

double WaterTable::pure_water_absorption(double lambda) const {
  return interpolate(lambda_nm, b_w, lambda);
}

double WaterTable::chlorophyll_specific_absorption(double lambda) const {
  return interpolate(lambda_nm, b_cl, lambda);
}

WaterConfig parse_water_config(std::string_view text) {
  WaterConfig config;
  bool header_seen = false;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos
                                                ? std::string_view::npos
                                                : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    if (const auto hash = raw.find('#'); hash != std::string_view::npos) {
      raw = raw.substr(0, hash);
    }
    const std::string_view line = trim(raw);
    if (line.empty()) continue;

    if (header_seen) {
      const auto row = parse_row(line, line_no);
      if (row.size() != 3) fail_at(line_no, "expected 3 columns");
      if (!config.table.lambda_nm.empty() &&
          row[0] <= config.table.lambda_nm.back()) {
        fail_at(line_no, "lambda_nm must be strictly increasing");
      }
      if (row[1] < 0.0 || row[2] < 0.0) {
        fail_at(line_no, "absorption values must be non-negative");
      }
      config.table.lambda_nm.push_back(row[0]);
      config.table.b_w.push_back(row[1]);
      config.table.b_cl.push_back(row[2]);
      continue;
    }

    if (line.starts_with("lambda_nm")) {
      std::string compact;
      for (char c : line)
        if (c != ' ' && c != '\t') compact.push_back(c);
      if (compact != "lambda_nm,b_w,b_cl") {
        fail_at(line_no, "header must be 'lambda_nm, b_w, b_cl'");
      }
      header_seen = true;
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail_at(line_no, "expected key = value");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = line.substr(eq + 1);

    if (key.starts_with("preset")) {
      const std::string_view name = trim(key.substr(6));
      if (name.empty()) fail_at(line_no, "preset needs a name");
      const auto row = parse_row(value, line_no);
      if (row.size() != 2 || row[0] < 0.0 || row[1] < 0.0) {
        fail_at(line_no, "preset expects 'absorption, scattering' >= 0");
      }
      config.presets[std::string(name)] = WaterPreset{row[0], row[1]};
    } else if (key == "kappa_f") {
      config.constants.kappa_f = parse_number(value, line_no);
    } else if (key == "kappa_h") {
      config.constants.kappa_h = parse_number(value, line_no);
    } else if (key == "chlorophyll_exponent") {
      config.constants.chlorophyll_exponent = parse_number(value, line_no);
    } else if (key == "reference_Ce0") {
      config.constants.reference_Ce0 = parse_number(value, line_no);
      if (config.constants.reference_Ce0 <= 0.0) {
        fail_at(line_no, "reference_Ce0 must be positive");
      }
    } else {
      fail_at(line_no, "unknown key '" + std::string(key) + "'");
    }
  }
  if (!header_seen) fail_at(line_no, "missing 'lambda_nm, b_w, b_cl' header");
  if (config.table.lambda_nm.size() < 2) {
    fail_at(line_no, "water table needs at least two rows");
  }
  return config;
}

WaterConfig load_water_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_water_config(buffer.str());
}

const WaterConfig& default_water_config() {
  static const WaterConfig config = parse_water_config(kDefaultWaterConfigText);
  return config;
}

double fulvic_concentration(double Ce, double Ce0) {
  return 1.74098 * Ce * std::exp(0.12327 * Ce / Ce0);
}

double humic_concentration(double Ce, double Ce0) {
  return 0.19334 * Ce * std::exp(0.12343 * Ce / Ce0);
}

double small_particle_concentration(double Ce, double Ce0) {
  return 0.01739 * Ce * std::exp(0.11631 * Ce / Ce0);
}

double large_particle_concentration(double Ce, double Ce0) {
  return 0.76284 * Ce * std::exp(0.03092 * Ce / Ce0);
}

double absorption_coefficient(double wavelength_nm, double Ce,
                              const WaterConfig& config) {
  check_water_inputs(wavelength_nm, Ce);
  const auto& k = config.constants;
  const double b_w = config.table.pure_water_absorption(wavelength_nm);
  const double b_cl =
      config.table.chlorophyll_specific_absorption(wavelength_nm) *
      std::pow(Ce / k.reference_Ce0, k.chlorophyll_exponent);
  const double Cf = fulvic_concentration(Ce, k.reference_Ce0);
  const double Ch = humic_concentration(Ce, k.reference_Ce0);
  return b_w + b_cl + kFulvicAbsorption * Cf * std::exp(-k.kappa_f * wavelength_nm) +
         kHumicAbsorption * Ch * std::exp(-k.kappa_h * wavelength_nm);
}

double scattering_coefficient(double wavelength_nm, double Ce, double Ce0) {
  check_water_inputs(wavelength_nm, Ce);
  const double ratio = 400.0 / wavelength_nm;
  const double s_w = 0.005826 * std::pow(ratio, 4.322);
  const double s_small = 1.151302 * std::pow(ratio, 1.7);
  const double s_large = 0.341074 * std::pow(ratio, 0.3);
  return s_w + s_small * small_particle_concentration(Ce, Ce0) +
         s_large * large_particle_concentration(Ce, Ce0);
}

WaterModel WaterModel::from_chlorophyll(double wavelength_nm,
                                        double chlorophyll_Ce,
                                        const WaterConfig& config) {
  const double b = absorption_coefficient(wavelength_nm, chlorophyll_Ce, config);
  const double s = scattering_coefficient(wavelength_nm, chlorophyll_Ce,
                                          config.constants.reference_Ce0);
  return WaterModel(wavelength_nm, chlorophyll_Ce, b, s);
}

WaterModel WaterModel::from_chlorophyll(double wavelength_nm,
                                        double chlorophyll_Ce) {
  return from_chlorophyll(wavelength_nm, chlorophyll_Ce,
                          default_water_config());
}

WaterModel WaterModel::from_coefficients(double absorption, double scattering) {
  if (!(absorption >= 0.0) || !(scattering >= 0.0)) {
    throw std::domain_error("absorption and scattering must be >= 0");
  }
  return WaterModel(std::nan(""), std::nan(""), absorption, scattering);
}

WaterModel WaterModel::preset(std::string_view name, const WaterConfig& config) {
  const auto it = config.presets.find(std::string(name));
  if (it == config.presets.end()) {
    throw std::invalid_argument("unknown water preset '" + std::string(name) +
                                "'");
  }
  return from_coefficients(it->second.absorption, it->second.scattering);
}

WaterModel WaterModel::preset(std::string_view name) {
  return preset(name, default_water_config());
}

void OpticalLink::validate() const {
  if (!(tx_power > 0.0)) throw std::domain_error("tx_power must be > 0");
  if (!(tx_efficiency > 0.0 && tx_efficiency <= 1.0)) {
    throw std::domain_error("tx_efficiency must lie in (0, 1]");
  }
  if (!(rx_efficiency > 0.0 && rx_efficiency <= 1.0)) {
    throw std::domain_error("rx_efficiency must lie in (0, 1]");
  }
  if (!(rx_aperture > 0.0)) throw std::domain_error("rx_aperture must be > 0");
  if (!(divergence > 0.0 && divergence <= std::numbers::pi)) {
    throw std::domain_error("divergence must lie in (0, pi]");
  }
  if (!(incidence >= 0.0 && incidence < std::numbers::pi / 2)) {
    throw std::domain_error("incidence must lie in [0, pi/2)");
  }
}

namespace {

// P_t * d_t * d_r * B_r / (2 pi (1 - cos theta0)): everything in the budget
// that depends on neither distance nor incidence.
double link_constant(const OpticalLink& link) {
  return link.tx_power * link.tx_efficiency * link.rx_efficiency *
         link.rx_aperture /
         (2.0 * std::numbers::pi * (1.0 - std::cos(link.divergence)));
}

}  // namespace

double received_power(const OpticalLink& link, const WaterModel& water) {
  link.validate();
  if (!(link.distance > 0.0)) throw std::domain_error("distance must be > 0");
  const double c = std::cos(link.incidence);
  const double d = link.distance;
  return link_constant(link) * std::exp(-water.extinction() * d / c) * c /
         (d * d);
}

double estimate_range(double measured_power, const OpticalLink& link,
                      const WaterModel& water) {
  link.validate();
  if (!(measured_power > 0.0)) {
    throw std::domain_error("measured_power must be > 0");
  }
  const double c = std::cos(link.incidence);
  const double e = water.extinction();
  const double root = std::sqrt(link_constant(link) * c / measured_power);
  if (e == 0.0) return root;  // geometric spreading only
  // With the extinction path length d / cos(theta) the exact inverse carries
  // e / (2 cos theta) inside W; at normal incidence this is e / 2.
  const double arg = e / (2.0 * c) * root;
  assert(arg >= 0.0);
  return 2.0 * c / e * lambert_w0(arg);
}

double estimate_range(double measured_power, const OpticalLink& link,
                      const WaterModel& water, double noise_sigma, Rng& rng) {
  const double d = estimate_range(measured_power, link, water);
  if (noise_sigma < 0.0) throw std::domain_error("noise_sigma must be >= 0");
  if (noise_sigma == 0.0) return d;
  std::normal_distribution<double> noise(0.0, noise_sigma);
  return d + noise(rng);
}

}  // namespace uowsn::channel

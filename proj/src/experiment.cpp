#include "uowsn/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

namespace uowsn::simcli {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kMaxListLength = 100000;

using localization::Method;
using localization::RmseFormula;
using netgraph::BorderMode;

constexpr unsigned kConn = 1u << 0;
constexpr unsigned kLoc = 1u << 1;
constexpr unsigned kChan = 1u << 2;

unsigned kind_bit(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::kConnectivitySweep: return kConn;
    case ExperimentKind::kLocalizationSweep: return kLoc;
    case ExperimentKind::kChannelTable: return kChan;
  }
  return 0;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::optional<double> parse_plain(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

std::optional<std::uint64_t> parse_unsigned(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<bool> parse_bool(std::string_view s) {
  s = trim(s);
  if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
  if (s == "false" || s == "no" || s == "off" || s == "0") return false;
  return std::nullopt;
}

std::string to_string_u(std::uint64_t v) { return std::to_string(v); }

template <class T, class Fmt>
std::string join(const std::vector<T>& items, Fmt&& fmt,
                 std::string_view sep = ", ") {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += fmt(items[i]);
  }
  return out;
}

std::string_view border_name(BorderMode m) {
  return m == BorderMode::kTorus ? "torus" : "bounded";
}

// Parse state for one file.
class Parser {
 public:
  struct Entry {
    std::size_t line;
    std::string value;
  };

  std::vector<ConfigError> errors;

  void error(std::size_t line, std::string msg) {
    errors.push_back({line, std::move(msg)});
  }

  // A list of reals; items may be ranges a:b:step.
  std::optional<std::vector<double>> reals(const Entry& e, std::string_view key,
                                           double unit = 1.0) {
    std::vector<double> out;
    for (auto item : split(e.value, ',')) {
      if (item.empty()) {
        error(e.line, "'" + std::string(key) + "': empty list item");
        return std::nullopt;
      }
      if (item.find(':') != std::string_view::npos) {
        const auto parts = split(item, ':');
        std::optional<double> a, b, step;
        if (parts.size() == 3) {
          a = parse_real(parts[0]);
          b = parse_real(parts[1]);
          step = parse_real(parts[2]);
        }
        if (!a || !b || !step) {
          error(e.line, "'" + std::string(key) + "': bad range '" +
                            std::string(item) + "', expected start:stop:step");
          return std::nullopt;
        }
        if (!(*step > 0.0) || *b < *a) {
          error(e.line, "'" + std::string(key) + "': range '" + std::string(item) +
                            "' needs step > 0 and stop >= start");
          return std::nullopt;
        }
        const double span = (*b - *a) / *step;
        if (span > static_cast<double>(kMaxListLength)) {
          error(e.line, "'" + std::string(key) + "': range too long");
          return std::nullopt;
        }
        const auto n = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
        for (std::size_t i = 0; i < n; ++i) {
          out.push_back((*a + static_cast<double>(i) * *step) * unit);
        }
      } else {
        const auto v = parse_real(item);
        if (!v) {
          error(e.line, "'" + std::string(key) + "': not a number: '" +
                            std::string(item) + "'");
          return std::nullopt;
        }
        out.push_back(*v * unit);
      }
    }
    return out;
  }

  std::optional<std::vector<std::size_t>> counts(const Entry& e,
                                                 std::string_view key) {
    std::vector<std::size_t> out;
    for (auto item : split(e.value, ',')) {
      if (item.find(':') != std::string_view::npos) {
        const auto parts = split(item, ':');
        std::optional<std::uint64_t> a, b, step;
        if (parts.size() == 3) {
          a = parse_unsigned(parts[0]);
          b = parse_unsigned(parts[1]);
          step = parse_unsigned(parts[2]);
        }
        if (!a || !b || !step || *step == 0 || *b < *a ||
            (*b - *a) / *step >= kMaxListLength) {
          error(e.line, "'" + std::string(key) + "': bad integer range '" +
                            std::string(item) + "'");
          return std::nullopt;
        }
        for (std::uint64_t v = *a; v <= *b; v += *step) out.push_back(v);
      } else {
        const auto v = parse_unsigned(item);
        if (!v) {
          error(e.line, "'" + std::string(key) + "': not a non-negative integer: '" +
                            std::string(item) + "'");
          return std::nullopt;
        }
        out.push_back(*v);
      }
    }
    return out;
  }

  std::optional<double> real(const Entry& e, std::string_view key) {
    const auto v = parse_real(e.value);
    if (!v) {
      error(e.line, "'" + std::string(key) + "': not a number: '" + e.value + "'");
    }
    return v;
  }
};

struct KeySpec {
  unsigned kinds;
  bool required;
};

const std::map<std::string, KeySpec, std::less<>>& key_table() {
  static const std::map<std::string, KeySpec, std::less<>> table = {
      {"kind", {kConn | kLoc | kChan, true}},
      {"output", {kConn | kLoc | kChan, false}},
      {"area_side", {kConn | kLoc, false}},
      {"trials", {kConn | kLoc, false}},
      {"seed", {kConn | kLoc, false}},
      {"M", {kConn | kLoc, true}},
      {"R", {kConn | kLoc, true}},
      {"phi", {kConn | kLoc, true}},
      {"phi_unit", {kConn | kLoc, false}},
      {"border_mode", {kConn | kLoc, false}},
      {"k", {kConn, false}},
      {"noise_pct", {kLoc, true}},
      {"anchors", {kLoc, false}},
      {"anchor_positions", {kLoc, false}},
      {"methods", {kLoc, false}},
      {"rmse", {kLoc, false}},
      {"max_iters", {kLoc, false}},
      {"tol", {kLoc, false}},
      {"allow_reflection", {kLoc, false}},
      {"water", {kChan, false}},
      {"wavelength_nm", {kChan, false}},
      {"chlorophyll", {kChan, false}},
      {"distance", {kChan, true}},
      {"tx_power", {kChan, false}},
      {"tx_efficiency", {kChan, false}},
      {"rx_efficiency", {kChan, false}},
      {"rx_aperture", {kChan, false}},
      {"divergence", {kChan, false}},
      {"incidence", {kChan, false}},
      {"water_config", {kChan, false}},
  };
  return table;
}

std::optional<ExperimentKind> parse_kind(std::string_view s) {
  for (auto k : {ExperimentKind::kConnectivitySweep,
                 ExperimentKind::kLocalizationSweep, ExperimentKind::kChannelTable}) {
    if (kind_name(k) == s) return k;
  }
  return std::nullopt;
}

}  // namespace

std::string_view kind_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kConnectivitySweep: return "connectivity_sweep";
    case ExperimentKind::kLocalizationSweep: return "localization_sweep";
    case ExperimentKind::kChannelTable: return "channel_table";
  }
  return "unknown";
}

std::optional<double> parse_real(std::string_view text) {
  std::string_view s = trim(text);
  if (s.empty()) return std::nullopt;
  const auto pi_at = s.find("pi");
  if (pi_at == std::string_view::npos) {
    const auto slash = s.find('/');
    if (slash == std::string_view::npos) return parse_plain(s);
    const auto num = parse_plain(s.substr(0, slash));
    const auto den = parse_plain(s.substr(slash + 1));
    if (!num || !den || *den == 0.0) return std::nullopt;
    return *num / *den;
  }

  std::string_view coef_text = trim(s.substr(0, pi_at));
  if (!coef_text.empty() && coef_text.back() == '*') {
    coef_text = trim(coef_text.substr(0, coef_text.size() - 1));
    if (coef_text.empty()) return std::nullopt;
  }
  double coef = 1.0;
  if (coef_text == "-") {
    coef = -1.0;
  } else if (!coef_text.empty() && coef_text != "+") {
    const auto c = parse_plain(coef_text);
    if (!c) return std::nullopt;
    coef = *c;
  }
  std::string_view rest = trim(s.substr(pi_at + 2));
  double den = 1.0;
  if (!rest.empty()) {
    if (rest.front() != '/') return std::nullopt;
    const auto d = parse_plain(rest.substr(1));
    if (!d || *d == 0.0) return std::nullopt;
    den = *d;
  }
  return coef * kPi / den;
}

std::string format_real(double value) {
  if (value != 0.0 && std::isfinite(value)) {
    for (int den = 1; den <= 12; ++den) {
      const double num = std::round(value * den / kPi);
      if (num == 0.0 || std::abs(num) > 48.0) continue;
      if (num * kPi / den != value) continue;
      std::string out;
      if (num == -1.0) {
        out = "-";
      } else if (num != 1.0) {
        out = std::to_string(static_cast<long>(num));
      }
      out += "pi";
      if (den != 1) out += "/" + std::to_string(den);
      return out;
    }
  }
  return format_decimal(value);
}

std::string format_decimal(double value) {
  if (std::isnan(value)) return "nan";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

ValidationResult validate(std::string_view text) {
  Parser p;
  std::map<std::string, Parser::Entry, std::less<>> entries;

  std::size_t line_no = 0;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = trim(line.substr(0, hash));
    }
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      p.error(line_no, "expected 'key = value'");
      continue;
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (!key_table().contains(key)) {
      p.error(line_no, "unknown key '" + key + "'");
      continue;
    }
    if (value.empty()) {
      p.error(line_no, "'" + key + "' has no value");
      continue;
    }
    if (const auto it = entries.find(key); it != entries.end()) {
      p.error(line_no, "duplicate key '" + key + "' (first set on line " +
                           std::to_string(it->second.line) + ")");
      continue;
    }
    entries.emplace(key, Parser::Entry{line_no, value});
  }

  ValidationResult result;
  const auto kind_it = entries.find("kind");
  if (kind_it == entries.end()) {
    p.error(0,
            "missing required key 'kind' (connectivity_sweep, localization_sweep "
            "or channel_table)");
    result.errors = std::move(p.errors);
    return result;
  }
  const auto kind = parse_kind(kind_it->second.value);
  if (!kind) {
    p.error(kind_it->second.line, "unknown kind '" + kind_it->second.value + "'");
    result.errors = std::move(p.errors);
    return result;
  }

  ExperimentConfig c;
  c.kind = *kind;
  const unsigned bit = kind_bit(c.kind);
  for (const auto& [key, spec] : key_table()) {
    const bool present = entries.contains(key);
    if (present && !(spec.kinds & bit)) {
      p.error(entries.at(key).line, "'" + key + "' does not apply to " +
                                        std::string(kind_name(c.kind)));
    } else if (!present && spec.required && (spec.kinds & bit)) {
      p.error(0, "missing required key '" + key + "'");
    }
  }
  auto get = [&](std::string_view key) -> const Parser::Entry* {
    const auto it = entries.find(key);
    if (it == entries.end() || !(key_table().find(key)->second.kinds & bit)) {
      return nullptr;
    }
    return &it->second;
  };
  auto check = [&](const Parser::Entry* e, bool ok, const std::string& msg) {
    if (!ok) p.error(e ? e->line : 0, msg);
  };

  if (const auto* e = get("output")) c.output = e->value;

  if (c.kind != ExperimentKind::kChannelTable) {
    const bool loc = c.kind == ExperimentKind::kLocalizationSweep;
    c.trials = loc ? 100 : 1000;
    c.border_mode = {loc ? BorderMode::kBounded : BorderMode::kTorus};

    if (const auto* e = get("area_side")) {
      if (auto v = p.real(*e, "area_side")) {
        c.area_side = *v;
        check(e, *v > 0.0, "'area_side' must be > 0");
      }
    }
    if (const auto* e = get("trials")) {
      if (auto v = parse_unsigned(e->value); v && *v >= 1) {
        c.trials = *v;
      } else {
        p.error(e->line, "'trials' must be an integer >= 1");
      }
    }
    if (const auto* e = get("seed")) {
      if (auto v = parse_unsigned(e->value)) {
        c.seed = *v;
      } else {
        p.error(e->line, "'seed' must be a 64-bit unsigned integer");
      }
    }
    if (const auto* e = get("M")) {
      if (auto v = p.counts(*e, "M")) {
        c.M = *v;
        const std::size_t floor = loc ? 4 : 2;
        check(e, std::all_of(c.M.begin(), c.M.end(),
                             [&](std::size_t m) { return m >= floor; }),
              "'M' values must be >= " + std::to_string(floor));
      }
    }
    if (const auto* e = get("R")) {
      if (auto v = p.reals(*e, "R")) {
        c.R = *v;
        check(e, std::all_of(c.R.begin(), c.R.end(), [](double r) { return r > 0.0; }),
              "'R' values must be > 0 (meters)");
      }
    }
    double phi_unit = 1.0;
    if (const auto* e = get("phi_unit")) {
      if (e->value == "degrees") {
        phi_unit = kPi / 180.0;
      } else if (e->value != "radians") {
        p.error(e->line, "'phi_unit' must be radians or degrees");
      }
    }
    if (const auto* e = get("phi")) {
      if (auto v = p.reals(*e, "phi", phi_unit)) {
        c.phi = *v;
        // Degree input is converted with a rounding step; snap 360 to 2pi.
        for (double& x : c.phi) {
          if (std::abs(x - 2.0 * kPi) < 1e-12) x = 2.0 * kPi;
        }
        check(e, std::all_of(c.phi.begin(), c.phi.end(),
                             [](double x) { return x > 0.0 && x <= 2.0 * kPi; }),
              "'phi' values must lie in (0, 2pi]");
      }
    }
    if (const auto* e = get("border_mode")) {
      c.border_mode.clear();
      if (loc && e->value.find(',') != std::string::npos) {
        p.error(e->line, "localization_sweep takes a single 'border_mode'");
      }
      for (auto item : split(e->value, ',')) {
        if (item == "torus") {
          c.border_mode.push_back(BorderMode::kTorus);
        } else if (item == "bounded") {
          c.border_mode.push_back(BorderMode::kBounded);
        } else {
          p.error(e->line, "'border_mode': expected torus or bounded, got '" +
                               std::string(item) + "'");
        }
      }
    }
  }

  if (c.kind == ExperimentKind::kConnectivitySweep) {
    c.k = {1};
    if (const auto* e = get("k")) {
      if (auto v = p.counts(*e, "k")) {
        c.k = *v;
        check(e, std::all_of(c.k.begin(), c.k.end(), [](std::size_t k) { return k >= 1; }),
              "'k' values must be >= 1");
        const bool needs_three = std::any_of(c.k.begin(), c.k.end(),
                                             [](std::size_t k) { return k == 2; });
        check(e, !needs_three || std::all_of(c.M.begin(), c.M.end(),
                                             [](std::size_t m) { return m >= 3; }),
              "k = 2 needs every 'M' >= 3");
      }
    }
  }

  if (c.kind == ExperimentKind::kLocalizationSweep) {
    c.methods = {Method::kProposed, Method::kMdsMap, Method::kDvHop};
    if (const auto* e = get("noise_pct")) {
      if (auto v = p.reals(*e, "noise_pct")) {
        c.noise_pct = *v;
        check(e, std::all_of(c.noise_pct.begin(), c.noise_pct.end(),
                             [](double x) { return x >= 0.0; }),
              "'noise_pct' values must be >= 0 (percent of distance)");
      }
    }
    const auto* anchors = get("anchors");
    const auto* positions = get("anchor_positions");
    if (anchors && positions) {
      p.error(positions->line, "give either 'anchors' or 'anchor_positions', not both");
    }
    if (positions) {
      for (auto item : split(positions->value, ';')) {
        std::istringstream in{std::string(item)};
        std::string xs, ys, extra;
        in >> xs >> ys;
        const auto x = parse_real(xs);
        const auto y = parse_real(ys);
        if (!x || !y || (in >> extra)) {
          p.error(positions->line,
                  "'anchor_positions': expected 'x y; x y; ...', got '" +
                      std::string(item) + "'");
          break;
        }
        c.anchor_positions.push_back({*x, *y});
      }
      c.anchors = {c.anchor_positions.size()};
      for (const auto& a : c.anchor_positions) {
        if (a[0] < 0.0 || a[1] < 0.0 || a[0] > c.area_side || a[1] > c.area_side) {
          p.error(positions->line, "'anchor_positions' must lie inside the area");
          break;
        }
      }
    } else if (anchors) {
      if (auto v = p.counts(*anchors, "anchors")) c.anchors = *v;
    } else {
      c.anchors = {5};
    }
    const auto* anchor_line = positions ? positions : anchors;
    check(anchor_line, std::all_of(c.anchors.begin(), c.anchors.end(),
                                   [](std::size_t a) { return a >= 3; }),
          "at least 3 anchors are needed for 2-D localization");
    check(anchor_line,
          std::all_of(c.anchors.begin(), c.anchors.end(),
                      [&](std::size_t a) {
                        return std::all_of(c.M.begin(), c.M.end(),
                                           [&](std::size_t m) { return a < m; });
                      }),
          "anchor count must be below every 'M'");
    if (const auto* e = get("methods")) {
      c.methods.clear();
      for (auto item : split(e->value, ',')) {
        if (auto m = localization::parse_method(item)) {
          c.methods.push_back(*m);
        } else {
          p.error(e->line, "'methods': unknown method '" + std::string(item) +
                               "' (proposed, mds_map, dv_hop)");
        }
      }
    }
    if (const auto* e = get("rmse")) {
      if (e->value == "printed") {
        c.rmse = RmseFormula::kRootSumOverCount;
      } else if (e->value == "conventional") {
        c.rmse = RmseFormula::kConventional;
      } else {
        p.error(e->line, "'rmse' must be printed or conventional");
      }
    }
    if (const auto* e = get("max_iters")) {
      if (auto v = parse_unsigned(e->value); v && *v >= 1 && *v <= 1000000) {
        c.max_iters = static_cast<int>(*v);
      } else {
        p.error(e->line, "'max_iters' must be an integer in [1, 1000000]");
      }
    }
    if (const auto* e = get("tol")) {
      if (auto v = p.real(*e, "tol")) {
        c.tol = *v;
        check(e, *v > 0.0, "'tol' must be > 0");
      }
    }
    if (const auto* e = get("allow_reflection")) {
      if (auto v = parse_bool(e->value)) {
        c.allow_reflection = *v;
      } else {
        p.error(e->line, "'allow_reflection' must be true or false");
      }
    }
  }

  if (c.kind == ExperimentKind::kChannelTable) {
    channel::WaterConfig water_cfg = channel::default_water_config();
    if (const auto* e = get("water_config")) {
      c.water_config = e->value;
      try {
        water_cfg = channel::load_water_config(c.water_config);
      } catch (const std::exception& ex) {
        p.error(e->line, "'water_config': " + std::string(ex.what()));
      }
    }
    if (const auto* e = get("water")) {
      for (auto item : split(e->value, ',')) {
        if (water_cfg.presets.contains(std::string(item))) {
          c.water.emplace_back(item);
        } else {
          p.error(e->line, "'water': unknown preset '" + std::string(item) + "'");
        }
      }
    }
    if (const auto* e = get("chlorophyll")) {
      if (auto v = p.reals(*e, "chlorophyll")) {
        c.chlorophyll = *v;
        check(e, std::all_of(c.chlorophyll.begin(), c.chlorophyll.end(),
                             [](double x) { return x >= 0.0 && x <= 12.0; }),
              "'chlorophyll' values must lie in [0, 12] mg/m^3");
      }
    }
    if (const auto* e = get("wavelength_nm")) {
      if (auto v = p.reals(*e, "wavelength_nm")) {
        c.wavelength_nm = *v;
        check(e, std::all_of(c.wavelength_nm.begin(), c.wavelength_nm.end(),
                             [](double x) { return x >= 400.0 && x <= 700.0; }),
              "'wavelength_nm' values must lie in [400, 700]");
      }
    } else if (!c.chlorophyll.empty()) {
      c.wavelength_nm = {532.0};
    }
    if (!get("water") && !get("chlorophyll")) {
      p.error(0, "channel_table needs 'water' presets or 'chlorophyll' values");
    }
    if (const auto* e = get("wavelength_nm"); e && c.chlorophyll.empty()) {
      p.error(e->line, "'wavelength_nm' needs 'chlorophyll' values");
    }
    if (const auto* e = get("distance")) {
      if (auto v = p.reals(*e, "distance")) {
        c.distance = *v;
        check(e, std::all_of(c.distance.begin(), c.distance.end(),
                             [](double x) { return x > 0.0; }),
              "'distance' values must be > 0 (meters)");
      }
    }
    struct LinkKey {
      const char* name;
      double* field;
    };
    for (const LinkKey& lk : {LinkKey{"tx_power", &c.tx_power},
                              LinkKey{"tx_efficiency", &c.tx_efficiency},
                              LinkKey{"rx_efficiency", &c.rx_efficiency},
                              LinkKey{"rx_aperture", &c.rx_aperture},
                              LinkKey{"divergence", &c.divergence},
                              LinkKey{"incidence", &c.incidence}}) {
      if (const auto* e = get(lk.name)) {
        if (auto v = p.real(*e, lk.name)) *lk.field = *v;
      }
    }
    channel::OpticalLink link{c.tx_power, c.tx_efficiency, c.rx_efficiency,
                              c.rx_aperture, c.divergence, c.incidence, 1.0};
    try {
      link.validate();
    } catch (const std::exception& ex) {
      p.error(0, std::string("link parameters: ") + ex.what());
    }
  }

  std::stable_sort(p.errors.begin(), p.errors.end(),
                   [](const ConfigError& a, const ConfigError& b) {
                     return a.line < b.line;
                   });
  result.errors = std::move(p.errors);
  if (result.errors.empty()) result.config = std::move(c);
  return result;
}

std::string to_text(const ExperimentConfig& c) {
  std::ostringstream out;
  auto line = [&](std::string_view key, const std::string& value) {
    out << key << " = " << value << '\n';
  };
  auto reals = [](const std::vector<double>& v) { return join(v, format_real); };
  auto counts = [](const std::vector<std::size_t>& v) { return join(v, to_string_u); };

  line("kind", std::string(kind_name(c.kind)));
  if (!c.output.empty()) line("output", c.output);

  if (c.kind != ExperimentKind::kChannelTable) {
    line("area_side", format_real(c.area_side));
    line("trials", std::to_string(c.trials));
    line("seed", std::to_string(c.seed));
    line("M", counts(c.M));
    line("R", reals(c.R));
    line("phi", reals(c.phi));
    line("border_mode",
         join(c.border_mode, [](BorderMode m) { return std::string(border_name(m)); }));
  }
  if (c.kind == ExperimentKind::kConnectivitySweep) {
    line("k", counts(c.k));
  }
  if (c.kind == ExperimentKind::kLocalizationSweep) {
    line("noise_pct", reals(c.noise_pct));
    if (c.anchor_positions.empty()) {
      line("anchors", counts(c.anchors));
    } else {
      line("anchor_positions",
           join(c.anchor_positions,
                [](const std::array<double, 2>& a) {
                  return format_real(a[0]) + " " + format_real(a[1]);
                },
                "; "));
    }
    line("methods", join(c.methods, [](Method m) {
           return std::string(localization::method_name(m));
         }));
    line("rmse", c.rmse == RmseFormula::kConventional ? "conventional" : "printed");
    line("max_iters", std::to_string(c.max_iters));
    line("tol", format_real(c.tol));
    line("allow_reflection", c.allow_reflection ? "true" : "false");
  }
  if (c.kind == ExperimentKind::kChannelTable) {
    if (!c.water_config.empty()) line("water_config", c.water_config);
    if (!c.water.empty()) line("water", join(c.water, [](const std::string& s) { return s; }));
    if (!c.chlorophyll.empty()) {
      line("wavelength_nm", reals(c.wavelength_nm));
      line("chlorophyll", reals(c.chlorophyll));
    }
    line("distance", reals(c.distance));
    line("tx_power", format_real(c.tx_power));
    line("tx_efficiency", format_real(c.tx_efficiency));
    line("rx_efficiency", format_real(c.rx_efficiency));
    line("rx_aperture", format_real(c.rx_aperture));
    line("divergence", format_real(c.divergence));
    line("incidence", format_real(c.incidence));
  }
  return out.str();
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  ExperimentConfig copy = config;
  copy.output.clear();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : to_text(copy)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace uowsn::simcli

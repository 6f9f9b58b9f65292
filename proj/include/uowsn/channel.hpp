#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "uowsn/rng.hpp"

namespace uowsn::channel {

/// Tabulated pure-water absorption b_w and chlorophyll-specific absorption
/// a_c^0 (1/m at the reference concentration) on an increasing wavelength grid.
/// Values between rows are linearly interpolated.
struct WaterTable {
  std::vector<double> lambda_nm;
  std::vector<double> b_w;
  std::vector<double> b_cl;

  double pure_water_absorption(double lambda) const;
  double chlorophyll_specific_absorption(double lambda) const;
};

/// Constants of the chlorophyll-driven water model that are read from the
/// water config file rather than compiled in.
struct WaterConstants {
  double kappa_f = 0.0189;  // 1/nm, fulvic acid spectral slope
  double kappa_h = 0.01105;  // 1/nm, humic acid spectral slope
  double chlorophyll_exponent = 0.602;
  double reference_Ce0 = 1.0;  // mg/m^3
};

struct WaterPreset {
  double absorption;
  double scattering;
};

/// Everything parsed out of a water config file.
struct WaterConfig {
  WaterTable table;
  WaterConstants constants;
  std::map<std::string, WaterPreset> presets;
};

/// Parse the water config text. Format:
///
///   # comment
///   kappa_f = 0.0189
///   preset clear_ocean = 0.114, 0.037
///   lambda_nm, b_w, b_cl
///   400, 0.00663, 0.0319
///   ...
///
/// Key/value and preset lines come before the single header line; numeric
/// rows follow it. Errors throw std::runtime_error prefixed with "line N:".
WaterConfig parse_water_config(std::string_view text);
WaterConfig load_water_config(const std::filesystem::path& path);

/// Water config shipped with the library (data/water_haltrin.txt is the same
/// content in file form).
const WaterConfig& default_water_config();

/// Optical properties of a water body at one wavelength. Holds the derived
/// coefficients; extinction is always absorption + scattering.
class WaterModel {
 public:
  /// Chlorophyll-driven model: wavelength in [400, 700] nm, C_e in [0, 12].
  static WaterModel from_chlorophyll(double wavelength_nm, double chlorophyll_Ce,
                                     const WaterConfig& config);
  static WaterModel from_chlorophyll(double wavelength_nm,
                                     double chlorophyll_Ce);
  /// Directly specified coefficients (named presets).
  static WaterModel from_coefficients(double absorption, double scattering);
  static WaterModel preset(std::string_view name, const WaterConfig& config);
  static WaterModel preset(std::string_view name);

  double wavelength_nm() const { return wavelength_nm_; }
  double chlorophyll_Ce() const { return chlorophyll_Ce_; }
  double absorption() const { return absorption_; }
  double scattering() const { return scattering_; }
  double extinction() const { return extinction_; }

 private:
  WaterModel(double wavelength, double ce, double b, double s)
      : wavelength_nm_(wavelength),
        chlorophyll_Ce_(ce),
        absorption_(b),
        scattering_(s),
        extinction_(b + s) {}

  double wavelength_nm_;
  double chlorophyll_Ce_;
  double absorption_;
  double scattering_;
  double extinction_;
};

/// Concentrations derived from chlorophyll (mg/m^3).
double fulvic_concentration(double Ce, double Ce0 = 1.0);
double humic_concentration(double Ce, double Ce0 = 1.0);
double small_particle_concentration(double Ce, double Ce0 = 1.0);
double large_particle_concentration(double Ce, double Ce0 = 1.0);

/// b(lambda) in 1/m.
double absorption_coefficient(double wavelength_nm, double Ce,
                              const WaterConfig& config);
/// s(lambda) in 1/m.
double scattering_coefficient(double wavelength_nm, double Ce,
                              double Ce0 = 1.0);

inline double absorption_coefficient(const WaterModel& w) {
  return w.absorption();
}
inline double scattering_coefficient(const WaterModel& w) {
  return w.scattering();
}

struct OpticalLink {
  double tx_power = 0.1;         // W
  double tx_efficiency = 0.9;    // (0, 1]
  double rx_efficiency = 0.9;    // (0, 1]
  double rx_aperture = 0.01;     // m^2
  double divergence = 0.5235987755982988;  // rad, (0, pi]
  double incidence = 0.0;        // rad, [0, pi/2)
  double distance = 1.0;         // m

  /// Throws std::domain_error naming the first invalid field.
  void validate() const;
};

/// Link-budget received power in W.
double received_power(const OpticalLink& link, const WaterModel& water);

/// Inverts the link budget for distance. `link.distance` is ignored. With
/// noise_sigma > 0 a N(0, noise_sigma^2) draw from `rng` is added.
double estimate_range(double measured_power, const OpticalLink& link,
                      const WaterModel& water, double noise_sigma, Rng& rng);
double estimate_range(double measured_power, const OpticalLink& link,
                      const WaterModel& water);

}  // namespace uowsn::channel

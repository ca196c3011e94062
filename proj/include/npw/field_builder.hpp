#pragma once

#include <string>
#include <vector>

#include "npw/grid.hpp"
#include "npw/station.hpp"

namespace npw {

/// One meteorological sample on a vertical column.
struct WeatherSample {
  double P_pa = 101325.0;  // pressure [Pa]
  double T_k = 288.15;     // temperature [K]
  double RH_pct = 0.0;     // relative humidity [%]
  double W_liq_gm3 = 0.0;  // liquid water content [g/m^3]
  double W_ice_gm3 = 0.0;  // ice water content [g/m^3]
  double R_mmh = 0.0;      // rain rate [mm/h]
  double h_m = 0.0;        // altitude [m]
};

/// Frequency-specific attenuation coefficients, loaded from a key-value file
/// in which every value carries a `<key>.source =` provenance annotation.
struct AttenuationCoefficients {
  double freq_ghz = 0.0;
  double rain_k = 0.0;        // gamma_rain = rain_k * R^rain_alpha [dB/km]
  double rain_alpha = 1.0;
  double cloud_kl = 0.0;      // [dB/km per g/m^3] applied to liquid water
  double ice_kl = 0.0;        // [dB/km per g/m^3] applied to ice water (often 0)
  double gas_gamma = 0.0;     // clear-air specific attenuation [dB/km]
};

AttenuationCoefficients load_coefficients(const std::string& path);

struct WeatherColumn {
  double x_km = 0.0;
  std::vector<WeatherSample> samples;  // ascending in h_m
};

/// Weather CSV with header
/// `x_km,h_m,P_Pa,T_K,RH_pct,Wliq_gm3,Wice_gm3,R_mmh`, grouped by x.
std::vector<WeatherColumn> load_weather_csv(const std::string& path);

struct BuilderOptions {
  /// If true, the dry-air density uses the literal form 100*P/(R_dry*T) with
  /// P in Pa (100x denser than air). The default treats the factor 100 as the
  /// hPa->Pa conversion, i.e. rho_dry = P_Pa/(R_dry*T).
  bool literal_pressure_factor = false;
};

/// Saturation water-vapour pressure over water [Pa] (Tetens).
double saturation_vapor_pressure_pa(double T_k);

/// Real refractivity [N-units] from pressure, temperature and humidity:
/// N = 77.6*P_hPa/T + 3.732e5*e_hPa/T^2.
double real_refractivity(double P_pa, double T_k, double RH_pct);

/// Dry-air density [kg/m^3]; see BuilderOptions::literal_pressure_factor.
double dry_air_density(double P_pa, double T_k, const BuilderOptions& opt = {});

/// Hydrometeor content [g/m^3] from a mixing ratio [kg/kg]:
/// W = rho_dry * q * 1000.
double hydrometeor_content_gm3(double P_pa, double T_k, double mixing_ratio_kgkg,
                               const BuilderOptions& opt = {});

/// Per-sample complex index: real part from the dry+vapour refractivity
/// formula, kappa from gas + cloud + rain specific attenuations.
ComplexRefractivity index_from_weather(const WeatherSample& w, const AttenuationCoefficients& c,
                                       double f_hz);

/// Build a grid from weather columns. Samples are interpolated (first-order)
/// onto the layer midpoints of h_edges, clamped below the lowest sample;
/// columns are interpolated linearly in x at each cell's x midpoint.
RefractivityGrid2D build_from_weather(const std::vector<WeatherColumn>& columns,
                                      const AttenuationCoefficients& coeffs, double f_hz,
                                      std::vector<double> h_edges_km,
                                      std::vector<double> x_edges_km,
                                      const BuilderOptions& opt = {});

/// Build a grid from station profiles by IDW in x at each column midpoint and
/// linear interpolation onto layer midpoints.
RefractivityGrid2D build_from_stations(const std::vector<StationProfile>& stations,
                                       std::vector<double> h_edges_km,
                                       std::vector<double> x_edges_km, double idw_power = 2.0);

}  // namespace npw

#include "npw/field_builder.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "npw/config.hpp"
#include "npw/errors.hpp"

namespace npw {

namespace {

constexpr double kRDry = 287.06;  // specific gas constant of dry air [J/(kg K)]

void validate_sample(const WeatherSample& w) {
  bool ok = std::isfinite(w.P_pa) && std::isfinite(w.T_k) && std::isfinite(w.RH_pct) &&
            std::isfinite(w.W_liq_gm3) && std::isfinite(w.W_ice_gm3) && std::isfinite(w.R_mmh) &&
            std::isfinite(w.h_m);
  ok = ok && w.P_pa > 0.0 && w.T_k > 0.0 && w.RH_pct >= 0.0 && w.RH_pct <= 100.0 &&
       w.W_liq_gm3 >= 0.0 && w.W_ice_gm3 >= 0.0 && w.R_mmh >= 0.0;
  if (!ok) throw std::invalid_argument("WeatherSample: out-of-range weather values");
}

WeatherSample lerp_sample(const WeatherSample& a, const WeatherSample& b, double t) {
  WeatherSample out;
  out.P_pa = a.P_pa + t * (b.P_pa - a.P_pa);
  out.T_k = a.T_k + t * (b.T_k - a.T_k);
  out.RH_pct = a.RH_pct + t * (b.RH_pct - a.RH_pct);
  out.W_liq_gm3 = a.W_liq_gm3 + t * (b.W_liq_gm3 - a.W_liq_gm3);
  out.W_ice_gm3 = a.W_ice_gm3 + t * (b.W_ice_gm3 - a.W_ice_gm3);
  out.R_mmh = a.R_mmh + t * (b.R_mmh - a.R_mmh);
  out.h_m = a.h_m + t * (b.h_m - a.h_m);
  return out;
}

/// First-order interpolation onto altitude h; clamps below the lowest sample.
WeatherSample sample_at(const std::vector<WeatherSample>& samples, double h_m) {
  if (h_m <= samples.front().h_m) {
    WeatherSample w = samples.front();
    w.h_m = h_m;
    return w;
  }
  if (h_m > samples.back().h_m)
    throw std::invalid_argument("build_from_weather: column does not span the requested altitude");
  for (std::size_t k = 0; k + 1 < samples.size(); ++k) {
    if (h_m <= samples[k + 1].h_m) {
      double t = (h_m - samples[k].h_m) / (samples[k + 1].h_m - samples[k].h_m);
      return lerp_sample(samples[k], samples[k + 1], t);
    }
  }
  return samples.back();
}

}  // namespace

double saturation_vapor_pressure_pa(double T_k) {
  double t_c = T_k - 273.15;
  return 610.78 * std::exp(17.27 * t_c / (t_c + 237.3));
}

double real_refractivity(double P_pa, double T_k, double RH_pct) {
  double p_hpa = P_pa / 100.0;
  double e_hpa = RH_pct / 100.0 * saturation_vapor_pressure_pa(T_k) / 100.0;
  return 77.6 * p_hpa / T_k + 3.732e5 * e_hpa / (T_k * T_k);
}

double dry_air_density(double P_pa, double T_k, const BuilderOptions& opt) {
  double scale = opt.literal_pressure_factor ? 100.0 : 1.0;
  return scale * P_pa / (kRDry * T_k);
}

double hydrometeor_content_gm3(double P_pa, double T_k, double mixing_ratio_kgkg,
                               const BuilderOptions& opt) {
  return dry_air_density(P_pa, T_k, opt) * mixing_ratio_kgkg * 1000.0;
}

ComplexRefractivity index_from_weather(const WeatherSample& w, const AttenuationCoefficients& c,
                                       double f_hz) {
  validate_sample(w);
  if (std::abs(c.freq_ghz * 1e9 - f_hz) > 1e-3 * f_hz)
    throw std::invalid_argument("index_from_weather: coefficient table is for " +
                                std::to_string(c.freq_ghz) + " GHz, not the configured frequency");
  double n = 1.0 + real_refractivity(w.P_pa, w.T_k, w.RH_pct) * 1e-6;
  double gamma = c.gas_gamma + c.cloud_kl * w.W_liq_gm3 + c.ice_kl * w.W_ice_gm3;
  if (w.R_mmh > 0.0) gamma += c.rain_k * std::pow(w.R_mmh, c.rain_alpha);
  double kappa = attenuation_to_kappa(gamma, f_hz);
  return make_atmospheric_index(n, kappa);
}

RefractivityGrid2D build_from_weather(const std::vector<WeatherColumn>& columns,
                                      const AttenuationCoefficients& coeffs, double f_hz,
                                      std::vector<double> h_edges_km,
                                      std::vector<double> x_edges_km,
                                      [[maybe_unused]] const BuilderOptions& opt) {
  // opt only affects the mixing-ratio helpers; the CSV schema carries
  // hydrometeor content directly in g/m^3.
  if (columns.empty()) throw std::invalid_argument("build_from_weather: no weather columns");
  for (const auto& col : columns) {
    if (col.samples.empty()) throw std::invalid_argument("build_from_weather: empty column");
    for (const auto& s : col.samples) validate_sample(s);
    for (std::size_t k = 0; k + 1 < col.samples.size(); ++k)
      if (!(col.samples[k].h_m < col.samples[k + 1].h_m))
        throw std::invalid_argument("build_from_weather: column samples must ascend in h");
  }

  const std::size_t nx = x_edges_km.size() - 1;
  const std::size_t nh = h_edges_km.size() - 1;
  std::vector<ComplexRefractivity> cells(nx * nh);
  for (std::size_t i = 0; i < nx; ++i) {
    double x_mid = 0.5 * (x_edges_km[i] + x_edges_km[i + 1]);
    // Bracketing weather columns in x, clamped at the extremes.
    std::size_t lo = 0;
    while (lo + 1 < columns.size() && columns[lo + 1].x_km <= x_mid) ++lo;
    std::size_t hi = std::min(lo + 1, columns.size() - 1);
    double t = 0.0;
    if (hi != lo && columns[hi].x_km != columns[lo].x_km)
      t = std::clamp((x_mid - columns[lo].x_km) / (columns[hi].x_km - columns[lo].x_km), 0.0, 1.0);
    for (std::size_t j = 0; j < nh; ++j) {
      double h_mid_m = 0.5 * (h_edges_km[j] + h_edges_km[j + 1]) * 1000.0;
      WeatherSample a = sample_at(columns[lo].samples, h_mid_m);
      WeatherSample w = (hi == lo) ? a : lerp_sample(a, sample_at(columns[hi].samples, h_mid_m), t);
      cells[i * nh + j] = index_from_weather(w, coeffs, f_hz);
    }
  }
  return RefractivityGrid2D(std::move(x_edges_km), std::move(h_edges_km), std::move(cells));
}

RefractivityGrid2D build_from_stations(const std::vector<StationProfile>& stations,
                                       std::vector<double> h_edges_km,
                                       std::vector<double> x_edges_km, double idw_power) {
  if (stations.empty()) throw std::invalid_argument("build_from_stations: no stations");
  const std::size_t nx = x_edges_km.size() - 1;
  const std::size_t nh = h_edges_km.size() - 1;

  // Common altitude sampling for IDW: the first station's grid.
  std::vector<StationProfile> resampled;
  resampled.reserve(stations.size());
  for (const auto& s : stations) resampled.push_back(resample_profile(s, stations.front().h_m));

  std::vector<double> h_mids_m(nh);
  for (std::size_t j = 0; j < nh; ++j)
    h_mids_m[j] = 0.5 * (h_edges_km[j] + h_edges_km[j + 1]) * 1000.0;

  std::vector<ComplexRefractivity> cells(nx * nh);
  for (std::size_t i = 0; i < nx; ++i) {
    double x_mid = 0.5 * (x_edges_km[i] + x_edges_km[i + 1]);
    StationProfile p = resample_profile(idw_interpolate(resampled, x_mid, idw_power), h_mids_m);
    for (std::size_t j = 0; j < nh; ++j)
      cells[i * nh + j] = make_atmospheric_index(p.value[j].n, p.value[j].kappa);
  }
  return RefractivityGrid2D(std::move(x_edges_km), std::move(h_edges_km), std::move(cells));
}

AttenuationCoefficients load_coefficients(const std::string& path) {
  KeyValueFile kv = KeyValueFile::load(path);
  AttenuationCoefficients c;
  auto pick = [&](const char* key, bool required) {
    if (!required && !kv.has(key)) return 0.0;
    double v = kv.get_double(key);
    if (!kv.has(std::string(key) + ".source"))
      throw ConfigError(path + ": '" + key + "' is missing its '" + key + ".source' annotation");
    return v;
  };
  c.freq_ghz = pick("freq_GHz", true);
  c.rain_k = pick("rain_k", true);
  c.rain_alpha = pick("rain_alpha", true);
  c.cloud_kl = pick("cloud_Kl_dB_per_km_per_gm3", true);
  c.gas_gamma = pick("gas_gamma_dB_per_km", true);
  c.ice_kl = pick("ice_Kl_dB_per_km_per_gm3", false);
  if (c.freq_ghz <= 0.0) throw ConfigError(path + ": freq_GHz must be > 0");
  if (c.rain_k < 0.0 || c.cloud_kl < 0.0 || c.ice_kl < 0.0 || c.gas_gamma < 0.0 ||
      c.rain_alpha <= 0.0)
    throw ConfigError(path + ": attenuation coefficients out of range");
  return c;
}

std::vector<WeatherColumn> load_weather_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_weather_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("load_weather_csv: " + path + ": empty file");
  if (line != "x_km,h_m,P_Pa,T_K,RH_pct,Wliq_gm3,Wice_gm3,R_mmh")
    throw IoError("load_weather_csv: " + path + ": bad header");

  std::vector<double> order;
  std::map<double, WeatherColumn> by_x;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double x;
    WeatherSample w;
    if (!(ss >> x >> w.h_m >> w.P_pa >> w.T_k >> w.RH_pct >> w.W_liq_gm3 >> w.W_ice_gm3 >>
          w.R_mmh))
      throw IoError("load_weather_csv: " + path + ": line " + std::to_string(lineno) +
                    ": expected 8 numeric fields");
    auto [it, inserted] = by_x.try_emplace(x);
    if (inserted) {
      it->second.x_km = x;
      order.push_back(x);
    }
    it->second.samples.push_back(w);
  }
  std::vector<WeatherColumn> out;
  out.reserve(order.size());
  for (double x : order) {
    auto& col = by_x.at(x);
    std::sort(col.samples.begin(), col.samples.end(),
              [](const WeatherSample& a, const WeatherSample& b) { return a.h_m < b.h_m; });
    out.push_back(std::move(col));
  }
  if (out.empty()) throw IoError("load_weather_csv: " + path + ": no samples");
  std::sort(out.begin(), out.end(),
            [](const WeatherColumn& a, const WeatherColumn& b) { return a.x_km < b.x_km; });
  return out;
}

}  // namespace npw

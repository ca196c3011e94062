#include "npw/station.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "npw/errors.hpp"

namespace npw {

void StationProfile::validate() const {
  if (h_m.empty()) throw std::invalid_argument("StationProfile: empty");
  if (h_m.size() != value.size())
    throw std::invalid_argument("StationProfile: altitude/value size mismatch");
  for (std::size_t k = 0; k + 1 < h_m.size(); ++k)
    if (!(h_m[k] < h_m[k + 1]))
      throw std::invalid_argument("StationProfile: altitudes must be strictly increasing");
}

StationProfile resample_profile(const StationProfile& p, const std::vector<double>& h_targets_m) {
  p.validate();
  StationProfile out;
  out.x_km = p.x_km;
  out.h_m = h_targets_m;
  out.value.reserve(h_targets_m.size());
  for (double h : h_targets_m) {
    if (h <= p.h_m.front()) {
      out.value.push_back(p.value.front());
      continue;
    }
    if (h >= p.h_m.back()) {
      out.value.push_back(p.value.back());
      continue;
    }
    auto it = std::upper_bound(p.h_m.begin(), p.h_m.end(), h);
    std::size_t k = static_cast<std::size_t>(it - p.h_m.begin()) - 1;
    double t = (h - p.h_m[k]) / (p.h_m[k + 1] - p.h_m[k]);
    out.value.push_back(ComplexRefractivity(
        p.value[k].n + t * (p.value[k + 1].n - p.value[k].n),
        p.value[k].kappa + t * (p.value[k + 1].kappa - p.value[k].kappa)));
  }
  out.validate();
  return out;
}

StationProfile idw_interpolate(const std::vector<StationProfile>& stations, double x_query_km,
                               double power) {
  if (stations.empty()) throw std::invalid_argument("idw_interpolate: empty station list");
  if (!(power > 0.0)) throw std::invalid_argument("idw_interpolate: power must be > 0");
  for (const auto& s : stations) {
    s.validate();
    if (s.h_m != stations.front().h_m)
      throw std::invalid_argument(
          "idw_interpolate: stations must share a common altitude sampling (resample first)");
  }
  // Exact coordinate match wins outright; avoids the d = 0 singularity.
  for (const auto& s : stations) {
    if (s.x_km == x_query_km) {
      StationProfile out = s;
      out.x_km = x_query_km;
      return out;
    }
  }

  const std::size_t nh = stations.front().h_m.size();
  std::vector<double> weights(stations.size());
  double wsum = 0.0;
  for (std::size_t i = 0; i < stations.size(); ++i) {
    double d = std::abs(x_query_km - stations[i].x_km);
    weights[i] = std::pow(d, -power);
    wsum += weights[i];
  }

  StationProfile out;
  out.x_km = x_query_km;
  out.h_m = stations.front().h_m;
  out.value.resize(nh);
  for (std::size_t k = 0; k < nh; ++k) {
    double n = 0.0, kappa = 0.0;
    for (std::size_t i = 0; i < stations.size(); ++i) {
      n += weights[i] * stations[i].value[k].n;
      kappa += weights[i] * stations[i].value[k].kappa;
    }
    out.value[k] = ComplexRefractivity(n / wsum, kappa / wsum);
  }
  return out;
}

std::vector<StationProfile> load_station_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_station_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("load_station_csv: " + path + ": empty file");
  if (line != "x_km,h_m,N_re,N_im")
    throw IoError("load_station_csv: " + path + ": bad header (expected x_km,h_m,N_re,N_im)");

  std::vector<double> order;  // x values in order of first appearance
  std::map<double, StationProfile> by_x;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double x, h, nre, nim;
    if (!(ss >> x >> h >> nre >> nim))
      throw IoError("load_station_csv: " + path + ": line " + std::to_string(lineno) +
                    ": expected x_km,h_m,N_re,N_im");
    auto [it, inserted] = by_x.try_emplace(x);
    if (inserted) {
      it->second.x_km = x;
      order.push_back(x);
    }
    it->second.h_m.push_back(h);
    it->second.value.push_back(refractivity_to_index(Refractivity{nre, nim}));
  }

  std::vector<StationProfile> out;
  out.reserve(order.size());
  for (double x : order) {
    StationProfile& p = by_x.at(x);
    p.validate();
    out.push_back(std::move(p));
  }
  if (out.empty()) throw IoError("load_station_csv: " + path + ": no samples");
  return out;
}

}  // namespace npw

#pragma once

#include <string>
#include <vector>

#include "npw/refractivity.hpp"

namespace npw {

/// A vertical sounding at horizontal coordinate x: altitude-ordered
/// (h [m], complex index) samples.
struct StationProfile {
  double x_km = 0.0;
  std::vector<double> h_m;                 // strictly increasing, nonempty
  std::vector<ComplexRefractivity> value;  // same length as h_m

  void validate() const;
};

/// Linear resample onto target altitudes; below the lowest sample values are
/// clamped to the lowest sample, above the highest to the highest.
StationProfile resample_profile(const StationProfile& p, const std::vector<double>& h_targets_m);

/// Inverse-distance-weighted horizontal interpolation of station profiles.
/// Weights are d_i^(-power); a station at d == 0 returns its profile
/// verbatim. All stations must share a common altitude sampling.
StationProfile idw_interpolate(const std::vector<StationProfile>& stations, double x_query_km,
                               double power = 2.0);

/// Station CSV with header `x_km,h_m,N_re,N_im` (refractivity in N-units),
/// grouped into profiles by x in order of first appearance.
std::vector<StationProfile> load_station_csv(const std::string& path);

}  // namespace npw

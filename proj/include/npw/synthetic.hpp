#pragma once

#include "npw/grid.hpp"

namespace npw {

enum class SyntheticKind { ExponentialClear, RainCell, TwoLayer };

/// Parameters for the synthetic fixtures. Defaults give the shipped
/// atmospheric test scenarios; geometry fields apply to every kind.
struct SyntheticParams {
  // geometry
  double x_min_km = -150.0;
  double x_max_km = 150.0;
  std::size_t nx = 1;
  double h_top_km = 10.0;
  std::size_t nh = 40;

  // exponential_clear / rain_cell background: n(h) = 1 + N0*1e-6*exp(-h/H)
  double n0 = 315.0;               // surface refractivity [N-units]
  double scale_height_km = 7.35;   // H
  double kappa0 = 4.79e-10;        // background extinction

  // rain_cell: rectangle of elevated kappa
  double rain_x0_km = -150.0;
  double rain_x1_km = 150.0;
  double rain_h0_km = 0.0;
  double rain_h1_km = 4.0;         // rain layer top
  double rain_kappa = 2.24e-7;

  // two_layer: upper medium 1 over lower medium 2, split at h_top/2
  double layer_n1 = 1.0001;
  double layer_kappa1 = 1e-8;
  double layer_n2 = 1.0002;
  double layer_kappa2 = 1e-7;
};

RefractivityGrid2D synthetic_scenario(SyntheticKind kind, const SyntheticParams& params = {});

SyntheticKind synthetic_kind_from_name(const std::string& name);

}  // namespace npw

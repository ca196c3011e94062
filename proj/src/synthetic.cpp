#include "npw/synthetic.hpp"

#include <cmath>
#include <stdexcept>

namespace npw {

namespace {

std::vector<double> linspace_edges(double lo, double hi, std::size_t n_cells) {
  if (!(hi > lo) || n_cells == 0)
    throw std::invalid_argument("synthetic_scenario: invalid edge range");
  std::vector<double> edges(n_cells + 1);
  for (std::size_t k = 0; k <= n_cells; ++k)
    edges[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n_cells);
  edges.front() = lo;
  edges.back() = hi;
  return edges;
}

}  // namespace

RefractivityGrid2D synthetic_scenario(SyntheticKind kind, const SyntheticParams& p) {
  if (p.h_top_km <= 0.0 || p.nh == 0 || p.nx == 0)
    throw std::invalid_argument("synthetic_scenario: invalid grid geometry");

  if (kind == SyntheticKind::TwoLayer) {
    // Exactly two homogeneous layers: medium 1 above, medium 2 below.
    std::vector<double> x_edges = linspace_edges(p.x_min_km, p.x_max_km, 1);
    std::vector<double> h_edges = {0.0, 0.5 * p.h_top_km, p.h_top_km};
    std::vector<ComplexRefractivity> cells = {
        ComplexRefractivity(p.layer_n2, p.layer_kappa2),   // j=0: lower
        ComplexRefractivity(p.layer_n1, p.layer_kappa1)};  // j=1: upper
    return RefractivityGrid2D(std::move(x_edges), std::move(h_edges), std::move(cells));
  }

  if (!(p.scale_height_km > 0.0) || p.n0 < 0.0 || p.kappa0 < 0.0)
    throw std::invalid_argument("synthetic_scenario: invalid exponential parameters");
  if (kind == SyntheticKind::RainCell &&
      (p.rain_kappa < 0.0 || !(p.rain_x1_km > p.rain_x0_km) || !(p.rain_h1_km > p.rain_h0_km)))
    throw std::invalid_argument("synthetic_scenario: invalid rain cell parameters");

  std::vector<double> x_edges = linspace_edges(p.x_min_km, p.x_max_km, p.nx);
  std::vector<double> h_edges = linspace_edges(0.0, p.h_top_km, p.nh);
  std::vector<ComplexRefractivity> cells(p.nx * p.nh);
  for (std::size_t i = 0; i < p.nx; ++i) {
    double x_mid = 0.5 * (x_edges[i] + x_edges[i + 1]);
    for (std::size_t j = 0; j < p.nh; ++j) {
      double h_mid = 0.5 * (h_edges[j] + h_edges[j + 1]);
      double n = 1.0 + p.n0 * 1e-6 * std::exp(-h_mid / p.scale_height_km);
      double kappa = p.kappa0;
      if (kind == SyntheticKind::RainCell && x_mid >= p.rain_x0_km && x_mid <= p.rain_x1_km &&
          h_mid >= p.rain_h0_km && h_mid <= p.rain_h1_km)
        kappa = p.rain_kappa;
      cells[i * p.nh + j] = make_atmospheric_index(n, kappa);
    }
  }
  return RefractivityGrid2D(std::move(x_edges), std::move(h_edges), std::move(cells));
}

SyntheticKind synthetic_kind_from_name(const std::string& name) {
  if (name == "exponential_clear") return SyntheticKind::ExponentialClear;
  if (name == "rain_cell") return SyntheticKind::RainCell;
  if (name == "two_layer") return SyntheticKind::TwoLayer;
  throw std::invalid_argument("unknown synthetic scenario kind: " + name);
}

}  // namespace npw

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "npw/refractivity.hpp"

namespace npw {

/// 2D (horizontal x altitude) piecewise-constant complex-refractivity field.
/// Cells are indexed (column i, layer j); interfaces exist only at h_edges.
/// Immutable after construction; all accessors are safe for concurrent reads.
class RefractivityGrid2D {
 public:
  /// Validates: strictly ascending edges, cells.size() == nx*nh, every cell
  /// finite with kappa >= 0.
  RefractivityGrid2D(std::vector<double> x_edges_km, std::vector<double> h_edges_km,
                     std::vector<ComplexRefractivity> cells);

  std::size_t nx() const { return x_edges_.size() - 1; }
  std::size_t nh() const { return h_edges_.size() - 1; }
  const std::vector<double>& x_edges() const { return x_edges_; }
  const std::vector<double>& h_edges() const { return h_edges_; }

  const ComplexRefractivity& cell(std::size_t i, std::size_t j) const {
    return cells_[i * nh() + j];
  }
  const std::vector<ComplexRefractivity>& cells() const { return cells_; }

  double x_min() const { return x_edges_.front(); }
  double x_max() const { return x_edges_.back(); }
  double h_top() const { return h_edges_.back(); }
  double h_bottom() const { return h_edges_.front(); }

  /// Column containing x [km], clamped to [0, nx-1] so rays that leave the
  /// lateral extent keep propagating in the outermost column's medium.
  std::size_t column_of(double x_km) const;
  /// Layer containing h [km], clamped likewise.
  std::size_t layer_of(double h_km) const;

 private:
  std::vector<double> x_edges_;
  std::vector<double> h_edges_;
  std::vector<ComplexRefractivity> cells_;  // (i, j) -> i*nh + j
};

/// Text format, round-trips doubles bit-exactly (17 significant digits):
///   line 1: NPWGRID v1
///   line 2: nx nh
///   line 3: x_edges [km]
///   line 4: h_edges [km]
///   then nx*nh lines: i j n kappa
void save_grid(const RefractivityGrid2D& grid, const std::string& path);
RefractivityGrid2D load_grid(const std::string& path);

/// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double v);

}  // namespace npw

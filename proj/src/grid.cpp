#include "npw/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "npw/errors.hpp"

namespace npw {

namespace {

void require_ascending(const std::vector<double>& edges, const char* name) {
  if (edges.size() < 2) throw std::invalid_argument(std::string(name) + ": need at least 2 edges");
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    if (!(edges[k] < edges[k + 1]))
      throw std::invalid_argument(std::string(name) + ": edges must be strictly ascending");
    if (!std::isfinite(edges[k])) throw std::invalid_argument(std::string(name) + ": non-finite edge");
  }
  if (!std::isfinite(edges.back())) throw std::invalid_argument(std::string(name) + ": non-finite edge");
}

}  // namespace

RefractivityGrid2D::RefractivityGrid2D(std::vector<double> x_edges_km,
                                       std::vector<double> h_edges_km,
                                       std::vector<ComplexRefractivity> cells)
    : x_edges_(std::move(x_edges_km)), h_edges_(std::move(h_edges_km)), cells_(std::move(cells)) {
  require_ascending(x_edges_, "x_edges");
  require_ascending(h_edges_, "h_edges");
  if (cells_.size() != nx() * nh())
    throw std::invalid_argument("grid: cells size does not match (nx, nh)");
  for (const auto& c : cells_) {
    if (!std::isfinite(c.n) || !std::isfinite(c.kappa))
      throw std::invalid_argument("grid: non-finite cell");
    if (c.n < 0.0 || c.kappa < 0.0) throw std::invalid_argument("grid: invalid cell (n or kappa < 0)");
  }
}

std::size_t RefractivityGrid2D::column_of(double x_km) const {
  auto it = std::upper_bound(x_edges_.begin(), x_edges_.end(), x_km);
  std::ptrdiff_t i = (it - x_edges_.begin()) - 1;
  i = std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(nx()) - 1);
  return static_cast<std::size_t>(i);
}

std::size_t RefractivityGrid2D::layer_of(double h_km) const {
  auto it = std::upper_bound(h_edges_.begin(), h_edges_.end(), h_km);
  std::ptrdiff_t j = (it - h_edges_.begin()) - 1;
  j = std::clamp<std::ptrdiff_t>(j, 0, static_cast<std::ptrdiff_t>(nh()) - 1);
  return static_cast<std::size_t>(j);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void save_grid(const RefractivityGrid2D& grid, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("save_grid: cannot open " + path);
  out << "NPWGRID v1\n";
  out << grid.nx() << ' ' << grid.nh() << '\n';
  for (std::size_t k = 0; k <= grid.nx(); ++k)
    out << (k ? " " : "") << format_double(grid.x_edges()[k]);
  out << '\n';
  for (std::size_t k = 0; k <= grid.nh(); ++k)
    out << (k ? " " : "") << format_double(grid.h_edges()[k]);
  out << '\n';
  for (std::size_t i = 0; i < grid.nx(); ++i)
    for (std::size_t j = 0; j < grid.nh(); ++j) {
      const auto& c = grid.cell(i, j);
      out << i << ' ' << j << ' ' << format_double(c.n) << ' ' << format_double(c.kappa) << '\n';
    }
  if (!out) throw IoError("save_grid: write failed for " + path);
}

RefractivityGrid2D load_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_grid: cannot open " + path);
  std::string line;
  std::size_t lineno = 0;
  auto next_line = [&]() {
    if (!std::getline(in, line))
      throw IoError("load_grid: " + path + ": unexpected end of file at line " +
                    std::to_string(lineno + 1));
    ++lineno;
  };

  next_line();
  if (line != "NPWGRID v1")
    throw IoError("load_grid: " + path + ": line 1: bad header (expected 'NPWGRID v1')");

  next_line();
  std::size_t nx = 0, nh = 0;
  {
    std::istringstream ss(line);
    if (!(ss >> nx >> nh) || nx == 0 || nh == 0)
      throw IoError("load_grid: " + path + ": line 2: expected 'nx nh'");
  }

  auto read_edges = [&](std::size_t count, const char* name) {
    next_line();
    std::istringstream ss(line);
    std::vector<double> edges(count);
    for (std::size_t k = 0; k < count; ++k)
      if (!(ss >> edges[k]))
        throw IoError("load_grid: " + path + ": line " + std::to_string(lineno) + ": expected " +
                      std::to_string(count) + " " + name + " edges");
    return edges;
  };
  std::vector<double> x_edges = read_edges(nx + 1, "x");
  std::vector<double> h_edges = read_edges(nh + 1, "h");

  std::vector<ComplexRefractivity> cells(nx * nh);
  std::vector<char> seen(nx * nh, 0);
  for (std::size_t k = 0; k < nx * nh; ++k) {
    next_line();
    std::istringstream ss(line);
    std::size_t i = 0, j = 0;
    double n = 0.0, kappa = 0.0;
    if (!(ss >> i >> j >> n >> kappa))
      throw IoError("load_grid: " + path + ": line " + std::to_string(lineno) +
                    ": expected 'i j n kappa'");
    if (i >= nx || j >= nh)
      throw IoError("load_grid: " + path + ": line " + std::to_string(lineno) +
                    ": cell index out of declared dimensions");
    if (!std::isfinite(n) || !std::isfinite(kappa))
      throw IoError("load_grid: " + path + ": line " + std::to_string(lineno) + ": non-finite cell");
    if (kappa < 0.0)
      throw IoError("load_grid: " + path + ": line " + std::to_string(lineno) + ": kappa < 0");
    cells[i * nh + j] = ComplexRefractivity(n, kappa);
    seen[i * nh + j] = 1;
  }
  for (std::size_t k = 0; k < seen.size(); ++k)
    if (!seen[k])
      throw IoError("load_grid: " + path + ": dimension mismatch (missing cell rows)");

  try {
    return RefractivityGrid2D(std::move(x_edges), std::move(h_edges), std::move(cells));
  } catch (const std::invalid_argument& e) {
    throw IoError("load_grid: " + path + ": " + e.what());
  }
}

}  // namespace npw

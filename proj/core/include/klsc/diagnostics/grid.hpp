#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "klsc/analytic/point.hpp"

namespace klsc {

/// Cell-centred rectangular grid. Cell (i, j), i along x and j along y, has
/// centre (xmin + (i + 0.5) dx, ymin + (j + 0.5) dy) and flat index j * nx + i.
struct Grid2D {
  double xmin = -6.0;
  double xmax = 6.0;
  double ymin = -6.0;
  double ymax = 6.0;
  std::size_t nx = 600;
  std::size_t ny = 600;

  /// Throws InvalidArgumentError unless nx, ny >= 2 and the extent is positive.
  void validate() const;

  double dx() const { return (xmax - xmin) / static_cast<double>(nx); }
  double dy() const { return (ymax - ymin) / static_cast<double>(ny); }
  double cell_area() const { return dx() * dy(); }
  std::size_t size() const { return nx * ny; }
  double x(std::size_t i) const { return xmin + (static_cast<double>(i) + 0.5) * dx(); }
  double y(std::size_t j) const { return ymin + (static_cast<double>(j) + 0.5) * dy(); }
  Point center(std::size_t flat) const { return {x(flat % nx), y(flat / nx)}; }

  friend bool operator==(const Grid2D&, const Grid2D&) = default;
};

/// Evaluates f at every cell centre, in flat-index order.
std::vector<double> evaluate_on_grid(const Grid2D& grid, const std::function<double(Point)>& f);

/// Nonnegative density values per cell, integrating to one after normalize().
class GridDensity {
 public:
  GridDensity(Grid2D grid, std::vector<double> values);

  /// exp(log_values - max) then normalized; -inf entries become exact zeros.
  static GridDensity from_log_values(const Grid2D& grid, const std::vector<double>& log_values);

  const Grid2D& grid() const noexcept { return grid_; }
  const std::vector<double>& values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  /// sum(values) * cell_area
  double mass() const;
  GridDensity& normalize();
  /// sum q * f * cell_area
  double expectation(const std::vector<double>& field) const;
  /// Mass of the cells where pred(field) holds.
  double mass_where(const std::vector<double>& field, const std::function<bool(double)>& pred) const;

 private:
  Grid2D grid_;
  std::vector<double> values_;
};

}  // namespace klsc

#include "klsc/diagnostics/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "klsc/error.hpp"

namespace klsc {

void Grid2D::validate() const {
  if (nx < 2 || ny < 2) throw InvalidArgumentError("Grid2D: nx and ny must be >= 2");
  if (!(xmax > xmin) || !(ymax > ymin)) throw InvalidArgumentError("Grid2D: empty extent");
}

std::vector<double> evaluate_on_grid(const Grid2D& grid, const std::function<double(Point)>& f) {
  std::vector<double> out(grid.size());
  for (std::size_t j = 0; j < grid.ny; ++j) {
    const double y = grid.y(j);
    for (std::size_t i = 0; i < grid.nx; ++i) out[j * grid.nx + i] = f({grid.x(i), y});
  }
  return out;
}

GridDensity::GridDensity(Grid2D grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  grid_.validate();
  if (values_.size() != grid_.size()) throw GridMismatchError("GridDensity: value count != grid size");
  for (double v : values_) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgumentError("GridDensity: negative or non-finite value");
  }
}

GridDensity GridDensity::from_log_values(const Grid2D& grid, const std::vector<double>& log_values) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : log_values) mx = std::max(mx, v);
  if (!std::isfinite(mx)) throw InvalidArgumentError("GridDensity: no cell with finite log density");
  std::vector<double> values(log_values.size());
  std::transform(log_values.begin(), log_values.end(), values.begin(),
                 [mx](double v) { return std::exp(v - mx); });
  GridDensity g(grid, std::move(values));
  g.normalize();
  return g;
}

double GridDensity::mass() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s * grid_.cell_area();
}

GridDensity& GridDensity::normalize() {
  const double m = mass();
  if (!(m > 0.0)) throw InvalidArgumentError("GridDensity: cannot normalize zero mass");
  for (double& v : values_) v /= m;
  return *this;
}

double GridDensity::expectation(const std::vector<double>& field) const {
  if (field.size() != values_.size()) throw GridMismatchError("expectation: field size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] > 0.0) s += values_[i] * field[i];
  }
  return s * grid_.cell_area();
}

double GridDensity::mass_where(const std::vector<double>& field,
                               const std::function<bool(double)>& pred) const {
  if (field.size() != values_.size()) throw GridMismatchError("mass_where: field size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (pred(field[i])) s += values_[i];
  }
  return s * grid_.cell_area();
}

}  // namespace klsc

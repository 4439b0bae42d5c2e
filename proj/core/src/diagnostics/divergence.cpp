#include "klsc/diagnostics/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "klsc/error.hpp"

namespace klsc {

std::string Divergence::to_string() const {
  if (infinite) return "inf";
  std::ostringstream os;
  os.precision(10);
  os << value;
  return os.str();
}

double grid_tv(const GridDensity& a, const GridDensity& b) {
  if (!(a.grid() == b.grid())) throw GridMismatchError("grid_tv: densities live on different grids");
  double s = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) s += std::abs(a[i] - b[i]);
  return 0.5 * s * a.grid().cell_area();
}

Divergence grid_kl(const GridDensity& q, const GridDensity& p) {
  if (!(q.grid() == p.grid())) throw GridMismatchError("grid_kl: densities live on different grids");
  double s = 0.0;
  for (std::size_t i = 0; i < q.values().size(); ++i) {
    const double qi = q[i];
    if (qi <= kDensityFloor) continue;
    const double pi = p[i];
    if (pi <= kDensityFloor) return Divergence::infinity();
    s += qi * std::log(qi / pi);
  }
  return {s * q.grid().cell_area(), false};
}

GridDensity kde_to_grid(std::span<const Point> samples, const KdeConfig& cfg, const Grid2D& grid) {
  if (samples.empty()) throw EmptySampleError("kde_to_grid: no samples");
  if (!(cfg.bandwidth > 0.0)) throw InvalidArgumentError("kde_to_grid: bandwidth must be positive");
  grid.validate();
  const double h = cfg.bandwidth;
  const double inv2h2 = 1.0 / (2.0 * h * h);
  const double dx = grid.dx(), dy = grid.dy();
  const auto nx = static_cast<std::ptrdiff_t>(grid.nx);
  const auto ny = static_cast<std::ptrdiff_t>(grid.ny);
  const auto rx = static_cast<std::ptrdiff_t>(std::ceil(cfg.cutoff * h / dx));
  const auto ry = static_cast<std::ptrdiff_t>(std::ceil(cfg.cutoff * h / dy));

  std::vector<double> values(grid.size(), 0.0);
  std::vector<double> kx(static_cast<std::size_t>(2 * rx + 1));
  std::vector<double> ky(static_cast<std::size_t>(2 * ry + 1));
  for (const Point& s : samples) {
    // nearest cell index, then a separable kernel window around it
    const auto ci = static_cast<std::ptrdiff_t>(std::floor((s.x - grid.xmin) / dx));
    const auto cj = static_cast<std::ptrdiff_t>(std::floor((s.y - grid.ymin) / dy));
    const std::ptrdiff_t i0 = std::max<std::ptrdiff_t>(0, ci - rx);
    const std::ptrdiff_t i1 = std::min<std::ptrdiff_t>(nx - 1, ci + rx);
    const std::ptrdiff_t j0 = std::max<std::ptrdiff_t>(0, cj - ry);
    const std::ptrdiff_t j1 = std::min<std::ptrdiff_t>(ny - 1, cj + ry);
    if (i0 > i1 || j0 > j1) continue;
    for (std::ptrdiff_t i = i0; i <= i1; ++i) {
      const double d = grid.x(static_cast<std::size_t>(i)) - s.x;
      kx[static_cast<std::size_t>(i - i0)] = std::exp(-d * d * inv2h2);
    }
    for (std::ptrdiff_t j = j0; j <= j1; ++j) {
      const double d = grid.y(static_cast<std::size_t>(j)) - s.y;
      ky[static_cast<std::size_t>(j - j0)] = std::exp(-d * d * inv2h2);
    }
    const auto width = static_cast<std::size_t>(i1 - i0 + 1);
    for (std::ptrdiff_t j = j0; j <= j1; ++j) {
      const double wy = ky[static_cast<std::size_t>(j - j0)];
      double* row = values.data() + static_cast<std::size_t>(j) * grid.nx + static_cast<std::size_t>(i0);
      for (std::size_t k = 0; k < width; ++k) row[k] += wy * kx[k];
    }
  }
  GridDensity out(grid, std::move(values));
  out.normalize();
  return out;
}

}  // namespace klsc

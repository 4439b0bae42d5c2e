#pragma once

#include <span>
#include <string>

#include "klsc/diagnostics/grid.hpp"

namespace klsc {

/// A KL value, or the flag that q puts mass where p has none.
struct Divergence {
  double value = 0.0;
  bool infinite = false;

  static Divergence infinity() { return {0.0, true}; }
  /// Formats as the value or "inf"; used by every report row.
  std::string to_string() const;
};

/// Below this density a cell counts as outside the support.
inline constexpr double kDensityFloor = 1e-300;

/// 0.5 * sum |a - b| * cell_area. Throws GridMismatchError on different grids.
double grid_tv(const GridDensity& a, const GridDensity& b);

/// sum q log(q / p) * cell_area with 0 log 0 = 0; infinite when q > floor
/// where p <= floor.
Divergence grid_kl(const GridDensity& q, const GridDensity& p);

struct KdeConfig {
  double bandwidth = 0.15;
  /// Kernel truncated beyond this many bandwidths per axis.
  double cutoff = 6.0;
};

/// Isotropic Gaussian KDE evaluated at cell centres, then normalized.
/// Throws EmptySampleError for an empty sample set.
GridDensity kde_to_grid(std::span<const Point> samples, const KdeConfig& cfg, const Grid2D& grid);

}  // namespace klsc

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "klsc/diagnostics/grid.hpp"

namespace klsc {

/// A grid field as stored on disk: "KLSCGRD1", nx and ny as uint64, the four
/// extents as doubles, then nx * ny doubles in flat-index order, all
/// little-endian.
struct GridDump {
  Grid2D grid;
  std::vector<double> values;
};

void write_grid_dump(const std::string& path, const Grid2D& grid, const std::vector<double>& values);
GridDump read_grid_dump(const std::string& path);

/// Piecewise-linear interpolation through nine samples of the viridis map.
std::array<std::uint8_t, 3> viridis(double t);

inline constexpr int kHeatmapSize = 600;

/// Min-max normalized field rendered to a kHeatmapSize square RGB PNG, top row
/// at ymax, nearest-cell sampling.
void write_heatmap_png(const std::string& path, const Grid2D& grid, const std::vector<double>& values);

/// Writes `<stem>.grid`, then renders `<stem>.png` from the file just written.
void emit_grid_panel(const std::string& stem, const Grid2D& grid, const std::vector<double>& values);

/// Re-renders a PNG from a dump.
void regenerate_heatmap(const std::string& dump_path, const std::string& png_path);

}  // namespace klsc

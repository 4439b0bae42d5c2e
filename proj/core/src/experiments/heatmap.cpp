#include "klsc/experiments/heatmap.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>

#include <png.h>

#include "klsc/error.hpp"

namespace klsc {

namespace {

constexpr char kMagic[8] = {'K', 'L', 'S', 'C', 'G', 'R', 'D', '1'};

static_assert(std::endian::native == std::endian::little, "grid dumps assume a little-endian host");

template <class T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw InvalidArgumentError("truncated grid dump");
  return v;
}

}  // namespace

void write_grid_dump(const std::string& path, const Grid2D& grid, const std::vector<double>& values) {
  if (values.size() != grid.size()) throw GridMismatchError("write_grid_dump: value count does not match grid");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgumentError("cannot write " + path);
  out.write(kMagic, sizeof kMagic);
  put<std::uint64_t>(out, grid.nx);
  put<std::uint64_t>(out, grid.ny);
  put(out, grid.xmin);
  put(out, grid.xmax);
  put(out, grid.ymin);
  put(out, grid.ymax);
  out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double)));
}

GridDump read_grid_dump(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgumentError("cannot open " + path);
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) throw InvalidArgumentError(path + ": not a grid dump");
  GridDump d;
  d.grid.nx = get<std::uint64_t>(in);
  d.grid.ny = get<std::uint64_t>(in);
  d.grid.xmin = get<double>(in);
  d.grid.xmax = get<double>(in);
  d.grid.ymin = get<double>(in);
  d.grid.ymax = get<double>(in);
  d.grid.validate();
  d.values.resize(d.grid.size());
  in.read(reinterpret_cast<char*>(d.values.data()), static_cast<std::streamsize>(d.values.size() * sizeof(double)));
  if (!in) throw InvalidArgumentError(path + ": truncated grid dump");
  return d;
}

std::array<std::uint8_t, 3> viridis(double t) {
  static constexpr double stops[9][3] = {{68, 1, 84},    {71, 44, 122},  {59, 81, 139},
                                         {44, 113, 142}, {33, 144, 141}, {39, 173, 129},
                                         {92, 200, 99},  {170, 220, 50}, {253, 231, 37}};
  if (!std::isfinite(t)) t = 0.0;
  t = std::clamp(t, 0.0, 1.0) * 8.0;
  const int k = std::min(7, static_cast<int>(t));
  const double f = t - k;
  std::array<std::uint8_t, 3> rgb{};
  for (int c = 0; c < 3; ++c) {
    rgb[c] = static_cast<std::uint8_t>(std::lround(stops[k][c] + f * (stops[k + 1][c] - stops[k][c])));
  }
  return rgb;
}

void write_heatmap_png(const std::string& path, const Grid2D& grid, const std::vector<double>& values) {
  if (values.size() != grid.size()) throw GridMismatchError("write_heatmap_png: value count does not match grid");
  double lo = INFINITY, hi = -INFINITY;
  for (double v : values) {
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  const double span = hi > lo ? hi - lo : 1.0;

  std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.c_str(), "wb"), &std::fclose);
  if (!fp) throw InvalidArgumentError("cannot write " + path);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw InvalidArgumentError("libpng initialisation failed");
  }
  std::vector<png_byte> row(3 * kHeatmapSize);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw InvalidArgumentError("libpng failed writing " + path);
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, kHeatmapSize, kHeatmapSize, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int py = 0; py < kHeatmapSize; ++py) {
    const std::size_t j = grid.ny - 1 - static_cast<std::size_t>(py) * grid.ny / kHeatmapSize;
    for (int px = 0; px < kHeatmapSize; ++px) {
      const std::size_t i = static_cast<std::size_t>(px) * grid.nx / kHeatmapSize;
      const auto rgb = viridis((values[j * grid.nx + i] - lo) / span);
      std::copy(rgb.begin(), rgb.end(), row.begin() + 3 * px);
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

void emit_grid_panel(const std::string& stem, const Grid2D& grid, const std::vector<double>& values) {
  write_grid_dump(stem + ".grid", grid, values);
  regenerate_heatmap(stem + ".grid", stem + ".png");
}

void regenerate_heatmap(const std::string& dump_path, const std::string& png_path) {
  const GridDump d = read_grid_dump(dump_path);
  write_heatmap_png(png_path, d.grid, d.values);
}

}  // namespace klsc

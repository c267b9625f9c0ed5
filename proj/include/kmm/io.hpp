#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "kmm/eval.hpp"
#include "kmm/optimize.hpp"
#include "kmm/types.hpp"

// File formats:
//   points      headerless CSV, one sample per row, 17 significant digits
//   trace       "iter,objective,elapsed_ms"
//   curve       "n,mean,std,repeats"
//   bench       "m,n,ms_per_iter"
//   images      binary PGM (P5) / PPM (P6), maxval 255

namespace kmm {

/// Shortest round-trippable text for a double (17 significant digits).
std::string format_double(double v);

Matrix load_points_csv(const std::filesystem::path& path);
void save_points_csv(const std::filesystem::path& path, MatrixRef points);

struct CsvTable {
  std::vector<std::string> header;
  Matrix values;
};

/// CSV whose first line is a comma-separated header.
CsvTable load_csv_table(const std::filesystem::path& path);

void save_trace_csv(const std::filesystem::path& path, const Trajectory& traj, bool include_timing);
void save_curve_csv(const std::filesystem::path& path, const std::vector<CurvePoint>& curve);
void save_bench_csv(const std::filesystem::path& path, const std::vector<BenchCell>& cells);

/// Channel-major pixels in [0, 1]: index = c * height * width + row * width + col.
struct ImageRecord {
  int channels = 1;
  int height = 0;
  int width = 0;
  std::vector<double> pixels;

  Vector flattened() const;
  static ImageRecord from_flat(VectorRef values, int channels, int height, int width);
  double at(int c, int row, int col) const {
    return pixels[static_cast<std::size_t>((c * height + row) * width + col)];
  }
};

ImageRecord load_image_pnm(const std::filesystem::path& path);
/// P5 for one channel, P6 for three. Values are clamped to [0, 1] and rounded.
void save_image_pnm(const std::filesystem::path& path, const ImageRecord& image);

/// Tiles same-shape images row-major into one PPM, separated by 1-pixel black
/// lines. Grayscale tiles are replicated across the three channels.
ImageRecord image_grid(const std::vector<ImageRecord>& images, int columns);
void save_image_grid(const std::vector<ImageRecord>& images, int columns,
                     const std::filesystem::path& path);

/// All .pgm/.ppm files in a directory, sorted by file name.
std::vector<ImageRecord> load_image_directory(const std::filesystem::path& dir);

}  // namespace kmm

#include "kmm/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include "kmm/error.hpp"

namespace kmm {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    if (end == std::string_view::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  // Trailing blank lines are not rows.
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  return lines;
}

std::vector<double> parse_row(std::string_view line, std::size_t line_no, const fs::path& path) {
  std::vector<double> row;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    const std::string_view tok =
        trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    double v = 0.0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    if (!tok.empty() && *first == '+') ++first;
    const auto res = std::from_chars(first, last, v);
    if (tok.empty() || res.ec != std::errc{} || res.ptr != last) {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": cannot parse '" +
                    std::string(tok) + "' as a number");
    }
    row.push_back(v);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return row;
}

Matrix parse_rows(const std::vector<std::string_view>& lines, std::size_t first_line,
                  const fs::path& path) {
  std::vector<std::vector<double>> rows;
  for (std::size_t i = first_line; i < lines.size(); ++i) {
    rows.push_back(parse_row(lines[i], i + 1, path));
    if (rows.back().size() != rows.front().size()) {
      throw IoError(path.string() + ":" + std::to_string(i + 1) + ": expected " +
                    std::to_string(rows.front().size()) + " values, found " +
                    std::to_string(rows.back().size()));
    }
  }
  Matrix M(static_cast<Eigen::Index>(rows.size()),
           rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return M;
}

void write_rows(std::ostream& out, MatrixRef M) {
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      if (j) out << ',';
      out << format_double(M(i, j));
    }
    out << '\n';
  }
}

}  // namespace

Matrix load_points_csv(const fs::path& path) {
  const std::string text = read_file(path);
  const auto lines = split_lines(text);
  if (lines.empty()) throw IoError("'" + path.string() + "' contains no rows");
  return parse_rows(lines, 0, path);
}

void save_points_csv(const fs::path& path, MatrixRef points) {
  auto out = open_out(path);
  write_rows(out, points);
  finish(out, path);
}

CsvTable load_csv_table(const fs::path& path) {
  const std::string text = read_file(path);
  const auto lines = split_lines(text);
  if (lines.empty()) throw IoError("'" + path.string() + "' has no header");
  CsvTable table;
  std::string_view header = lines.front();
  std::size_t start = 0;
  while (true) {
    const auto comma = header.find(',', start);
    table.header.emplace_back(trim(header.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  table.values = parse_rows(lines, 1, path);
  if (table.values.rows() > 0 && table.values.cols() != static_cast<Eigen::Index>(table.header.size())) {
    throw IoError("'" + path.string() + "': row width does not match header");
  }
  return table;
}

void save_trace_csv(const fs::path& path, const Trajectory& traj, bool include_timing) {
  auto out = open_out(path);
  out << "iter,objective,elapsed_ms\n";
  for (const auto& r : traj.records) {
    out << r.iteration << ',' << format_double(r.objective) << ','
        << format_double(include_timing ? r.elapsed_ms : 0.0) << '\n';
  }
  finish(out, path);
}

void save_curve_csv(const fs::path& path, const std::vector<CurvePoint>& curve) {
  auto out = open_out(path);
  out << "n,mean,std,repeats\n";
  for (const auto& p : curve) {
    out << p.n << ',' << format_double(p.value) << ',' << format_double(p.std) << ',' << p.repeats << '\n';
  }
  finish(out, path);
}

void save_bench_csv(const fs::path& path, const std::vector<BenchCell>& cells) {
  auto out = open_out(path);
  out << "m,n,ms_per_iter\n";
  for (const auto& c : cells) out << c.m << ',' << c.n << ',' << format_double(c.ms_per_iter) << '\n';
  finish(out, path);
}

// -----------------------------------------------------------------------------
// Images
// -----------------------------------------------------------------------------

Vector ImageRecord::flattened() const {
  return Eigen::Map<const Vector>(pixels.data(), static_cast<Eigen::Index>(pixels.size()));
}

ImageRecord ImageRecord::from_flat(VectorRef values, int channels, int height, int width) {
  detail::require(channels == 1 || channels == 3, "images have 1 or 3 channels");
  detail::require(height > 0 && width > 0, "image dimensions must be positive");
  detail::require(values.size() == static_cast<Eigen::Index>(channels) * height * width,
                  "flat image has the wrong number of values");
  ImageRecord img;
  img.channels = channels;
  img.height = height;
  img.width = width;
  img.pixels.assign(values.data(), values.data() + values.size());
  return img;
}

namespace {

class PnmHeaderReader {
 public:
  PnmHeaderReader(const std::string& bytes, const fs::path& path) : bytes_(bytes), path_(path) {}

  std::size_t pos() const { return pos_; }

  std::string magic() {
    if (bytes_.size() < 2) fail("file too short for a PNM header");
    pos_ = 2;
    return bytes_.substr(0, 2);
  }

  long number() {
    skip_space_and_comments();
    long v = 0;
    const char* first = bytes_.data() + pos_;
    const auto res = std::from_chars(first, bytes_.data() + bytes_.size(), v);
    if (res.ec != std::errc{} || res.ptr == first) fail("malformed header number");
    pos_ = static_cast<std::size_t>(res.ptr - bytes_.data());
    return v;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  void single_whitespace() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      fail("missing whitespace after header");
    }
    ++pos_;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw IoError("'" + path_.string() + "': " + what);
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string& bytes_;
  const fs::path& path_;
  std::size_t pos_ = 0;
};

std::uint8_t quantize(double v) {
  const double c = std::clamp(std::isfinite(v) ? v : 0.0, 0.0, 1.0);
  return static_cast<std::uint8_t>(std::lround(c * 255.0));
}

}  // namespace

ImageRecord load_image_pnm(const fs::path& path) {
  const std::string bytes = read_file(path);
  PnmHeaderReader reader(bytes, path);
  const std::string magic = reader.magic();
  int channels = 0;
  if (magic == "P5") {
    channels = 1;
  } else if (magic == "P6") {
    channels = 3;
  } else {
    reader.fail("unsupported magic '" + magic + "' (expected P5 or P6)");
  }
  const long width = reader.number();
  const long height = reader.number();
  const long maxval = reader.number();
  if (width <= 0 || height <= 0) reader.fail("image dimensions must be positive");
  if (maxval != 255) reader.fail("maxval must be 255, got " + std::to_string(maxval));
  reader.single_whitespace();

  const auto count = static_cast<std::size_t>(width * height * channels);
  if (bytes.size() - reader.pos() < count) reader.fail("truncated pixel data");

  ImageRecord img;
  img.channels = channels;
  img.height = static_cast<int>(height);
  img.width = static_cast<int>(width);
  img.pixels.resize(count);
  const auto* raster = reinterpret_cast<const unsigned char*>(bytes.data() + reader.pos());
  const auto plane = static_cast<std::size_t>(width * height);
  // File order is interleaved per pixel; storage is channel-major.
  for (std::size_t p = 0; p < plane; ++p) {
    for (int c = 0; c < channels; ++c) {
      img.pixels[static_cast<std::size_t>(c) * plane + p] =
          static_cast<double>(raster[p * static_cast<std::size_t>(channels) + static_cast<std::size_t>(c)]) / 255.0;
    }
  }
  return img;
}

void save_image_pnm(const fs::path& path, const ImageRecord& image) {
  detail::require(image.channels == 1 || image.channels == 3, "images have 1 or 3 channels");
  const auto plane = static_cast<std::size_t>(image.width) * static_cast<std::size_t>(image.height);
  detail::require(image.pixels.size() == plane * static_cast<std::size_t>(image.channels),
                  "image pixel count does not match its shape");
  auto out = open_out(path);
  out << (image.channels == 1 ? "P5" : "P6") << '\n'
      << image.width << ' ' << image.height << '\n'
      << 255 << '\n';
  std::string raster(plane * static_cast<std::size_t>(image.channels), '\0');
  for (std::size_t p = 0; p < plane; ++p) {
    for (int c = 0; c < image.channels; ++c) {
      raster[p * static_cast<std::size_t>(image.channels) + static_cast<std::size_t>(c)] =
          static_cast<char>(quantize(image.pixels[static_cast<std::size_t>(c) * plane + p]));
    }
  }
  out.write(raster.data(), static_cast<std::streamsize>(raster.size()));
  finish(out, path);
}

ImageRecord image_grid(const std::vector<ImageRecord>& images, int columns) {
  detail::require(!images.empty(), "image grid needs at least one image");
  detail::require(columns >= 1, "image grid needs columns >= 1");
  const ImageRecord& first = images.front();
  for (const auto& img : images) {
    if (img.channels != first.channels || img.height != first.height || img.width != first.width) {
      throw InvalidArgument("image grid tiles must all have the same shape");
    }
  }
  const int count = static_cast<int>(images.size());
  const int cols = std::min(columns, count);
  const int rows = (count + cols - 1) / cols;

  ImageRecord grid;
  grid.channels = 3;
  grid.width = cols * first.width + (cols - 1);
  grid.height = rows * first.height + (rows - 1);
  grid.pixels.assign(static_cast<std::size_t>(3 * grid.width * grid.height), 0.0);
  for (int t = 0; t < count; ++t) {
    const int top = (t / cols) * (first.height + 1);
    const int left = (t % cols) * (first.width + 1);
    const ImageRecord& img = images[static_cast<std::size_t>(t)];
    for (int c = 0; c < 3; ++c) {
      const int src_c = img.channels == 1 ? 0 : c;
      for (int r = 0; r < img.height; ++r) {
        for (int col = 0; col < img.width; ++col) {
          grid.pixels[static_cast<std::size_t>((c * grid.height + top + r) * grid.width + left + col)] =
              img.at(src_c, r, col);
        }
      }
    }
  }
  return grid;
}

void save_image_grid(const std::vector<ImageRecord>& images, int columns, const fs::path& path) {
  save_image_pnm(path, image_grid(images, columns));
}

std::vector<ImageRecord> load_image_directory(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("'" + dir.string() + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto ext = entry.path().extension();
    if (entry.is_regular_file() && (ext == ".pgm" || ext == ".ppm")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw IoError("'" + dir.string() + "' contains no .pgm/.ppm images");
  std::vector<ImageRecord> images;
  images.reserve(files.size());
  for (const auto& f : files) images.push_back(load_image_pnm(f));
  return images;
}

}  // namespace kmm

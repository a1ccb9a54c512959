#include "pwfit/instance_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include "pwfit/error.hpp"

namespace pwfit {

ImageFormat image_format_from_string(const std::string& name) {
  if (name == "pgm") return ImageFormat::pgm;
  if (name == "csv") return ImageFormat::csv;
  throw InvalidArgument("unknown image format '" + name + "' (expected pgm or csv)");
}

ImageFormat image_format_from_path(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".pgm") return ImageFormat::pgm;
  if (ext == ".csv") return ImageFormat::csv;
  throw InvalidArgument("cannot infer image format of '" + path.string() + "'; pass --format");
}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; }

class PgmReader {
 public:
  explicit PgmReader(std::string_view bytes) : b_(bytes) {}

  // Header integer, skipping whitespace and '#' comments.
  long header_int(const char* field) {
    skip_header_space();
    if (pos_ >= b_.size()) throw ParseError(std::string("PGM truncated before ") + field, pos_);
    return read_uint(field);
  }

  long raster_ascii() {
    while (pos_ < b_.size() && is_space(b_[pos_])) ++pos_;
    if (pos_ >= b_.size()) throw ParseError("PGM truncated in pixel data", pos_);
    return read_uint("pixel value");
  }

  long raster_binary(int bytes_per_sample) {
    if (pos_ + bytes_per_sample > b_.size()) throw ParseError("PGM truncated in pixel data", pos_);
    long v = static_cast<unsigned char>(b_[pos_]);
    if (bytes_per_sample == 2) v = (v << 8) | static_cast<unsigned char>(b_[pos_ + 1]);
    pos_ += bytes_per_sample;
    return v;
  }

  // Exactly one whitespace byte separates maxval from binary pixel data.
  void single_separator() {
    if (pos_ >= b_.size()) throw ParseError("PGM truncated after header", pos_);
    if (!is_space(b_[pos_])) throw ParseError("PGM header not followed by whitespace", pos_);
    ++pos_;
  }

  std::string_view magic() {
    if (b_.size() < 2) throw ParseError("PGM truncated in magic number", b_.size());
    pos_ = 2;
    return b_.substr(0, 2);
  }

 private:
  void skip_header_space() {
    while (pos_ < b_.size()) {
      if (is_space(b_[pos_])) {
        ++pos_;
      } else if (b_[pos_] == '#') {
        while (pos_ < b_.size() && b_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  long read_uint(const char* field) {
    const char* first = b_.data() + pos_;
    const char* last = b_.data() + b_.size();
    long value = 0;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || value < 0)
      throw ParseError(std::string("PGM expected a non-negative integer for ") + field, pos_);
    pos_ += static_cast<std::size_t>(ptr - first);
    return value;
  }

  std::string_view b_;
  std::size_t pos_ = 0;
};

}  // namespace

GridInstance parse_pgm(std::string_view bytes) {
  PgmReader in(bytes);
  const std::string_view magic = in.magic();
  if (magic != "P2" && magic != "P5") throw ParseError("not a PGM file (expected P2 or P5)", 0);
  const long cols = in.header_int("width");
  const long rows = in.header_int("height");
  const long maxval = in.header_int("maxval");
  if (rows == 0 || cols == 0) throw ParseError("PGM image is empty", 0);
  if (maxval < 1 || maxval > 65535) throw ParseError("PGM maxval out of range", 0);
  if (rows * cols < 2) throw InvalidArgument("image needs at least two pixels");

  std::vector<double> y(static_cast<std::size_t>(rows * cols));
  if (magic == "P2") {
    for (double& v : y) {
      const long raw = in.raster_ascii();
      if (raw > maxval) throw ParseError("PGM pixel exceeds maxval", 0);
      v = static_cast<double>(raw) / static_cast<double>(maxval);
    }
  } else {
    in.single_separator();
    const int width = maxval < 256 ? 1 : 2;
    for (double& v : y) {
      const long raw = in.raster_binary(width);
      v = static_cast<double>(std::min(raw, maxval)) / static_cast<double>(maxval);
    }
  }
  return GridInstance(static_cast<int>(rows), static_cast<int>(cols), std::move(y));
}

GridInstance parse_csv(std::string_view text) {
  std::vector<double> y;
  int rows = 0;
  std::size_t cols = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::size_t line_start = pos;
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;

    std::size_t count = 0;
    std::size_t k = 0;
    while (k < line.size()) {
      while (k < line.size() && (is_space(line[k]) || line[k] == ',')) ++k;
      if (k >= line.size()) break;
      std::size_t stop = k;
      while (stop < line.size() && !is_space(line[stop]) && line[stop] != ',') ++stop;
      double value = 0.0;
      auto [ptr, ec] = std::from_chars(line.data() + k, line.data() + stop, value);
      if (ec != std::errc() || ptr != line.data() + stop)
        throw ParseError("CSV field is not a number", line_start + k);
      y.push_back(value);
      ++count;
      k = stop;
    }
    if (count == 0) continue;
    if (rows == 0) cols = count;
    else if (count != cols)
      throw ParseError("CSV row has " + std::to_string(count) + " fields, expected " +
                           std::to_string(cols), line_start);
    ++rows;
  }
  if (rows == 0) throw ParseError("CSV image is empty", text.size());
  if (y.size() < 2) throw InvalidArgument("image needs at least two pixels");

  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  if (*lo < 0.0 || *hi > 1.0) {
    const double min = *lo, span = *hi - *lo;
    for (double& v : y) v = span > 0.0 ? (v - min) / span : 0.0;
  }
  return GridInstance(rows, static_cast<int>(cols), std::move(y));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

GridInstance load_image(const std::filesystem::path& path, ImageFormat format) {
  const std::string bytes = read_file(path);
  return format == ImageFormat::pgm ? parse_pgm(bytes) : parse_csv(bytes);
}

std::string to_pgm(int rows, int cols, const std::vector<double>& values) {
  if (static_cast<std::size_t>(rows) * cols != values.size())
    throw InvalidArgument("to_pgm: size mismatch");
  std::string out = "P5\n" + std::to_string(cols) + " " + std::to_string(rows) + "\n255\n";
  for (double v : values) {
    const double c = std::clamp(v, 0.0, 1.0);
    out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(c * 255.0))));
  }
  return out;
}

std::string to_csv(int rows, int cols, const std::vector<double>& values) {
  if (static_cast<std::size_t>(rows) * cols != values.size())
    throw InvalidArgument("to_csv: size mismatch");
  std::string out;
  char buf[32];
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, values[i * cols + j]);
      if (j) out.push_back(',');
      out.append(buf, ptr);
    }
    out.push_back('\n');
  }
  return out;
}

std::string labels_to_csv(int rows, int cols, const std::vector<int>& labels) {
  if (static_cast<std::size_t>(rows) * cols != labels.size())
    throw InvalidArgument("labels_to_csv: size mismatch");
  std::string out;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      if (j) out.push_back(',');
      out += std::to_string(labels[i * cols + j]);
    }
    out.push_back('\n');
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw Error("write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    std::filesystem::remove(tmp, ignored);
    throw Error("cannot rename '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
  }
}

}  // namespace pwfit

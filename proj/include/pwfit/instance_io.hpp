#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pwfit/formulation.hpp"
#include "pwfit/postprocess.hpp"
#include "pwfit/segmentation.hpp"
#include "pwfit/separation.hpp"

namespace pwfit {

// ---------------------------------------------------------------- images

enum class ImageFormat { pgm, csv };

ImageFormat image_format_from_string(const std::string& name);
/// From the extension (.pgm / .csv); throws InvalidArgument otherwise.
ImageFormat image_format_from_path(const std::filesystem::path& path);

/// PGM (P2 or P5, 8 or 16 bit): y = value / maxval.
GridInstance parse_pgm(std::string_view bytes);
/// Comma- or whitespace-separated rows of reals. Values inside [0,1] are kept
/// verbatim; otherwise the image is min-max scaled to [0,1].
GridInstance parse_csv(std::string_view text);
GridInstance load_image(const std::filesystem::path& path, ImageFormat format);

/// 8-bit binary PGM; values are clipped to [0,1] and scaled to 255.
std::string to_pgm(int rows, int cols, const std::vector<double>& values);
/// Full-precision CSV, one image row per line.
std::string to_csv(int rows, int cols, const std::vector<double>& values);
std::string labels_to_csv(int rows, int cols, const std::vector<int>& labels);

/// Writes via a temporary file in the same directory and renames it.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

// ------------------------------------------------------------- synthetic

/// mask(row, col, rows, cols) selects the nodes of one piece.
struct PieceSpec {
  std::function<bool(int, int, int, int)> mask;
  Plane plane;  // in pixel coordinates z = (row, col)
};

struct SyntheticSpec {
  std::string name;
  int rows = 20;
  int cols = 30;
  std::vector<PieceSpec> pieces;
  double noise_sigma2 = 0.0;  // variance of the additive Gaussian noise
  std::uint64_t seed = 0;
};

struct SyntheticInstance {
  GridInstance instance;
  std::vector<double> clean;
  Segmentation truth;  // connected pieces of the masks
  int clipped_pixels = 0;
};

/// Deterministic for a given seed. Throws InvalidArgument when masks
/// overlap or leave a node uncovered, or a clean value falls outside [0,1].
SyntheticInstance generate_synthetic(const SyntheticSpec& spec);

/// Built-in piecewise-planar scenes: "cross" (four facets split by two
/// slanted lines), "plus" (a background crossed by a vertical and a
/// horizontal band), "terraces" (three diagonal stripes). Every row and
/// column crosses at least one discontinuity.
SyntheticSpec builtin_synthetic(const std::string& name, int rows, int cols,
                                double noise_sigma2 = 0.0, std::uint64_t seed = 0);
std::vector<std::string> builtin_synthetic_names();

// --------------------------------------------------------------- reports

struct InstanceDescriptor {
  std::string source;  // file path or "synthetic:<name>"
  int rows = 0;
  int cols = 0;
  std::optional<double> noise_sigma2;
  std::optional<std::uint64_t> seed;
  int clipped_pixels = 0;
};

struct RunReport {
  static constexpr int kFormatVersion = 1;

  int format_version = kFormatVersion;
  InstanceDescriptor instance;
  std::string variant;
  std::string backend;
  double xi = 0.0;
  double big_m = 2.0;
  double time_limit = 0.0;
  double gap_target = 0.0;
  std::string norm = "l1";
  std::vector<double> lambda_row;
  std::vector<double> lambda_col;

  std::string status;  // SolveStatus name, or "heuristic" for heuristic-only runs
  double objective = 0.0;
  std::optional<double> best_bound;  // absent for heuristic-only runs
  std::optional<double> gap;
  std::optional<std::int64_t> node_count;
  double wall_time = 0.0;
  int rounds = 0;
  int cuts_added = 0;
  int initial_cuts = 0;
  std::optional<double> warm_start_objective;
  std::optional<double> first_objective;
  bool repaired = false;
  std::vector<RoundTrace> trace;
  Metrics metrics;
};

std::string report_to_json(const RunReport& report);
RunReport report_from_json(std::string_view json);
void write_report(const RunReport& report, const std::filesystem::path& path);
RunReport read_report(const std::filesystem::path& path);

/// CPLEX LP text for debugging a model with any solver.
std::string to_lp_format(const ModelDescription& model);

}  // namespace pwfit

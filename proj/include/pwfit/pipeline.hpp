#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pwfit/formulation.hpp"
#include "pwfit/instance_io.hpp"
#include "pwfit/postprocess.hpp"
#include "pwfit/separation.hpp"
#include "pwfit/solver_backend.hpp"

namespace pwfit {

inline constexpr const char* kHeuristicVariant = "heuristic";

struct RunConfig {
  std::string variant = "mph-4";  // a solver variant or kHeuristicVariant
  double xi = 0.5;
  SolveLimits limits;
  FitNorm norm = FitNorm::l1;
  std::string backend;  // empty: selected_backend()
  RoundCallback on_round;
};

struct RunResult {
  Params params;
  std::optional<FitSolution> solution;  // empty for heuristic-only runs
  std::vector<double> w;                // empty when no incumbent was found
  EdgeLabeling x;
  Segmentation segmentation;
  PiecewiseFit pieces;
  Metrics metrics;
  RunReport report;

  bool has_fit() const { return !w.empty(); }
};

/// Lambdas from xi, then the exact solve or the heuristic, then piece
/// fitting and metrics. Ground truth, when given, adds the accuracy metrics.
RunResult run_instance(const GridInstance& instance, const RunConfig& config,
                       const InstanceDescriptor& descriptor, const GroundTruth* truth = nullptr);

/// Renders every artifact before writing any, then writes each one
/// atomically: <stem>_w.{pgm,csv}, <stem>_f.{pgm,csv}, <stem>_labels.csv and
/// <stem>_report.json. Runs without an incumbent write only the report.
std::vector<std::filesystem::path> write_artifacts(const RunResult& result, int rows, int cols,
                                                   const std::filesystem::path& dir,
                                                   const std::string& stem);

/// Median of the values; mean of the middle two for even counts.
double median(std::vector<double> values);

struct SweepConfig {
  std::vector<std::pair<int, int>> sizes{{20, 30}};
  std::vector<double> noise{0.0};
  std::vector<std::string> variants{"mph-4"};
  std::vector<std::string> scenes;  // empty: every built-in scene
  int repeats = 3;
  double xi = 0.5;
  SolveLimits limits;
  FitNorm norm = FitNorm::l1;
  std::uint64_t seed = 1;
  int jobs = 1;
  std::string backend;
};

/// One cell of the sweep: medians over the repeats.
struct SweepRow {
  std::string scene;
  int rows = 0;
  int cols = 0;
  double noise = 0.0;
  std::string variant;
  int repeats = 0;
  std::string statuses;  // per-repeat status names joined by '/'
  double wall_time = 0.0;
  std::optional<double> nodes;
  std::optional<double> gap;
  double cuts_added = 0.0;
  double objective = 0.0;
  double segments = 0.0;
  double rand_index = 0.0;
};

/// Each (scene, size, noise) triple gets one instance seeded from
/// config.seed; every variant and repeat solves that same instance.
/// Reports are returned in cell order when `reports` is non-null.
std::vector<SweepRow> run_sweep(const SweepConfig& config,
                                std::vector<RunReport>* reports = nullptr);
std::string sweep_table_csv(const std::vector<SweepRow>& rows);

/// One run per xi / per time limit on a fixed instance.
std::vector<RunResult> sweep_xi(const GridInstance& instance, const RunConfig& config,
                                const InstanceDescriptor& descriptor,
                                const std::vector<double>& xis,
                                const GroundTruth* truth = nullptr);
std::vector<RunResult> sweep_time_limits(const GridInstance& instance, const RunConfig& config,
                                         const InstanceDescriptor& descriptor,
                                         const std::vector<double>& limits,
                                         const GroundTruth* truth = nullptr);

/// Deterministic seed for a sweep cell.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t key);

}  // namespace pwfit

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pwfit/formulation.hpp"
#include "pwfit/grid.hpp"
#include "pwfit/segmentation.hpp"
#include "pwfit/separation.hpp"

namespace pwfit {

/// Segments are the dormant-edge components of x. Throws InfeasibleLabeling
/// when some active edge lies inside a component.
Segmentation labels_from_edges(const GridGraph& g, const EdgeLabeling& x);

struct AffinePiece {
  double a1 = 0.0;  // slope along z1 (rows; chain position on a single row)
  double a2 = 0.0;  // slope along z2 (columns); 0 on a chain
  double b = 0.0;
  int segment_id = 0;
  double fit_residual = 0.0;  // sum of absolute residuals over the segment

  Plane plane() const { return {a1, a2, b}; }
};

enum class FitNorm { l1, l2 };

const char* to_string(FitNorm norm);
FitNorm fit_norm_from_string(const std::string& name);

/// Coordinates of a node as used by AffinePiece.
std::pair<double, double> piece_coordinates(const GridGraph& g, NodeId v);
double evaluate_piece(const AffinePiece& piece, const GridGraph& g, NodeId v);

struct PiecewiseFit {
  std::vector<AffinePiece> pieces;  // indexed by segment label
  std::vector<double> f;            // fitted image, row-major
};

/// One plane per segment: least squares in closed form (l2) or least
/// absolute deviations through an LP on the solver backend (l1). Axes
/// without spread in a segment keep slope 0; single nodes are constant.
PiecewiseFit fit_pieces(const GridInstance& instance, const Segmentation& seg, FitNorm norm,
                        const std::string& backend = {});

/// Fraction of node pairs on which two partitions agree.
double rand_index(const std::vector<int>& a, const std::vector<int>& b);

struct Metrics {
  double fit_term = 0.0;             // sum |w - y|
  double regularization_term = 0.0;  // sum lambda_e x_e
  double objective = 0.0;
  int segment_count = 0;
  int boundary_length = 0;  // active edges
  // From the solve; absent for heuristic-only runs.
  std::optional<double> best_bound;
  std::optional<double> gap;
  std::optional<std::int64_t> nodes;
  std::optional<int> cuts_added;
  std::optional<int> rounds;
  // Against ground truth when supplied.
  std::optional<bool> exact_match;
  std::optional<double> rand_index;
  std::optional<double> mae_w;  // vs the clean image
  std::optional<double> mae_f;
};

struct GroundTruth {
  std::vector<int> labels;
  std::vector<double> clean;  // noise-free image
};

/// `solution` is null for heuristic-only runs, which leaves the solver
/// fields empty.
Metrics evaluate(const GridInstance& instance, const Params& params, const FitSolution* solution,
                 const std::vector<double>& w, const EdgeLabeling& x, const Segmentation& seg,
                 const PiecewiseFit& pieces, const GroundTruth* truth = nullptr);

}  // namespace pwfit

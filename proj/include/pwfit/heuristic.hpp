#pragma once

#include <map>
#include <vector>

#include "pwfit/formulation.hpp"
#include "pwfit/grid.hpp"
#include "pwfit/segmentation.hpp"

namespace pwfit {

/// Per-node starting plane: the least-squares fit of the 2x2 node block with
/// the smallest MSE among the blocks containing the node.
struct NodeAffineInit {
  Plane params;
  int source_group = 0;      // top-left corner node of the winning block
  int candidate_groups = 0;  // 4 inside, 2 on a border, 1 in a corner
  double mse = 0.0;
};

/// Requires at least a 2x2 grid.
std::vector<NodeAffineInit> init_node_params(const GridInstance& instance);

/// tau_i * tau_j * |Y_i - Y_j|_2 <= kappa * gamma_ij * (tau_i + tau_j)
bool merge_test(double tau_i, double tau_j, const Plane& y_i, const Plane& y_j,
                double gamma_ij, double kappa);

/// kappa_t = kappa_0 * growth^t for t = 0..rounds, kappa_0 = target / growth^rounds,
/// so the last round runs at kappa = target.
struct KappaSchedule {
  int rounds = 16;
  double growth = 2.0;

  double kappa(int t, double target) const;
};

/// Mutable region-fusion state, exposed round by round.
class RegionFusion {
 public:
  struct SegmentState {
    int tau = 0;
    Plane params;
    PlaneStats stats;
    std::vector<NodeId> members;
    std::map<int, int> gamma;  // neighbor segment -> shared grid edges
  };

  RegionFusion(const GridInstance& instance, double target_kappa, KappaSchedule schedule = {});

  /// Runs the current round at kappa_t and returns the number of merges.
  /// done() turns true after the last round.
  int run_round();
  bool done() const { return round_ > schedule_.rounds; }
  int round() const { return round_; }
  double current_kappa() const;
  int merges() const { return merges_; }

  /// Live segments keyed by root id.
  const std::map<int, SegmentState>& segments() const { return segments_; }
  int segment_of(NodeId v) { return uf_.find(v); }

  Segmentation segmentation();

 private:
  void merge(int a, int b);

  const GridInstance& instance_;
  double target_;
  KappaSchedule schedule_;
  UnionFind uf_;
  std::map<int, SegmentState> segments_;
  int round_ = 0;
  int merges_ = 0;
};

struct HeuristicResult {
  Segmentation segmentation;
  EdgeLabeling x;
  std::vector<Plane> segment_params;  // indexed by segmentation label
  int rounds = 0;
  int merges = 0;
};

/// Runs every round with target kappa = mean of all row/column lambdas.
HeuristicResult region_fusion(const GridInstance& instance, const Params& params,
                              const KappaSchedule& schedule = {});

/// x_e = 1 iff the endpoints of e carry different labels.
EdgeLabeling segmentation_to_edges(const Segmentation& seg, const GridGraph& g);

}  // namespace pwfit

#include "pwfit/heuristic.hpp"

#include <cmath>
#include <limits>

#include "pwfit/error.hpp"

namespace pwfit {

std::vector<NodeAffineInit> init_node_params(const GridInstance& instance) {
  const GridGraph& g = instance.graph();
  const int m = g.rows(), n = g.cols();
  if (m < 2 || n < 2) throw InvalidArgument("node initialization needs at least a 2x2 grid");

  // Fit every 2x2 block once, keyed by its top-left node.
  std::vector<Plane> block_plane(g.num_nodes());
  std::vector<double> block_mse(g.num_nodes(), std::numeric_limits<double>::infinity());
  for (int i = 0; i + 1 < m; ++i) {
    for (int j = 0; j + 1 < n; ++j) {
      PlaneStats s;
      for (int di = 0; di < 2; ++di)
        for (int dj = 0; dj < 2; ++dj) s.add(i + di, j + dj, instance(i + di, j + dj));
      const Plane p = s.fit();
      block_plane[g.node(i, j)] = p;
      block_mse[g.node(i, j)] = s.squared_error(p) / 4.0;
    }
  }

  std::vector<NodeAffineInit> out(g.num_nodes());
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      NodeAffineInit& init = out[g.node(i, j)];
      init.mse = std::numeric_limits<double>::infinity();
      for (int ti = i - 1; ti <= i; ++ti) {
        for (int tj = j - 1; tj <= j; ++tj) {
          if (ti < 0 || tj < 0 || ti + 1 >= m || tj + 1 >= n) continue;
          ++init.candidate_groups;
          const NodeId top_left = g.node(ti, tj);
          if (block_mse[top_left] < init.mse) {
            init.mse = block_mse[top_left];
            init.params = block_plane[top_left];
            init.source_group = top_left;
          }
        }
      }
    }
  }
  return out;
}

bool merge_test(double tau_i, double tau_j, const Plane& y_i, const Plane& y_j, double gamma_ij,
                double kappa) {
  return tau_i * tau_j * plane_distance(y_i, y_j) <= kappa * gamma_ij * (tau_i + tau_j);
}

double KappaSchedule::kappa(int t, double target) const {
  return target * std::pow(growth, t - rounds);
}

RegionFusion::RegionFusion(const GridInstance& instance, double target_kappa, KappaSchedule schedule)
    : instance_(instance),
      target_(target_kappa),
      schedule_(schedule),
      uf_(instance.size()) {
  if (schedule_.rounds < 0 || !(schedule_.growth > 1.0))
    throw InvalidArgument("kappa schedule needs rounds >= 0 and growth > 1");
  const GridGraph& g = instance.graph();
  const std::vector<NodeAffineInit> init = init_node_params(instance);
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    SegmentState& s = segments_[v];
    s.tau = 1;
    s.params = init[v].params;
    s.stats.add(g.row_of(v), g.col_of(v), instance.values()[v]);
    s.members = {v};
  }
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    const Edge ed = g.edge(e);
    segments_[ed.u].gamma[ed.v] += 1;
    segments_[ed.v].gamma[ed.u] += 1;
  }
}

double RegionFusion::current_kappa() const { return schedule_.kappa(round_, target_); }

int RegionFusion::run_round() {
  if (done()) return 0;
  const GridGraph& g = instance_.graph();
  const double kappa = current_kappa();
  int merged = 0;
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    const int a = uf_.find(g.edge(e).u);
    const int b = uf_.find(g.edge(e).v);
    if (a == b) continue;
    const SegmentState& sa = segments_.at(a);
    const SegmentState& sb = segments_.at(b);
    if (merge_test(sa.tau, sb.tau, sa.params, sb.params, sa.gamma.at(b), kappa)) {
      merge(a, b);
      ++merged;
    }
  }
  ++round_;
  merges_ += merged;
  return merged;
}

void RegionFusion::merge(int a, int b) {
  const int root = uf_.unite(a, b);
  const int gone = root == a ? b : a;
  SegmentState absorbed = std::move(segments_.at(gone));
  segments_.erase(gone);
  SegmentState& keep = segments_.at(root);

  keep.tau += absorbed.tau;
  keep.stats.merge(absorbed.stats);
  keep.params = keep.stats.fit();
  keep.members.insert(keep.members.end(), absorbed.members.begin(), absorbed.members.end());

  keep.gamma.erase(gone);
  for (const auto& [other, count] : absorbed.gamma) {
    if (other == root) continue;
    keep.gamma[other] += count;
    std::map<int, int>& back = segments_.at(other).gamma;
    back.erase(gone);
    back[root] += count;
  }
}

Segmentation RegionFusion::segmentation() {
  std::vector<int> labels(instance_.size());
  for (NodeId v = 0; v < instance_.size(); ++v) labels[v] = uf_.find(v);
  return Segmentation::from_labels(instance_.graph(), labels);
}

HeuristicResult region_fusion(const GridInstance& instance, const Params& params,
                              const KappaSchedule& schedule) {
  RegionFusion fusion(instance, params.mean_lambda(), schedule);
  while (!fusion.done()) fusion.run_round();

  HeuristicResult out;
  out.segmentation = fusion.segmentation();
  out.x = segmentation_to_edges(out.segmentation, instance.graph());
  out.segment_params.resize(out.segmentation.num_segments());
  for (int s = 0; s < out.segmentation.num_segments(); ++s)
    out.segment_params[s] =
        fusion.segments().at(fusion.segment_of(out.segmentation.segments[s].front())).params;
  out.rounds = fusion.round();
  out.merges = fusion.merges();
  return out;
}

EdgeLabeling segmentation_to_edges(const Segmentation& seg, const GridGraph& g) {
  if (static_cast<int>(seg.labels.size()) != g.num_nodes())
    throw InvalidArgument("segmentation does not match the grid");
  EdgeLabeling x(g.num_edges(), 0);
  for (EdgeId e = 0; e < g.num_edges(); ++e)
    x[e] = seg.labels[g.edge(e).u] != seg.labels[g.edge(e).v];
  return x;
}

}  // namespace pwfit

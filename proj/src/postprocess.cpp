#include "pwfit/postprocess.hpp"

#include <cmath>
#include <limits>
#include <map>

#include "pwfit/error.hpp"
#include "pwfit/solver_backend.hpp"

namespace pwfit {

Segmentation labels_from_edges(const GridGraph& g, const EdgeLabeling& x) {
  Segmentation seg = Segmentation::from_labels(g, connected_components(g, x));
  std::vector<EdgeId> active;
  for (EdgeId e = 0; e < g.num_edges(); ++e)
    if (x[e]) active.push_back(e);
  if (active != seg.boundary)
    throw InfeasibleLabeling("edge labeling is not a multicut: " +
                             std::to_string(active.size() - seg.boundary.size()) +
                             " active edges lie inside a segment");
  return seg;
}

const char* to_string(FitNorm norm) { return norm == FitNorm::l1 ? "l1" : "l2"; }

FitNorm fit_norm_from_string(const std::string& name) {
  if (name == "l1") return FitNorm::l1;
  if (name == "l2") return FitNorm::l2;
  throw InvalidArgument("unknown norm '" + name + "' (expected l1 or l2)");
}

std::pair<double, double> piece_coordinates(const GridGraph& g, NodeId v) {
  if (g.rows() == 1) return {static_cast<double>(g.col_of(v)), 0.0};
  return {static_cast<double>(g.row_of(v)), static_cast<double>(g.col_of(v))};
}

double evaluate_piece(const AffinePiece& piece, const GridGraph& g, NodeId v) {
  const auto [z1, z2] = piece_coordinates(g, v);
  return piece.a1 * z1 + piece.a2 * z2 + piece.b;
}

namespace {

std::vector<PlaneStats> segment_stats(const GridInstance& instance, const Segmentation& seg) {
  const GridGraph& g = instance.graph();
  std::vector<PlaneStats> stats(seg.num_segments());
  for (int s = 0; s < seg.num_segments(); ++s) {
    for (NodeId v : seg.segments[s]) {
      const auto [z1, z2] = piece_coordinates(g, v);
      stats[s].add(z1, z2, instance.values()[v]);
    }
  }
  return stats;
}

// Least absolute deviations for all segments in one block-separable LP.
// Columns: [a1, a2, b] per segment, then eps+ and eps- per node.
std::vector<Plane> l1_planes(const GridInstance& instance, const Segmentation& seg,
                             const std::vector<PlaneStats>& stats, const std::string& backend) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const GridGraph& g = instance.graph();
  const int nseg = seg.num_segments();
  const int nnodes = g.num_nodes();
  ModelDescription lp;
  for (int s = 0; s < nseg; ++s) {
    const auto [use1, use2] = stats[s].fitted_axes();
    const std::string tag = std::to_string(s);
    lp.variables.push_back({"a1_" + tag, use1 ? -kInf : 0.0, use1 ? kInf : 0.0, 0.0, false});
    lp.variables.push_back({"a2_" + tag, use2 ? -kInf : 0.0, use2 ? kInf : 0.0, 0.0, false});
    lp.variables.push_back({"b_" + tag, -kInf, kInf, 0.0, false});
  }
  const int ep0 = 3 * nseg, em0 = 3 * nseg + nnodes;
  for (NodeId v = 0; v < nnodes; ++v)
    lp.variables.push_back({"ep_" + std::to_string(v), 0.0, kInf, 1.0, false});
  for (NodeId v = 0; v < nnodes; ++v)
    lp.variables.push_back({"em_" + std::to_string(v), 0.0, kInf, 1.0, false});
  for (NodeId v = 0; v < nnodes; ++v) {
    const int s = seg.labels[v];
    const auto [z1, z2] = piece_coordinates(g, v);
    const double y = instance.values()[v];
    LinearConstraint row{{}, y, y, ConstraintTag::residual_link};
    if (z1 != 0.0) row.terms.push_back({3 * s, z1});
    if (z2 != 0.0) row.terms.push_back({3 * s + 1, z2});
    row.terms.push_back({3 * s + 2, 1.0});
    row.terms.push_back({ep0 + v, -1.0});
    row.terms.push_back({em0 + v, 1.0});
    lp.constraints.push_back(std::move(row));
  }

  std::unique_ptr<SolverHandle> handle = load_model(lp, backend);
  SolveLimits limits;
  limits.time_limit = 1e6;
  SolveReport report = handle->solve(limits);
  if (report.status != SolveStatus::optimal)
    throw BackendError(std::string("l1 piece fit ended with status ") + to_string(report.status));
  std::vector<Plane> planes(nseg);
  for (int s = 0; s < nseg; ++s)
    planes[s] = {report.solution[3 * s], report.solution[3 * s + 1], report.solution[3 * s + 2]};
  return planes;
}

}  // namespace

PiecewiseFit fit_pieces(const GridInstance& instance, const Segmentation& seg, FitNorm norm,
                        const std::string& backend) {
  const GridGraph& g = instance.graph();
  if (static_cast<int>(seg.labels.size()) != g.num_nodes())
    throw InvalidArgument("segmentation does not match the instance");
  const std::vector<PlaneStats> stats = segment_stats(instance, seg);

  std::vector<Plane> planes;
  if (norm == FitNorm::l2) {
    for (const PlaneStats& s : stats) planes.push_back(s.fit());
  } else {
    planes = l1_planes(instance, seg, stats, backend);
  }

  PiecewiseFit out;
  out.f.resize(g.num_nodes());
  for (int s = 0; s < seg.num_segments(); ++s) {
    AffinePiece piece{planes[s].a1, planes[s].a2, planes[s].b, s, 0.0};
    for (NodeId v : seg.segments[s]) {
      out.f[v] = evaluate_piece(piece, g, v);
      piece.fit_residual += std::abs(out.f[v] - instance.values()[v]);
    }
    out.pieces.push_back(piece);
  }
  return out;
}

double rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw InvalidArgument("rand_index: label maps differ in size");
  const auto n = static_cast<std::int64_t>(a.size());
  if (n < 2) return 1.0;
  auto pairs = [](std::int64_t k) { return k * (k - 1) / 2; };
  std::map<int, std::int64_t> count_a, count_b;
  std::map<std::pair<int, int>, std::int64_t> joint;
  for (std::size_t k = 0; k < a.size(); ++k) {
    ++count_a[a[k]];
    ++count_b[b[k]];
    ++joint[{a[k], b[k]}];
  }
  std::int64_t same_both = 0, same_a = 0, same_b = 0;
  for (const auto& [key, c] : joint) same_both += pairs(c);
  for (const auto& [key, c] : count_a) same_a += pairs(c);
  for (const auto& [key, c] : count_b) same_b += pairs(c);
  const std::int64_t total = pairs(n);
  const std::int64_t disagreements = same_a + same_b - 2 * same_both;
  return static_cast<double>(total - disagreements) / static_cast<double>(total);
}

Metrics evaluate(const GridInstance& instance, const Params& params, const FitSolution* solution,
                 const std::vector<double>& w, const EdgeLabeling& x, const Segmentation& seg,
                 const PiecewiseFit& pieces, const GroundTruth* truth) {
  const GridGraph& g = instance.graph();
  const auto nodes = static_cast<std::size_t>(g.num_nodes());
  if (w.size() != nodes || x.size() != static_cast<std::size_t>(g.num_edges()) ||
      seg.labels.size() != nodes || pieces.f.size() != nodes)
    throw InvalidArgument("evaluate: shape mismatch");

  Metrics m;
  const ObjectiveTerms terms = objective_terms(instance, params, w, x);
  m.fit_term = terms.fit;
  m.regularization_term = terms.regularization;
  m.objective = terms.total();
  m.segment_count = seg.num_segments();
  for (std::uint8_t active : x) m.boundary_length += active;

  if (solution) {
    m.best_bound = solution->best_bound;
    m.gap = solution->gap;
    m.nodes = solution->node_count;
    m.cuts_added = solution->cuts_added;
    m.rounds = solution->rounds;
  }
  if (truth) {
    if (truth->labels.size() != nodes || truth->clean.size() != nodes)
      throw InvalidArgument("evaluate: ground truth shape mismatch");
    m.exact_match = same_partition(seg.labels, truth->labels);
    m.rand_index = rand_index(seg.labels, truth->labels);
    double ew = 0.0, ef = 0.0;
    for (std::size_t v = 0; v < nodes; ++v) {
      ew += std::abs(w[v] - truth->clean[v]);
      ef += std::abs(pieces.f[v] - truth->clean[v]);
    }
    m.mae_w = ew / static_cast<double>(nodes);
    m.mae_f = ef / static_cast<double>(nodes);
  }
  return m;
}

}  // namespace pwfit

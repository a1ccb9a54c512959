#include "pwfit/separation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <limits>

#include "pwfit/error.hpp"
#include "pwfit/heuristic.hpp"

namespace pwfit {

MulticutCut make_cut(std::vector<EdgeId> cycle_edges, EdgeId violated) {
  std::sort(cycle_edges.begin(), cycle_edges.end());
  if (!std::binary_search(cycle_edges.begin(), cycle_edges.end(), violated))
    throw InvalidArgument("cut edge is not on its cycle");
  return {std::move(cycle_edges), violated};
}

bool cut_satisfied(const MulticutCut& cut, const EdgeLabeling& x) {
  int others = 0;
  for (EdgeId e : cut.cycle)
    if (e != cut.violated) others += x[e];
  return others >= x[cut.violated];
}

bool CutPool::insert(const MulticutCut& cut) {
  if (!seen_.insert(cut).second) return false;
  cuts_.push_back(cut);
  return true;
}

SeparationOutcome check_feasibility(const GridGraph& g, const EdgeLabeling& x) {
  const std::vector<int> comp = connected_components(g, x);
  SeparationOutcome out;
  for (EdgeId e = 0; e < g.num_edges(); ++e)
    if (x[e] && comp[g.edge(e).u] == comp[g.edge(e).v]) out.violated_edges.push_back(e);
  out.feasible = out.violated_edges.empty();
  return out;
}

const char* to_string(SearchMode mode) {
  return mode == SearchMode::plain ? "plain" : "facet_defining";
}

namespace {

int manhattan(const GridGraph& g, NodeId a, NodeId b) {
  return std::abs(g.row_of(a) - g.row_of(b)) + std::abs(g.col_of(a) - g.col_of(b));
}

// Depth-limited enumeration of dormant simple paths source -> target.
class PathSearch {
 public:
  PathSearch(const GridGraph& g, const EdgeLabeling& x, NodeId source, NodeId target,
             const SearchOptions& opt)
      : g_(g), x_(x), source_(source), target_(target), opt_(opt), on_path_(g.num_nodes(), 0) {}

  std::vector<std::vector<NodeId>> run() {
    path_.push_back(source_);
    on_path_[source_] = 1;
    extend();
    return std::move(found_);
  }

 private:
  bool full() const { return static_cast<int>(found_.size()) >= opt_.max_paths; }
  int edges_on_path() const { return static_cast<int>(path_.size()) - 1; }

  // Any G-neighbor of `nx` on the path other than `allowed_a`/`allowed_b` is a chord.
  bool touches_path(NodeId nx, NodeId allowed_a, NodeId allowed_b) const {
    for (const Incidence& inc : g_.incident(nx))
      if (on_path_[inc.node] && inc.node != allowed_a && inc.node != allowed_b) return true;
    return false;
  }

  void record(NodeId last) {
    found_.push_back(path_);
    if (last != target_) found_.back().push_back(last);
    found_.back().push_back(target_);
  }

  void extend() {
    const NodeId cur = path_.back();
    std::vector<Incidence> next;
    for (const Incidence& inc : g_.incident(cur))
      if (!x_[inc.edge] && !on_path_[inc.node]) next.push_back(inc);
    std::stable_sort(next.begin(), next.end(), [&](const Incidence& a, const Incidence& b) {
      return manhattan(g_, a.node, target_) < manhattan(g_, b.node, target_);
    });

    const bool facet = opt_.mode == SearchMode::facet_defining;
    for (const Incidence& inc : next) {
      if (full()) return;
      const NodeId nx = inc.node;
      const int used = edges_on_path() + 1;  // edges after stepping to nx
      if (nx == target_) {
        if (facet && touches_path(nx, cur, source_)) continue;
        record(nx);
        continue;
      }
      if (used + manhattan(g_, nx, target_) > opt_.max_depth) continue;
      if (facet) {
        if (touches_path(nx, cur, cur)) continue;
        if (g_.adjacent(nx, target_)) {
          // nx would form a chord with the target unless the path closes now.
          const EdgeId closing = *g_.edge_between(nx, target_);
          if (x_[closing] || used + 1 > opt_.max_depth) continue;
          on_path_[nx] = 1;
          const bool chord_free = !touches_path(target_, nx, source_);
          on_path_[nx] = 0;
          if (chord_free) {
            path_.push_back(nx);
            record(target_);
            path_.pop_back();
          }
          continue;
        }
      }
      path_.push_back(nx);
      on_path_[nx] = 1;
      extend();
      on_path_[nx] = 0;
      path_.pop_back();
    }
  }

  const GridGraph& g_;
  const EdgeLabeling& x_;
  NodeId source_, target_;
  const SearchOptions& opt_;
  std::vector<std::uint8_t> on_path_;
  std::vector<NodeId> path_;
  std::vector<std::vector<NodeId>> found_;
};

std::vector<NodeId> shortest_dormant_path(const GridGraph& g, const EdgeLabeling& x, NodeId source,
                                          NodeId target) {
  std::vector<NodeId> parent(g.num_nodes(), -1);
  std::deque<NodeId> queue{source};
  parent[source] = source;
  while (!queue.empty()) {
    const NodeId cur = queue.front();
    queue.pop_front();
    if (cur == target) break;
    for (const Incidence& inc : g.incident(cur)) {
      if (x[inc.edge] || parent[inc.node] >= 0) continue;
      parent[inc.node] = cur;
      queue.push_back(inc.node);
    }
  }
  if (parent[target] < 0) return {};
  std::vector<NodeId> path{target};
  while (path.back() != source) path.push_back(parent[path.back()]);
  std::reverse(path.begin(), path.end());
  return path;
}

// Shrinks a cycle (node order, closed last -> first) to a chordless one by
// repeatedly cutting along the chord that spans the fewest nodes.
std::vector<NodeId> chordless_subcycle(const GridGraph& g, std::vector<NodeId> nodes) {
  for (;;) {
    const int len = static_cast<int>(nodes.size());
    std::vector<int> pos(g.num_nodes(), -1);
    for (int k = 0; k < len; ++k) pos[nodes[k]] = k;
    int best_a = -1, best_b = -1;
    for (int a = 0; a < len; ++a) {
      for (const Incidence& inc : g.incident(nodes[a])) {
        const int b = pos[inc.node];
        if (b <= a + 1 || (a == 0 && b == len - 1)) continue;
        if (best_a < 0 || b - a < best_b - best_a) {
          best_a = a;
          best_b = b;
        }
      }
    }
    if (best_a < 0) return nodes;
    nodes = std::vector<NodeId>(nodes.begin() + best_a, nodes.begin() + best_b + 1);
  }
}

}  // namespace

std::vector<Cycle> find_cycles(const GridGraph& g, const EdgeLabeling& x, EdgeId violated,
                               const SearchOptions& options) {
  if (violated < 0 || violated >= g.num_edges() || !x[violated])
    throw InvalidArgument("find_cycles needs an active edge");
  const Edge ed = g.edge(violated);

  std::vector<Cycle> out;
  for (const std::vector<NodeId>& path : PathSearch(g, x, ed.u, ed.v, options).run()) {
    Cycle c = cycle_from_nodes(g, path);
    if (options.mode == SearchMode::facet_defining && !c.chordless) continue;
    out.push_back(std::move(c));
  }
  if (!out.empty()) return out;

  std::vector<NodeId> path = shortest_dormant_path(g, x, ed.u, ed.v);
  if (path.empty())
    throw InvalidArgument("edge " + std::to_string(violated) +
                          " is not violated: its endpoints are in different components");
  if (options.mode == SearchMode::facet_defining) path = chordless_subcycle(g, std::move(path));
  out.push_back(cycle_from_nodes(g, path));
  return out;
}

EdgeId active_edge_of(const Cycle& cycle, const EdgeLabeling& x) {
  EdgeId active = -1;
  for (EdgeId e : cycle.edges) {
    if (!x[e]) continue;
    if (active >= 0) throw InvalidArgument("cycle has more than one active edge");
    active = e;
  }
  if (active < 0) throw InvalidArgument("cycle has no active edge");
  return active;
}

SeparationOutcome separate(const GridGraph& g, const EdgeLabeling& x, const SearchOptions& options,
                           CutPool& pool, int cut_budget) {
  SeparationOutcome out = check_feasibility(g, x);
  out.facet_only = options.mode == SearchMode::facet_defining;
  if (out.feasible) return out;
  for (EdgeId e : out.violated_edges) {
    if (static_cast<int>(out.new_cuts.size()) >= cut_budget) break;
    for (const Cycle& c : find_cycles(g, x, e, options)) {
      MulticutCut cut = make_cut(c.edges, active_edge_of(c, x));
      if (pool.insert(cut)) out.new_cuts.push_back(std::move(cut));
      if (static_cast<int>(out.new_cuts.size()) >= cut_budget) break;
    }
  }
  return out;
}

VariantConfig variant_from_name(const std::string& name) {
  VariantConfig v;
  v.name = name;
  if (name == "mp") return v;
  v.warm_start = true;
  if (name == "mph") return v;
  if (name == "mph-4") {
    v.initial_cycles = InitialCycles::four;
    return v;
  }
  if (name == "mph-4-8") {
    v.initial_cycles = InitialCycles::four_and_eight;
    return v;
  }
  if (name == "mph-f") {
    v.search.mode = SearchMode::facet_defining;
    return v;
  }
  if (name == "mph-4-f") {
    v.initial_cycles = InitialCycles::four;
    v.search.mode = SearchMode::facet_defining;
    return v;
  }
  throw InvalidArgument("unknown variant '" + name +
                        "' (expected mp, mph, mph-4, mph-4-8, mph-f or mph-4-f)");
}

std::vector<std::string> variant_names() {
  return {"mp", "mph", "mph-4", "mph-4-8", "mph-f", "mph-4-f"};
}

namespace {

double relative_gap(double objective, double bound) {
  return (objective - bound) / std::max(std::abs(objective), 1e-9);
}

}  // namespace

FitSolution cutting_plane_solve(const GridInstance& instance, const Params& params,
                                const VariantConfig& variant, const SolveLimits& limits,
                                const RoundCallback& on_round, const std::string& backend) {
  using clock = std::chrono::steady_clock;
  const auto started = clock::now();
  const GridGraph& g = instance.graph();

  std::vector<Cycle> initial;
  if (variant.initial_cycles != InitialCycles::none) initial = enumerate_4cycles(g);
  if (variant.initial_cycles == InitialCycles::four_and_eight) {
    std::vector<Cycle> eight = enumerate_8cycles(g);
    initial.insert(initial.end(), eight.begin(), eight.end());
  }
  const ModelDescription model = build_2d_model(instance, params, initial);
  std::unique_ptr<SolverHandle> handle = load_model(model, backend);

  FitSolution sol;
  CutPool pool;
  for (const Cycle& c : initial)
    for (EdgeId e : c.edges) pool.insert(make_cut(c.edges, e));
  sol.initial_cuts = static_cast<int>(pool.size());

  std::optional<FixedLabelingFit> warm;
  EdgeLabeling warm_x;
  if (variant.warm_start && g.rows() >= 2 && g.cols() >= 2) {
    warm_x = region_fusion(instance, params).x;
    if (WarmStartAck ack = handle->warm_start(warm_x); ack.accepted) {
      sol.warm_start_objective = ack.objective;
      warm = handle->solve_fixed_labeling(warm_x);
    }
  }

  SolveReport last;
  bool separated_feasible = false;
  for (int round = 0;; ++round) {
    const double elapsed = std::chrono::duration<double>(clock::now() - started).count();
    const double remaining = limits.time_limit - elapsed;
    if (remaining <= 0.0) break;
    SolveLimits round_limits = limits;
    round_limits.time_limit = remaining;
    last = handle->solve(round_limits);
    sol.node_count += last.node_count;

    RoundTrace trace;
    trace.round = round;
    trace.status = last.status;
    trace.objective = last.objective;
    trace.bound = last.best_bound;
    trace.gap = last.gap;
    trace.nodes = last.node_count;
    trace.wall_time = last.wall_time;
    if (round == 0 && last.has_incumbent()) sol.first_objective = last.objective;
    if (!last.has_incumbent()) {
      sol.trace.push_back(trace);
      if (on_round) on_round(trace);
      break;
    }

    const int budget = variant.max_cuts_per_round;
    SeparationOutcome outcome = separate(g, last.x, variant.search, pool, budget);
    trace.violated_edges = static_cast<int>(outcome.violated_edges.size());
    trace.cuts_added = static_cast<int>(outcome.new_cuts.size());
    sol.trace.push_back(trace);
    if (on_round) on_round(trace);

    if (outcome.feasible) {
      separated_feasible = true;
      break;
    }
    if (outcome.new_cuts.empty())
      throw Error("separation produced no new inequality for an infeasible labeling");
    std::vector<LinearConstraint> rows;
    rows.reserve(outcome.new_cuts.size());
    for (const MulticutCut& cut : outcome.new_cuts)
      rows.push_back(multicut_row(handle->model(), cut.cycle, cut.violated));
    handle->add_constraints(rows);
    sol.cuts.insert(sol.cuts.end(), outcome.new_cuts.begin(), outcome.new_cuts.end());
    sol.cuts_added += static_cast<int>(outcome.new_cuts.size());
    ++sol.rounds;
    if (sol.rounds >= variant.max_rounds) break;
  }

  sol.best_bound = last.best_bound;
  if (separated_feasible) {
    sol.status = last.status;
    sol.w = last.w;
    sol.x = last.x;
    sol.objective = last.objective;
    sol.gap = last.gap;
    sol.multicut_feasible = true;
  } else if (last.has_incumbent()) {
    // Out of time or rounds with an incumbent that is not a multicut: close
    // it to its components and refit w.
    Segmentation seg = Segmentation::from_labels(g, connected_components(g, last.x));
    EdgeLabeling closed = segmentation_to_edges(seg, g);
    std::optional<FixedLabelingFit> fit = handle->solve_fixed_labeling(closed);
    if (warm && (!fit || warm->objective < fit->objective)) {
      fit = warm;
      closed = warm_x;
    }
    if (fit) {
      sol.status = SolveStatus::feasible_limit;
      sol.w.assign(fit->solution.begin(), fit->solution.begin() + g.num_nodes());
      sol.x = closed;
      sol.objective = fit->objective;
      sol.gap = relative_gap(sol.objective, sol.best_bound);
      sol.multicut_feasible = true;
      sol.repaired = true;
    } else {
      sol.status = SolveStatus::no_solution;
    }
  } else if (warm) {
    sol.status = SolveStatus::feasible_limit;
    sol.w.assign(warm->solution.begin(), warm->solution.begin() + g.num_nodes());
    sol.x = warm_x;
    sol.objective = warm->objective;
    sol.gap = relative_gap(sol.objective, sol.best_bound);
    sol.multicut_feasible = true;
  } else {
    sol.status = last.status == SolveStatus::infeasible ? SolveStatus::infeasible
                                                        : SolveStatus::no_solution;
    sol.gap = std::numeric_limits<double>::infinity();
  }
  sol.wall_time = std::chrono::duration<double>(clock::now() - started).count();
  return sol;
}

}  // namespace pwfit

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pwfit/formulation.hpp"
#include "pwfit/grid.hpp"
#include "pwfit/solver_backend.hpp"

namespace pwfit {

/// Cycle inequality sum_{e in cycle, e != violated} x_e >= x_violated.
/// `cycle` holds the edge ids sorted ascending.
struct MulticutCut {
  std::vector<EdgeId> cycle;
  EdgeId violated = -1;

  friend auto operator<=>(const MulticutCut&, const MulticutCut&) = default;
};

MulticutCut make_cut(std::vector<EdgeId> cycle_edges, EdgeId violated);

/// True when x satisfies the inequality.
bool cut_satisfied(const MulticutCut& cut, const EdgeLabeling& x);

class CutPool {
 public:
  /// False if the (cycle, violated) pair is already stored.
  bool insert(const MulticutCut& cut);
  bool contains(const MulticutCut& cut) const { return seen_.count(cut) > 0; }
  std::size_t size() const { return cuts_.size(); }
  const std::vector<MulticutCut>& cuts() const { return cuts_; }

 private:
  std::vector<MulticutCut> cuts_;
  std::set<MulticutCut> seen_;
};

struct SeparationOutcome {
  bool feasible = true;
  std::vector<EdgeId> violated_edges;
  std::vector<MulticutCut> new_cuts;
  bool facet_only = false;  // every new cut comes from a chordless cycle
};

/// Phase 1: active edges whose endpoints stay connected through dormant edges.
SeparationOutcome check_feasibility(const GridGraph& g, const EdgeLabeling& x);

enum class SearchMode { plain, facet_defining };

const char* to_string(SearchMode mode);

struct SearchOptions {
  SearchMode mode = SearchMode::plain;
  int max_depth = 10;  // edges on the dormant path
  int max_paths = 16;  // DFS paths kept per violated edge
};

/// Phase 2 for one violated edge. Each returned cycle is a dormant path
/// closed by one active edge; the active edge is `violated` except when the
/// facet-defining fallback has to move to an active chord of the shortest
/// cycle. Facet-defining mode only returns chordless cycles.
std::vector<Cycle> find_cycles(const GridGraph& g, const EdgeLabeling& x, EdgeId violated,
                               const SearchOptions& options);

/// The single active edge of a cycle found by find_cycles.
EdgeId active_edge_of(const Cycle& cycle, const EdgeLabeling& x);

/// Phases 1-3: check x, search cycles for every violated edge and collect the
/// inequalities not yet in `pool` (at most `cut_budget`), inserting them.
SeparationOutcome separate(const GridGraph& g, const EdgeLabeling& x, const SearchOptions& options,
                           CutPool& pool, int cut_budget);

enum class InitialCycles { none, four, four_and_eight };

struct VariantConfig {
  std::string name = "mp";
  InitialCycles initial_cycles = InitialCycles::none;
  bool warm_start = false;
  SearchOptions search;
  int max_cuts_per_round = 1000;
  int max_rounds = 100;
};

/// mp, mph, mph-4, mph-4-8, mph-f, mph-4-f.
VariantConfig variant_from_name(const std::string& name);
std::vector<std::string> variant_names();

struct RoundTrace {
  int round = 0;
  int cuts_added = 0;
  SolveStatus status = SolveStatus::no_solution;
  double objective = 0.0;
  double bound = 0.0;
  double gap = 0.0;
  std::int64_t nodes = 0;
  double wall_time = 0.0;
  int violated_edges = 0;
};

struct FitSolution {
  SolveStatus status = SolveStatus::no_solution;
  std::vector<double> w;
  EdgeLabeling x;
  double objective = 0.0;
  double best_bound = 0.0;
  double gap = 0.0;
  std::int64_t node_count = 0;
  double wall_time = 0.0;
  int rounds = 0;          // separation rounds that added cuts
  int cuts_added = 0;      // by separation
  int initial_cuts = 0;    // from the variant's initial cycles
  std::vector<RoundTrace> trace;
  std::vector<MulticutCut> cuts;  // every separated inequality, in order
  std::optional<double> warm_start_objective;
  std::optional<double> first_objective;  // incumbent of the first solve
  bool multicut_feasible = false;
  bool repaired = false;   // limit hit with an infeasible incumbent; x closed

  bool has_incumbent() const { return !x.empty(); }
};

using RoundCallback = std::function<void(const RoundTrace&)>;

/// Cutting-plane loop: solve, separate the integer incumbent, add violated
/// cycle inequalities and re-solve until the incumbent is a multicut or the
/// limits are exhausted. The time limit covers the whole loop.
FitSolution cutting_plane_solve(const GridInstance& instance, const Params& params,
                                const VariantConfig& variant, const SolveLimits& limits,
                                const RoundCallback& on_round = {},
                                const std::string& backend = {});

}  // namespace pwfit

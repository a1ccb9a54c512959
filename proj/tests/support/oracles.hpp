#pragma once

// Reference implementations used only by the tests. None of them call into
// the library, so agreement with it is evidence rather than tautology.

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

namespace oracle {

using Labeling = std::vector<std::uint8_t>;

// Edge numbering convention of the grid: row edges row-major, then column
// edges row-major.
struct GridShape {
  int m, n;
  int row_edges() const { return m * (n - 1); }
  int num_edges() const { return m * (n - 1) + (m - 1) * n; }
  int row_edge(int i, int j) const { return i * (n - 1) + j; }
  int col_edge(int i, int j) const { return row_edges() + i * n + j; }
  std::pair<int, int> ends(int e) const;
};

// min c.v  s.t.  A v <= b, v >= 0 via a dense tableau with Bland's rule.
struct LpResult {
  bool feasible = false;
  double objective = 0.0;
  std::vector<double> v;
};
LpResult simplex_min(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                     const std::vector<double>& c);

// Node labels of the dormant-edge components, by depth-first search.
std::vector<int> components(const GridShape& g, const Labeling& x);
// Every active edge separates two different components.
bool is_multicut(const GridShape& g, const Labeling& x);

// min sum |w - y| subject to the big-M second-derivative rows for fixed x.
struct WFit {
  double fit = 0.0;
  std::vector<double> w;
};
WFit fixed_labeling_fit(const GridShape& g, const std::vector<double>& y, const Labeling& x,
                        double big_m);

// Minimum sum of |residual| of a line through the points (k, y[k]): the
// optimum interpolates two of them, so every pair is tried.
double l1_line_fit(const std::vector<double>& y, std::vector<double>* w = nullptr);

struct Optimum {
  double objective = 0.0;
  Labeling x;
  std::vector<double> w;
  int optimal_labelings = 0;  // labelings within 1e-9 of the optimum
};

// Chain: every labeling, per-segment L1 lines; falls back to the LP when
// the lines violate a big-M row.
Optimum brute_force_1d(const std::vector<double>& y, double lambda, double big_m);

// Grid: every multicut-feasible labeling with its w-LP.
Optimum brute_force_2d(const GridShape& g, const std::vector<double>& y,
                       const std::vector<double>& lambda_row,
                       const std::vector<double>& lambda_col, double big_m,
                       std::vector<Labeling>* feasible = nullptr);

// Every simple cycle of the grid as a sorted edge set.
std::set<std::vector<int>> simple_cycles(const GridShape& g);
// Some grid edge joins two cycle nodes without being a cycle edge.
bool has_chord(const GridShape& g, const std::vector<int>& cycle_edges);

}  // namespace oracle

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pwfit/grid.hpp"

namespace pwfit {

/// Intensities y on a grid, row-major. Coordinates are z = (row, col).
class GridInstance {
 public:
  GridInstance(GridGraph graph, std::vector<double> y);
  GridInstance(int rows, int cols, std::vector<double> y)
      : GridInstance(GridGraph(rows, cols), std::move(y)) {}

  const GridGraph& graph() const { return graph_; }
  int rows() const { return graph_.rows(); }
  int cols() const { return graph_.cols(); }
  int size() const { return graph_.num_nodes(); }
  double operator()(int row, int col) const { return y_[row * cols() + col]; }
  const std::vector<double>& values() const { return y_; }

 private:
  GridGraph graph_;
  std::vector<double> y_;
};

struct Params {
  double xi = 0.0;
  std::vector<double> lambda_row;  // one per grid row
  std::vector<double> lambda_col;  // one per grid column
  double big_m = 2.0;

  // Same weight on every edge; xi is left at 0.
  static Params uniform(int rows, int cols, double lambda, double big_m = 2.0);

  double edge_weight(const GridGraph& g, EdgeId e) const;
  double mean_lambda() const;
};

/// lambda_row[i] = xi/2 * max_j |y(i,j-1) - 2 y(i,j) + y(i,j+1)|, columns
/// analogous; directions with fewer than 3 nodes get 0. big_m = 2.
Params compute_lambda(const GridInstance& instance, double xi);

enum class ConstraintTag {
  residual_link,
  second_derivative_row,
  second_derivative_col,
  multicut,
  other,
};

const char* to_string(ConstraintTag tag);

struct LinearTerm {
  int col;
  double coef;
};

/// lower <= sum(coef * var) <= upper; +-infinity for one-sided rows.
struct LinearConstraint {
  std::vector<LinearTerm> terms;
  double lower;
  double upper;
  ConstraintTag tag = ConstraintTag::other;
};

struct Variable {
  std::string name;
  double lower;
  double upper;
  double cost;
  bool integer = false;
};

/// Solver-agnostic linear model (minimization). Fitting models lay out their
/// columns as [w | eps+ | eps- | x], one w/eps+/eps- per node and one x per
/// edge; generic LPs leave num_nodes and num_edges at 0.
struct ModelDescription {
  std::vector<Variable> variables;
  std::vector<LinearConstraint> constraints;
  int num_nodes = 0;
  int num_edges = 0;

  int w_col(NodeId v) const { return v; }
  int eps_plus_col(NodeId v) const { return num_nodes + v; }
  int eps_minus_col(NodeId v) const { return 2 * num_nodes + v; }
  int x_col(EdgeId e) const { return 3 * num_nodes + e; }

  int num_binaries() const;
};

/// sum_{e in C \ {e'}} x_e - x_{e'} >= 0. Throws InvalidArgument when the cycle
/// does not contain `violated` or references an edge outside [0, num_edges).
LinearConstraint multicut_row(const ModelDescription& model, std::span<const EdgeId> cycle_edges,
                              EdgeId violated);

/// Chain model: requires rows == 1 and cols >= 3.
ModelDescription build_1d_model(const GridInstance& instance, const Params& params);

/// Grid model with one multicut row per (cycle, edge-of-cycle) pair for the
/// given initial cycles. Second-derivative rows exist only where the index
/// ranges permit.
ModelDescription build_2d_model(const GridInstance& instance, const Params& params,
                                std::span<const Cycle> initial_cycles = {});

struct ModelStatistics {
  int binaries = 0;
  int w_vars = 0;
  int residual_vars = 0;
  int continuous = 0;
  int residual_links = 0;
  int second_derivative_row = 0;  // rows, two per node constraint
  int second_derivative_col = 0;
  int multicut = 0;
  int other = 0;
  int total_constraints = 0;

  int second_derivative_pairs() const {
    return (second_derivative_row + second_derivative_col) / 2;
  }
};

ModelStatistics model_statistics(const ModelDescription& model);

/// Objective split at a point: sum |w - y| and sum lambda_e x_e.
struct ObjectiveTerms {
  double fit = 0.0;
  double regularization = 0.0;
  double total() const { return fit + regularization; }
};

ObjectiveTerms objective_terms(const GridInstance& instance, const Params& params,
                               std::span<const double> w, const EdgeLabeling& x);

/// Largest violation of any constraint or bound at `point`, integrality of
/// integer columns included.
double max_violation(const ModelDescription& model, std::span<const double> point);

}  // namespace pwfit

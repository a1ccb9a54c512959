#include "pwfit/formulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pwfit/error.hpp"

namespace pwfit {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ModelDescription fitting_skeleton(const GridInstance& instance, const Params& params) {
  const GridGraph& g = instance.graph();
  if (static_cast<int>(params.lambda_row.size()) != g.rows() ||
      static_cast<int>(params.lambda_col.size()) != g.cols())
    throw InvalidArgument("lambda vectors do not match the grid shape");
  if (!(params.big_m > 0.0)) throw InvalidArgument("big_m must be positive");

  ModelDescription model;
  model.num_nodes = g.num_nodes();
  model.num_edges = g.num_edges();
  model.variables.reserve(3 * g.num_nodes() + g.num_edges());
  for (NodeId v = 0; v < g.num_nodes(); ++v)
    model.variables.push_back({"w_" + std::to_string(g.row_of(v)) + "_" + std::to_string(g.col_of(v)),
                               -kInf, kInf, 0.0, false});
  for (NodeId v = 0; v < g.num_nodes(); ++v)
    model.variables.push_back({"ep_" + std::to_string(v), 0.0, kInf, 1.0, false});
  for (NodeId v = 0; v < g.num_nodes(); ++v)
    model.variables.push_back({"em_" + std::to_string(v), 0.0, kInf, 1.0, false});
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    const Edge ed = g.edge(e);
    std::string name = (g.is_row_edge(e) ? "xr_" : "xc_") + std::to_string(g.row_of(ed.u)) +
                       "_" + std::to_string(g.col_of(ed.u));
    model.variables.push_back({std::move(name), 0.0, 1.0, params.edge_weight(g, e), true});
  }

  // w - eps+ + eps- = y
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    const double y = instance.values()[v];
    model.constraints.push_back({{{model.w_col(v), 1.0},
                                  {model.eps_plus_col(v), -1.0},
                                  {model.eps_minus_col(v), 1.0}},
                                 y,
                                 y,
                                 ConstraintTag::residual_link});
  }
  return model;
}

// +-(w_prev - 2 w_mid + w_next) - M (x_a + x_b) <= 0
void add_second_derivative(ModelDescription& model, NodeId prev, NodeId mid, NodeId next,
                           EdgeId xa, EdgeId xb, double big_m, ConstraintTag tag) {
  for (double sign : {1.0, -1.0}) {
    model.constraints.push_back({{{model.w_col(prev), sign},
                                  {model.w_col(mid), -2.0 * sign},
                                  {model.w_col(next), sign},
                                  {model.x_col(xa), -big_m},
                                  {model.x_col(xb), -big_m}},
                                 -kInf,
                                 0.0,
                                 tag});
  }
}

}  // namespace

GridInstance::GridInstance(GridGraph graph, std::vector<double> y)
    : graph_(std::move(graph)), y_(std::move(y)) {
  if (static_cast<int>(y_.size()) != graph_.num_nodes())
    throw InvalidArgument("instance has " + std::to_string(y_.size()) + " values for a " +
                          std::to_string(graph_.rows()) + "x" + std::to_string(graph_.cols()) +
                          " grid");
}

Params Params::uniform(int rows, int cols, double lambda, double big_m) {
  Params p;
  p.lambda_row.assign(rows, lambda);
  p.lambda_col.assign(cols, lambda);
  p.big_m = big_m;
  return p;
}

double Params::edge_weight(const GridGraph& g, EdgeId e) const {
  const Edge ed = g.edge(e);
  return g.is_row_edge(e) ? lambda_row[g.row_of(ed.u)] : lambda_col[g.col_of(ed.u)];
}

double Params::mean_lambda() const {
  const std::size_t count = lambda_row.size() + lambda_col.size();
  if (count == 0) return 0.0;
  double sum = std::accumulate(lambda_row.begin(), lambda_row.end(), 0.0);
  sum = std::accumulate(lambda_col.begin(), lambda_col.end(), sum);
  return sum / static_cast<double>(count);
}

Params compute_lambda(const GridInstance& instance, double xi) {
  if (!(xi > 0.0)) throw InvalidArgument("xi must be positive");
  const int m = instance.rows(), n = instance.cols();
  Params p;
  p.xi = xi;
  p.big_m = 2.0;
  p.lambda_row.assign(m, 0.0);
  p.lambda_col.assign(n, 0.0);
  for (int i = 0; i < m; ++i) {
    double peak = 0.0;
    for (int j = 1; j + 1 < n; ++j)
      peak = std::max(peak, std::abs(instance(i, j - 1) - 2.0 * instance(i, j) + instance(i, j + 1)));
    p.lambda_row[i] = 0.5 * xi * peak;
  }
  for (int j = 0; j < n; ++j) {
    double peak = 0.0;
    for (int i = 1; i + 1 < m; ++i)
      peak = std::max(peak, std::abs(instance(i - 1, j) - 2.0 * instance(i, j) + instance(i + 1, j)));
    p.lambda_col[j] = 0.5 * xi * peak;
  }
  return p;
}

const char* to_string(ConstraintTag tag) {
  switch (tag) {
    case ConstraintTag::residual_link: return "residual-link";
    case ConstraintTag::second_derivative_row: return "second-derivative-row";
    case ConstraintTag::second_derivative_col: return "second-derivative-col";
    case ConstraintTag::multicut: return "multicut";
    case ConstraintTag::other: return "other";
  }
  return "other";
}

int ModelDescription::num_binaries() const {
  return static_cast<int>(std::count_if(variables.begin(), variables.end(),
                                        [](const Variable& v) { return v.integer; }));
}

LinearConstraint multicut_row(const ModelDescription& model, std::span<const EdgeId> cycle_edges,
                              EdgeId violated) {
  LinearConstraint row{{}, 0.0, kInf, ConstraintTag::multicut};
  bool found = false;
  for (EdgeId e : cycle_edges) {
    if (e < 0 || e >= model.num_edges)
      throw InvalidArgument("cycle references edge " + std::to_string(e) +
                            " outside the grid (" + std::to_string(model.num_edges) + " edges)");
    if (e == violated) {
      found = true;
      row.terms.push_back({model.x_col(e), -1.0});
    } else {
      row.terms.push_back({model.x_col(e), 1.0});
    }
  }
  if (!found) throw InvalidArgument("multicut edge is not part of its cycle");
  return row;
}

ModelDescription build_1d_model(const GridInstance& instance, const Params& params) {
  if (instance.rows() != 1) throw InvalidArgument("1D model needs a single-row instance");
  if (instance.cols() < 3)
    throw InvalidArgument("1D model needs n >= 3 (no second-derivative constraint otherwise)");
  return build_2d_model(instance, params);
}

ModelDescription build_2d_model(const GridInstance& instance, const Params& params,
                                std::span<const Cycle> initial_cycles) {
  const GridGraph& g = instance.graph();
  ModelDescription model = fitting_skeleton(instance, params);

  for (int i = 0; i < g.rows(); ++i)
    for (int j = 1; j + 1 < g.cols(); ++j)
      add_second_derivative(model, g.node(i, j - 1), g.node(i, j), g.node(i, j + 1),
                            g.row_edge(i, j - 1), g.row_edge(i, j), params.big_m,
                            ConstraintTag::second_derivative_row);
  for (int j = 0; j < g.cols(); ++j)
    for (int i = 1; i + 1 < g.rows(); ++i)
      add_second_derivative(model, g.node(i - 1, j), g.node(i, j), g.node(i + 1, j),
                            g.col_edge(i - 1, j), g.col_edge(i, j), params.big_m,
                            ConstraintTag::second_derivative_col);

  for (const Cycle& c : initial_cycles)
    for (EdgeId violated : c.edges) model.constraints.push_back(multicut_row(model, c.edges, violated));
  return model;
}

ModelStatistics model_statistics(const ModelDescription& model) {
  ModelStatistics s;
  for (const Variable& v : model.variables) {
    if (v.integer) ++s.binaries;
    else ++s.continuous;
  }
  s.w_vars = model.num_nodes;
  s.residual_vars = 2 * model.num_nodes;
  for (const LinearConstraint& c : model.constraints) {
    switch (c.tag) {
      case ConstraintTag::residual_link: ++s.residual_links; break;
      case ConstraintTag::second_derivative_row: ++s.second_derivative_row; break;
      case ConstraintTag::second_derivative_col: ++s.second_derivative_col; break;
      case ConstraintTag::multicut: ++s.multicut; break;
      case ConstraintTag::other: ++s.other; break;
    }
  }
  s.total_constraints = static_cast<int>(model.constraints.size());
  return s;
}

ObjectiveTerms objective_terms(const GridInstance& instance, const Params& params,
                               std::span<const double> w, const EdgeLabeling& x) {
  const GridGraph& g = instance.graph();
  if (static_cast<int>(w.size()) != g.num_nodes() || static_cast<int>(x.size()) != g.num_edges())
    throw InvalidArgument("objective_terms: shape mismatch");
  ObjectiveTerms t;
  for (NodeId v = 0; v < g.num_nodes(); ++v) t.fit += std::abs(w[v] - instance.values()[v]);
  for (EdgeId e = 0; e < g.num_edges(); ++e)
    if (x[e]) t.regularization += params.edge_weight(g, e);
  return t;
}

double max_violation(const ModelDescription& model, std::span<const double> point) {
  if (point.size() != model.variables.size())
    throw InvalidArgument("max_violation: point has wrong dimension");
  double worst = 0.0;
  for (std::size_t k = 0; k < point.size(); ++k) {
    const Variable& var = model.variables[k];
    worst = std::max({worst, var.lower - point[k], point[k] - var.upper});
    if (var.integer) worst = std::max(worst, std::abs(point[k] - std::round(point[k])));
  }
  for (const LinearConstraint& c : model.constraints) {
    double activity = 0.0;
    for (const LinearTerm& t : c.terms) activity += t.coef * point[t.col];
    worst = std::max({worst, c.lower - activity, activity - c.upper});
  }
  return worst;
}

}  // namespace pwfit

#include "pwfit/solver_backend.hpp"

#include <cmath>
#include <cstdlib>

#include "pwfit/error.hpp"

namespace pwfit {

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::feasible_limit: return "feasible_limit";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::no_solution: return "no_solution";
  }
  return "no_solution";
}

SolveStatus solve_status_from_string(std::string_view name) {
  if (name == "optimal") return SolveStatus::optimal;
  if (name == "feasible_limit") return SolveStatus::feasible_limit;
  if (name == "infeasible") return SolveStatus::infeasible;
  if (name == "no_solution") return SolveStatus::no_solution;
  throw InvalidArgument("unknown solve status '" + std::string(name) + "'");
}

std::string selected_backend() {
  const char* env = std::getenv("PWFIT_SOLVER");
  if (env && *env) return env;
  return "highs";
}

std::vector<std::string> available_backends() { return {"highs"}; }

void validate_rows(const ModelDescription& model, std::span<const LinearConstraint> rows) {
  const int ncols = static_cast<int>(model.variables.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const LinearConstraint& c = rows[r];
    if (std::isnan(c.lower) || std::isnan(c.upper) || c.lower > c.upper)
      throw InvalidArgument("row " + std::to_string(r) + " has invalid bounds");
    for (const LinearTerm& t : c.terms) {
      if (t.col < 0 || t.col >= ncols)
        throw InvalidArgument("row " + std::to_string(r) + " references unknown column " +
                              std::to_string(t.col));
      if (!std::isfinite(t.coef))
        throw InvalidArgument("row " + std::to_string(r) + " has a non-finite coefficient");
    }
  }
}

void validate_model(const ModelDescription& model) {
  if (model.variables.empty()) throw InvalidArgument("model has no variables");
  if (model.num_nodes < 0 || model.num_edges < 0 ||
      (model.num_nodes > 0 &&
       static_cast<std::size_t>(3 * model.num_nodes + model.num_edges) != model.variables.size()))
    throw InvalidArgument("model column layout does not match its node/edge counts");
  for (std::size_t k = 0; k < model.variables.size(); ++k) {
    const Variable& v = model.variables[k];
    if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower > v.upper || !std::isfinite(v.cost))
      throw InvalidArgument("variable " + v.name + " has invalid bounds or cost");
  }
  validate_rows(model, model.constraints);
}

void split_fitting_solution(const ModelDescription& model, SolveReport& report) {
  report.w.clear();
  report.x.clear();
  if (!report.has_incumbent() || model.num_nodes == 0) return;
  report.w.assign(report.solution.begin(), report.solution.begin() + model.num_nodes);
  report.x.resize(model.num_edges);
  for (EdgeId e = 0; e < model.num_edges; ++e)
    report.x[e] = report.solution[model.x_col(e)] > 0.5 ? 1 : 0;
}

std::unique_ptr<SolverHandle> load_model(const ModelDescription& model, std::string_view backend) {
  validate_model(model);
  const std::string name = backend.empty() ? selected_backend() : std::string(backend);
  if (name == "highs") return make_highs_handle(model);
  throw BackendUnavailable("unknown solver backend '" + name + "' (available: highs)");
}

}  // namespace pwfit

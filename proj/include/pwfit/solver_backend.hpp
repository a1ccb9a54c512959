#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pwfit/formulation.hpp"
#include "pwfit/grid.hpp"

namespace pwfit {

struct SolveLimits {
  enum class Emphasis { default_emphasis };

  double time_limit = 600.0;  // seconds, > 0
  double gap_target = 0.0;    // relative, >= 0
  Emphasis emphasis = Emphasis::default_emphasis;
};

enum class SolveStatus { optimal, feasible_limit, infeasible, no_solution };

const char* to_string(SolveStatus status);
SolveStatus solve_status_from_string(std::string_view name);

struct SolveReport {
  SolveStatus status = SolveStatus::no_solution;
  double objective = 0.0;   // meaningful only with an incumbent
  double best_bound = 0.0;
  double gap = 0.0;         // as defined by the backend
  std::int64_t node_count = 0;
  double wall_time = 0.0;   // seconds
  std::vector<double> solution;  // every column; empty without incumbent
  // Views of `solution` for fitting models.
  std::vector<double> w;
  EdgeLabeling x;

  bool has_incumbent() const { return !solution.empty(); }
};

struct WarmStartAck {
  bool accepted = false;
  double objective = 0.0;  // LP value with the binaries fixed to x0
};

/// Optimal continuous part for a fixed binary assignment.
struct FixedLabelingFit {
  double objective = 0.0;
  std::vector<double> solution;
};

/// One loaded model inside one backend. Not reentrant: a handle belongs to a
/// single worker at a time.
class SolverHandle {
 public:
  virtual ~SolverHandle() = default;

  virtual std::string_view backend_name() const = 0;

  /// The loaded model including every appended row.
  virtual const ModelDescription& model() const = 0;

  /// Gives the backend an initial assignment of the binaries only. The
  /// continuous part is completed by solving the LP with x fixed; the result
  /// is offered as the initial incumbent on every later solve.
  virtual WarmStartAck warm_start(const EdgeLabeling& x0) = 0;

  virtual void add_constraints(std::span<const LinearConstraint> rows) = 0;

  virtual SolveReport solve(const SolveLimits& limits) = 0;

  /// LP over the continuous columns with the binaries fixed to x; nullopt if
  /// that LP is infeasible.
  virtual std::optional<FixedLabelingFit> solve_fixed_labeling(const EdgeLabeling& x) = 0;

  int num_constraints() const { return static_cast<int>(model().constraints.size()); }
};

/// Backend named by PWFIT_SOLVER, "highs" when unset.
std::string selected_backend();
std::vector<std::string> available_backends();

/// Validates the model and registers it with the backend (empty name:
/// selected_backend()). Throws InvalidArgument for malformed models,
/// BackendUnavailable when the backend cannot be loaded.
std::unique_ptr<SolverHandle> load_model(const ModelDescription& model,
                                         std::string_view backend = {});

/// Validation shared by all backends: column indices in range, bounds ordered.
void validate_model(const ModelDescription& model);
void validate_rows(const ModelDescription& model, std::span<const LinearConstraint> rows);

/// Fills report.w / report.x from report.solution for fitting models.
void split_fitting_solution(const ModelDescription& model, SolveReport& report);

// Backend factories, one per supported solver.
std::unique_ptr<SolverHandle> make_highs_handle(const ModelDescription& model);

}  // namespace pwfit

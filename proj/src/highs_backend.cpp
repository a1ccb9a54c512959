// HiGHS backend. The shared library is opened at run time through its C API so
// the project builds without HiGHS headers; PWFIT_HIGHS_LIBRARY overrides the
// location found at configure time.

#include <dlfcn.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "pwfit/error.hpp"
#include "pwfit/solver_backend.hpp"

#ifndef PWFIT_HIGHS_DEFAULT_PATH
#define PWFIT_HIGHS_DEFAULT_PATH ""
#endif

namespace pwfit {
namespace {

using HighsInt = std::int32_t;

// Values from highs_c_api.h.
constexpr HighsInt kStatusError = -1;
constexpr HighsInt kMatrixFormatRowwise = 2;
constexpr HighsInt kSenseMinimize = 1;
constexpr HighsInt kVarTypeContinuous = 0;
constexpr HighsInt kVarTypeInteger = 1;
constexpr HighsInt kSolutionStatusFeasible = 2;

enum ModelStatus : HighsInt {
  kNotset = 0,
  kLoadError = 1,
  kModelError = 2,
  kPresolveError = 3,
  kSolveError = 4,
  kPostsolveError = 5,
  kModelEmpty = 6,
  kOptimal = 7,
  kInfeasible = 8,
  kUnboundedOrInfeasible = 9,
  kUnbounded = 10,
  kObjectiveBound = 11,
  kObjectiveTarget = 12,
  kTimeLimit = 13,
  kIterationLimit = 14,
  kUnknown = 15,
  kSolutionLimit = 16,
  kInterrupt = 17,
  kMemoryLimit = 18,
};

const char* model_status_name(HighsInt s) {
  switch (s) {
    case kNotset: return "not set";
    case kLoadError: return "load error";
    case kModelError: return "model error";
    case kPresolveError: return "presolve error";
    case kSolveError: return "solve error";
    case kPostsolveError: return "postsolve error";
    case kModelEmpty: return "model empty";
    case kOptimal: return "optimal";
    case kInfeasible: return "infeasible";
    case kUnboundedOrInfeasible: return "unbounded or infeasible";
    case kUnbounded: return "unbounded";
    case kObjectiveBound: return "objective bound";
    case kObjectiveTarget: return "objective target";
    case kTimeLimit: return "time limit";
    case kIterationLimit: return "iteration limit";
    case kUnknown: return "unknown";
    case kSolutionLimit: return "solution limit";
    case kInterrupt: return "interrupt";
    case kMemoryLimit: return "memory limit";
  }
  return "unrecognized";
}

struct HighsApi {
  void* (*create)();
  void (*destroy)(void*);
  HighsInt (*pass_mip)(void*, HighsInt, HighsInt, HighsInt, HighsInt, HighsInt, double,
                       const double*, const double*, const double*, const double*,
                       const double*, const HighsInt*, const HighsInt*, const double*,
                       const HighsInt*);
  HighsInt (*add_rows)(void*, HighsInt, const double*, const double*, HighsInt,
                       const HighsInt*, const HighsInt*, const double*);
  HighsInt (*run)(void*);
  HighsInt (*get_model_status)(const void*);
  HighsInt (*get_solution)(const void*, double*, double*, double*, double*);
  double (*get_objective_value)(const void*);
  HighsInt (*get_double_info)(const void*, const char*, double*);
  HighsInt (*get_int_info)(const void*, const char*, HighsInt*);
  HighsInt (*get_int64_info)(const void*, const char*, std::int64_t*);
  HighsInt (*set_bool_option)(void*, const char*, HighsInt);
  HighsInt (*set_int_option)(void*, const char*, HighsInt);
  HighsInt (*set_double_option)(void*, const char*, double);
  HighsInt (*set_solution)(void*, const double*, const double*, const double*, const double*);
  double (*get_infinity)(const void*);
  HighsInt (*sizeof_highs_int)(const void*);
  HighsInt (*version_major)();
  HighsInt (*version_minor)();
  HighsInt (*version_patch)();
};

template <typename Fn>
void bind(void* lib, const char* symbol, Fn& slot, std::string& missing) {
  void* p = dlsym(lib, symbol);
  if (!p) missing += std::string(missing.empty() ? "" : ", ") + symbol;
  slot = reinterpret_cast<Fn>(p);
}

struct LoadedApi {
  HighsApi api{};
  std::string error;
};

LoadedApi open_highs() {
  LoadedApi out;
  std::vector<std::string> candidates;
  if (const char* env = std::getenv("PWFIT_HIGHS_LIBRARY"); env && *env) candidates.emplace_back(env);
  if (*PWFIT_HIGHS_DEFAULT_PATH) candidates.emplace_back(PWFIT_HIGHS_DEFAULT_PATH);
  candidates.emplace_back("libhighs.so");
  candidates.emplace_back("libhighs.so.1");

  void* lib = nullptr;
  std::string tried;
  for (const std::string& path : candidates) {
    lib = dlopen(path.c_str(), RTLD_NOW | RTLD_LOCAL);
    if (lib) break;
    tried += "\n  " + path + ": " + dlerror();
  }
  if (!lib) {
    out.error = "cannot load the HiGHS shared library (set PWFIT_HIGHS_LIBRARY):" + tried;
    return out;
  }

  std::string missing;
  HighsApi& a = out.api;
  bind(lib, "Highs_create", a.create, missing);
  bind(lib, "Highs_destroy", a.destroy, missing);
  bind(lib, "Highs_passMip", a.pass_mip, missing);
  bind(lib, "Highs_addRows", a.add_rows, missing);
  bind(lib, "Highs_run", a.run, missing);
  bind(lib, "Highs_getModelStatus", a.get_model_status, missing);
  bind(lib, "Highs_getSolution", a.get_solution, missing);
  bind(lib, "Highs_getObjectiveValue", a.get_objective_value, missing);
  bind(lib, "Highs_getDoubleInfoValue", a.get_double_info, missing);
  bind(lib, "Highs_getIntInfoValue", a.get_int_info, missing);
  bind(lib, "Highs_getInt64InfoValue", a.get_int64_info, missing);
  bind(lib, "Highs_setBoolOptionValue", a.set_bool_option, missing);
  bind(lib, "Highs_setIntOptionValue", a.set_int_option, missing);
  bind(lib, "Highs_setDoubleOptionValue", a.set_double_option, missing);
  bind(lib, "Highs_setSolution", a.set_solution, missing);
  bind(lib, "Highs_getInfinity", a.get_infinity, missing);
  bind(lib, "Highs_getSizeofHighsInt", a.sizeof_highs_int, missing);
  bind(lib, "Highs_versionMajor", a.version_major, missing);
  bind(lib, "Highs_versionMinor", a.version_minor, missing);
  bind(lib, "Highs_versionPatch", a.version_patch, missing);
  if (!missing.empty()) {
    out.error = "HiGHS library lacks C API symbols: " + missing;
    return out;
  }
  if (a.version_major() < 1 || (a.version_major() == 1 && a.version_minor() < 7)) {
    out.error = "HiGHS >= 1.7 required, found " + std::to_string(a.version_major()) + "." +
                std::to_string(a.version_minor());
    return out;
  }
  void* probe = a.create();
  const HighsInt int_size = a.sizeof_highs_int(probe);
  a.destroy(probe);
  if (int_size != static_cast<HighsInt>(sizeof(HighsInt)))
    out.error = "HiGHS built with 64-bit HighsInt is not supported";
  return out;
}

const HighsApi& highs_api() {
  static const LoadedApi loaded = open_highs();
  if (!loaded.error.empty()) throw BackendUnavailable(loaded.error);
  return loaded.api;
}

class HighsInstance {
 public:
  explicit HighsInstance(const HighsApi& api) : api_(api), ptr_(api.create()) {
    if (!ptr_) throw BackendError("Highs_create failed");
    api_.set_bool_option(ptr_, "output_flag", 0);
    api_.set_int_option(ptr_, "random_seed", 0);
    api_.set_int_option(ptr_, "threads", 1);
  }
  ~HighsInstance() { api_.destroy(ptr_); }
  HighsInstance(const HighsInstance&) = delete;
  HighsInstance& operator=(const HighsInstance&) = delete;

  void* get() const { return ptr_; }

 private:
  const HighsApi& api_;
  void* ptr_;
};

struct RowBlock {
  std::vector<double> lower, upper, value;
  std::vector<HighsInt> start, index;
};

RowBlock to_row_block(std::span<const LinearConstraint> rows, double inf) {
  RowBlock b;
  for (const LinearConstraint& c : rows) {
    b.start.push_back(static_cast<HighsInt>(b.index.size()));
    b.lower.push_back(std::isinf(c.lower) ? -inf : c.lower);
    b.upper.push_back(std::isinf(c.upper) ? inf : c.upper);
    for (const LinearTerm& t : c.terms) {
      b.index.push_back(t.col);
      b.value.push_back(t.coef);
    }
  }
  return b;
}

void check(HighsInt status, const char* what) {
  if (status == kStatusError) throw BackendError(std::string("HiGHS: ") + what + " failed");
}

// Loads `model` into `h`; binaries optionally relaxed and/or fixed.
void pass_model(const HighsApi& api, void* h, const ModelDescription& model,
                const EdgeLabeling* fixed_x) {
  const double inf = api.get_infinity(h);
  const std::size_t ncol = model.variables.size();
  std::vector<double> cost(ncol), lower(ncol), upper(ncol);
  std::vector<HighsInt> integrality(ncol);
  bool any_integer = false;
  for (std::size_t k = 0; k < ncol; ++k) {
    const Variable& v = model.variables[k];
    cost[k] = v.cost;
    lower[k] = std::isinf(v.lower) ? -inf : v.lower;
    upper[k] = std::isinf(v.upper) ? inf : v.upper;
    integrality[k] = v.integer && !fixed_x ? kVarTypeInteger : kVarTypeContinuous;
    any_integer |= integrality[k] == kVarTypeInteger;
  }
  if (fixed_x) {
    for (EdgeId e = 0; e < model.num_edges; ++e)
      lower[model.x_col(e)] = upper[model.x_col(e)] = (*fixed_x)[e] ? 1.0 : 0.0;
  }
  RowBlock rows = to_row_block(model.constraints, inf);
  const HighsInt nrow = static_cast<HighsInt>(rows.lower.size());
  check(api.pass_mip(h, static_cast<HighsInt>(ncol), nrow, static_cast<HighsInt>(rows.index.size()),
                     kMatrixFormatRowwise, kSenseMinimize, 0.0, cost.data(), lower.data(),
                     upper.data(), rows.lower.data(), rows.upper.data(), rows.start.data(),
                     rows.index.data(), rows.value.data(),
                     any_integer ? integrality.data() : nullptr),
        "passing the model");
}

class HighsHandle final : public SolverHandle {
 public:
  explicit HighsHandle(const ModelDescription& model)
      : api_(highs_api()), model_(model), highs_(api_) {
    pass_model(api_, highs_.get(), model_, nullptr);
  }

  std::string_view backend_name() const override { return "highs"; }
  const ModelDescription& model() const override { return model_; }

  WarmStartAck warm_start(const EdgeLabeling& x0) override {
    if (model_.num_edges == 0 || static_cast<int>(x0.size()) != model_.num_edges)
      throw InvalidArgument("warm start has " + std::to_string(x0.size()) +
                            " binaries, model has " + std::to_string(model_.num_edges));
    WarmStartAck ack;
    std::optional<FixedLabelingFit> fit = solve_fixed_labeling(x0);
    if (!fit) return ack;
    ack.accepted = true;
    ack.objective = fit->objective;
    start_ = std::move(fit->solution);
    return ack;
  }

  void add_constraints(std::span<const LinearConstraint> rows) override {
    validate_rows(model_, rows);
    if (rows.empty()) return;
    const double inf = api_.get_infinity(highs_.get());
    RowBlock b = to_row_block(rows, inf);
    check(api_.add_rows(highs_.get(), static_cast<HighsInt>(b.lower.size()), b.lower.data(),
                        b.upper.data(), static_cast<HighsInt>(b.index.size()), b.start.data(),
                        b.index.data(), b.value.data()),
          "adding rows");
    model_.constraints.insert(model_.constraints.end(), rows.begin(), rows.end());
  }

  SolveReport solve(const SolveLimits& limits) override {
    if (!(limits.time_limit > 0.0) || !(limits.gap_target >= 0.0))
      throw InvalidArgument("solve limits need time_limit > 0 and gap_target >= 0");
    void* h = highs_.get();
    api_.set_double_option(h, "time_limit", limits.time_limit);
    api_.set_double_option(h, "mip_rel_gap", limits.gap_target);
    api_.set_double_option(h, "mip_abs_gap", 1e-9);
    if (!start_.empty()) api_.set_solution(h, start_.data(), nullptr, nullptr, nullptr);

    const auto t0 = std::chrono::steady_clock::now();
    const HighsInt run_status = api_.run(h);
    SolveReport report;
    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const HighsInt ms = api_.get_model_status(h);
    if (run_status == kStatusError)
      throw BackendError(std::string("HiGHS run failed, model status: ") + model_status_name(ms));

    HighsInt primal_status = 0;
    api_.get_int_info(h, "primal_solution_status", &primal_status);
    const bool has_solution = primal_status == kSolutionStatusFeasible;
    const bool is_mip = model_.num_binaries() > 0;

    switch (ms) {
      case kOptimal:
        report.status = SolveStatus::optimal;
        break;
      case kInfeasible:
        report.status = SolveStatus::infeasible;
        break;
      case kTimeLimit:
      case kIterationLimit:
      case kSolutionLimit:
      case kInterrupt:
      case kObjectiveBound:
      case kObjectiveTarget:
      case kUnknown:
      case kMemoryLimit:
        report.status = has_solution ? SolveStatus::feasible_limit : SolveStatus::no_solution;
        break;
      default:
        throw BackendError(std::string("HiGHS finished with model status: ") + model_status_name(ms));
    }
    if (report.status == SolveStatus::optimal && !has_solution)
      throw BackendError("HiGHS reported optimal without a primal solution");

    if (has_solution) {
      report.solution.resize(model_.variables.size());
      api_.get_solution(h, report.solution.data(), nullptr, nullptr, nullptr);
      report.objective = api_.get_objective_value(h);
    }
    if (is_mip) {
      api_.get_double_info(h, "mip_dual_bound", &report.best_bound);
      api_.get_double_info(h, "mip_gap", &report.gap);
      api_.get_int64_info(h, "mip_node_count", &report.node_count);
    } else {
      report.best_bound = report.objective;
      report.gap = 0.0;
    }
    if (!has_solution) report.gap = std::numeric_limits<double>::infinity();
    split_fitting_solution(model_, report);
    return report;
  }

  std::optional<FixedLabelingFit> solve_fixed_labeling(const EdgeLabeling& x) override {
    if (static_cast<int>(x.size()) != model_.num_edges)
      throw InvalidArgument("fixed labeling has " + std::to_string(x.size()) +
                            " entries, model has " + std::to_string(model_.num_edges) + " edges");
    HighsInstance lp(api_);
    pass_model(api_, lp.get(), model_, &x);
    if (api_.run(lp.get()) == kStatusError)
      throw BackendError("HiGHS failed on the fixed-labeling LP");
    const HighsInt ms = api_.get_model_status(lp.get());
    if (ms == kInfeasible || ms == kUnboundedOrInfeasible) return std::nullopt;
    if (ms != kOptimal)
      throw BackendError(std::string("fixed-labeling LP ended with status: ") + model_status_name(ms));
    FixedLabelingFit fit;
    fit.solution.resize(model_.variables.size());
    api_.get_solution(lp.get(), fit.solution.data(), nullptr, nullptr, nullptr);
    fit.objective = api_.get_objective_value(lp.get());
    // Exact binaries so the start passes integrality checks.
    for (EdgeId e = 0; e < model_.num_edges; ++e) fit.solution[model_.x_col(e)] = x[e] ? 1.0 : 0.0;
    return fit;
  }

 private:
  const HighsApi& api_;
  ModelDescription model_;
  HighsInstance highs_;
  std::vector<double> start_;
};

}  // namespace

std::unique_ptr<SolverHandle> make_highs_handle(const ModelDescription& model) {
  return std::make_unique<HighsHandle>(model);
}

}  // namespace pwfit

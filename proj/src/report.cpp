#include <cmath>
#include <limits>

#include "json.hpp"
#include "pwfit/error.hpp"
#include "pwfit/instance_io.hpp"

namespace pwfit {

namespace {

using json = nlohmann::ordered_json;

// JSON has no literal for inf/nan; those are stored as strings.
json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double to_double(const json& j, const char* field) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw ParseError(std::string("report field '") + field + "' is not a number", 0);
}

template <class T>
json optional_value(const std::optional<T>& v) {
  if (!v) return nullptr;
  if constexpr (std::is_same_v<T, double>) return number(*v);
  else return *v;
}

const json& field(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end()) throw ParseError(std::string("report is missing field '") + name + "'", 0);
  return *it;
}

std::optional<double> optional_double(const json& j, const char* name) {
  const json& v = field(j, name);
  if (v.is_null()) return std::nullopt;
  return to_double(v, name);
}

template <class T>
std::optional<T> optional_integer(const json& j, const char* name) {
  const json& v = field(j, name);
  if (v.is_null()) return std::nullopt;
  return v.get<T>();
}

json doubles(const std::vector<double>& values) {
  json out = json::array();
  for (double v : values) out.push_back(number(v));
  return out;
}

std::vector<double> doubles_from(const json& j, const char* name) {
  std::vector<double> out;
  for (const json& v : field(j, name)) out.push_back(to_double(v, name));
  return out;
}

json metrics_json(const Metrics& m) {
  json j;
  j["fit_term"] = number(m.fit_term);
  j["regularization_term"] = number(m.regularization_term);
  j["objective"] = number(m.objective);
  j["segment_count"] = m.segment_count;
  j["boundary_length"] = m.boundary_length;
  j["best_bound"] = optional_value(m.best_bound);
  j["gap"] = optional_value(m.gap);
  j["nodes"] = optional_value(m.nodes);
  j["cuts_added"] = optional_value(m.cuts_added);
  j["rounds"] = optional_value(m.rounds);
  j["exact_match"] = optional_value(m.exact_match);
  j["rand_index"] = optional_value(m.rand_index);
  j["mae_w"] = optional_value(m.mae_w);
  j["mae_f"] = optional_value(m.mae_f);
  return j;
}

Metrics metrics_from(const json& j) {
  Metrics m;
  m.fit_term = to_double(field(j, "fit_term"), "fit_term");
  m.regularization_term = to_double(field(j, "regularization_term"), "regularization_term");
  m.objective = to_double(field(j, "objective"), "objective");
  m.segment_count = field(j, "segment_count").get<int>();
  m.boundary_length = field(j, "boundary_length").get<int>();
  m.best_bound = optional_double(j, "best_bound");
  m.gap = optional_double(j, "gap");
  m.nodes = optional_integer<std::int64_t>(j, "nodes");
  m.cuts_added = optional_integer<int>(j, "cuts_added");
  m.rounds = optional_integer<int>(j, "rounds");
  m.exact_match = optional_integer<bool>(j, "exact_match");
  m.rand_index = optional_double(j, "rand_index");
  m.mae_w = optional_double(j, "mae_w");
  m.mae_f = optional_double(j, "mae_f");
  return m;
}

json trace_json(const RoundTrace& t) {
  json j;
  j["round"] = t.round;
  j["cuts_added"] = t.cuts_added;
  j["status"] = to_string(t.status);
  j["objective"] = number(t.objective);
  j["bound"] = number(t.bound);
  j["gap"] = number(t.gap);
  j["nodes"] = t.nodes;
  j["wall_time"] = number(t.wall_time);
  j["violated_edges"] = t.violated_edges;
  return j;
}

RoundTrace trace_from(const json& j) {
  RoundTrace t;
  t.round = field(j, "round").get<int>();
  t.cuts_added = field(j, "cuts_added").get<int>();
  t.status = solve_status_from_string(field(j, "status").get<std::string>());
  t.objective = to_double(field(j, "objective"), "objective");
  t.bound = to_double(field(j, "bound"), "bound");
  t.gap = to_double(field(j, "gap"), "gap");
  t.nodes = field(j, "nodes").get<std::int64_t>();
  t.wall_time = to_double(field(j, "wall_time"), "wall_time");
  t.violated_edges = field(j, "violated_edges").get<int>();
  return t;
}

}  // namespace

std::string report_to_json(const RunReport& r) {
  json j;
  j["format_version"] = r.format_version;

  json inst;
  inst["source"] = r.instance.source;
  inst["rows"] = r.instance.rows;
  inst["cols"] = r.instance.cols;
  inst["noise_sigma2"] = optional_value(r.instance.noise_sigma2);
  inst["seed"] = optional_value(r.instance.seed);
  inst["clipped_pixels"] = r.instance.clipped_pixels;
  j["instance"] = std::move(inst);

  j["variant"] = r.variant;
  j["backend"] = r.backend;

  json params;
  params["xi"] = number(r.xi);
  params["big_m"] = number(r.big_m);
  params["time_limit"] = number(r.time_limit);
  params["gap_target"] = number(r.gap_target);
  params["norm"] = r.norm;
  params["lambda_row"] = doubles(r.lambda_row);
  params["lambda_col"] = doubles(r.lambda_col);
  j["params"] = std::move(params);

  json solve;
  solve["status"] = r.status;
  solve["objective"] = number(r.objective);
  solve["best_bound"] = optional_value(r.best_bound);
  solve["gap"] = optional_value(r.gap);
  solve["node_count"] = optional_value(r.node_count);
  solve["wall_time"] = number(r.wall_time);
  solve["rounds"] = r.rounds;
  solve["cuts_added"] = r.cuts_added;
  solve["initial_cuts"] = r.initial_cuts;
  solve["warm_start_objective"] = optional_value(r.warm_start_objective);
  solve["first_objective"] = optional_value(r.first_objective);
  solve["repaired"] = r.repaired;
  j["solve"] = std::move(solve);

  json trace = json::array();
  for (const RoundTrace& t : r.trace) trace.push_back(trace_json(t));
  j["trace"] = std::move(trace);
  j["metrics"] = metrics_json(r.metrics);
  return j.dump(2) + "\n";
}

RunReport report_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("report is not valid JSON: ") + e.what(), e.byte);
  }
  try {
    RunReport r;
    r.format_version = field(j, "format_version").get<int>();
    if (r.format_version != RunReport::kFormatVersion)
      throw ParseError("unsupported report format_version " + std::to_string(r.format_version), 0);

    const json& inst = field(j, "instance");
    r.instance.source = field(inst, "source").get<std::string>();
    r.instance.rows = field(inst, "rows").get<int>();
    r.instance.cols = field(inst, "cols").get<int>();
    r.instance.noise_sigma2 = optional_double(inst, "noise_sigma2");
    r.instance.seed = optional_integer<std::uint64_t>(inst, "seed");
    r.instance.clipped_pixels = field(inst, "clipped_pixels").get<int>();

    r.variant = field(j, "variant").get<std::string>();
    r.backend = field(j, "backend").get<std::string>();

    const json& params = field(j, "params");
    r.xi = to_double(field(params, "xi"), "xi");
    r.big_m = to_double(field(params, "big_m"), "big_m");
    r.time_limit = to_double(field(params, "time_limit"), "time_limit");
    r.gap_target = to_double(field(params, "gap_target"), "gap_target");
    r.norm = field(params, "norm").get<std::string>();
    r.lambda_row = doubles_from(params, "lambda_row");
    r.lambda_col = doubles_from(params, "lambda_col");

    const json& solve = field(j, "solve");
    r.status = field(solve, "status").get<std::string>();
    r.objective = to_double(field(solve, "objective"), "objective");
    r.best_bound = optional_double(solve, "best_bound");
    r.gap = optional_double(solve, "gap");
    r.node_count = optional_integer<std::int64_t>(solve, "node_count");
    r.wall_time = to_double(field(solve, "wall_time"), "wall_time");
    r.rounds = field(solve, "rounds").get<int>();
    r.cuts_added = field(solve, "cuts_added").get<int>();
    r.initial_cuts = field(solve, "initial_cuts").get<int>();
    r.warm_start_objective = optional_double(solve, "warm_start_objective");
    r.first_objective = optional_double(solve, "first_objective");
    r.repaired = field(solve, "repaired").get<bool>();

    for (const json& t : field(j, "trace")) r.trace.push_back(trace_from(t));
    r.metrics = metrics_from(field(j, "metrics"));
    return r;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed report: ") + e.what(), 0);
  }
}

void write_report(const RunReport& report, const std::filesystem::path& path) {
  write_file_atomic(path, report_to_json(report));
}

RunReport read_report(const std::filesystem::path& path) {
  return report_from_json(read_file(path));
}

}  // namespace pwfit

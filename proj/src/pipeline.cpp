#include "pwfit/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

#include "pwfit/error.hpp"
#include "pwfit/heuristic.hpp"

namespace pwfit {

namespace {

RunReport base_report(const RunConfig& config, const Params& params,
                      const InstanceDescriptor& descriptor, const std::string& backend) {
  RunReport r;
  r.instance = descriptor;
  r.variant = config.variant;
  r.backend = backend;
  r.xi = config.xi;
  r.big_m = params.big_m;
  r.time_limit = config.limits.time_limit;
  r.gap_target = config.limits.gap_target;
  r.norm = to_string(config.norm);
  r.lambda_row = params.lambda_row;
  r.lambda_col = params.lambda_col;
  return r;
}

}  // namespace

RunResult run_instance(const GridInstance& instance, const RunConfig& config,
                       const InstanceDescriptor& descriptor, const GroundTruth* truth) {
  const GridGraph& g = instance.graph();
  const std::string backend = config.backend.empty() ? selected_backend() : config.backend;
  RunResult out;
  out.params = compute_lambda(instance, config.xi);
  out.report = base_report(config, out.params, descriptor, backend);

  if (config.variant == kHeuristicVariant) {
    const auto start = std::chrono::steady_clock::now();
    HeuristicResult h = region_fusion(instance, out.params);
    out.x = h.x;
    out.segmentation = h.segmentation;
    out.w.resize(g.num_nodes());
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
      const Plane& p = h.segment_params[h.segmentation.labels[v]];
      out.w[v] = p.a1 * g.row_of(v) + p.a2 * g.col_of(v) + p.b;
    }
    out.pieces = fit_pieces(instance, out.segmentation, config.norm, backend);
    out.report.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.report.status = kHeuristicVariant;
    out.report.rounds = h.rounds;
    out.metrics =
        evaluate(instance, out.params, nullptr, out.w, out.x, out.segmentation, out.pieces, truth);
    out.report.objective = out.metrics.objective;
    out.report.metrics = out.metrics;
    return out;
  }

  const VariantConfig variant = variant_from_name(config.variant);
  FitSolution sol =
      cutting_plane_solve(instance, out.params, variant, config.limits, config.on_round, backend);
  RunReport& r = out.report;
  r.status = to_string(sol.status);
  r.objective = sol.objective;
  r.best_bound = sol.best_bound;
  r.gap = sol.gap;
  r.node_count = sol.node_count;
  r.wall_time = sol.wall_time;
  r.rounds = sol.rounds;
  r.cuts_added = sol.cuts_added;
  r.initial_cuts = sol.initial_cuts;
  r.warm_start_objective = sol.warm_start_objective;
  r.first_objective = sol.first_objective;
  r.repaired = sol.repaired;
  r.trace = sol.trace;

  if (sol.has_incumbent()) {
    out.w = sol.w;
    out.x = sol.x;
    out.segmentation = labels_from_edges(g, sol.x);
    out.pieces = fit_pieces(instance, out.segmentation, config.norm, backend);
    out.metrics =
        evaluate(instance, out.params, &sol, out.w, out.x, out.segmentation, out.pieces, truth);
  } else {
    out.metrics.best_bound = sol.best_bound;
    out.metrics.gap = sol.gap;
    out.metrics.nodes = sol.node_count;
    out.metrics.cuts_added = sol.cuts_added;
    out.metrics.rounds = sol.rounds;
  }
  r.metrics = out.metrics;
  out.solution = std::move(sol);
  return out;
}

std::vector<std::filesystem::path> write_artifacts(const RunResult& result, int rows, int cols,
                                                   const std::filesystem::path& dir,
                                                   const std::string& stem) {
  std::vector<std::pair<std::filesystem::path, std::string>> files;
  auto add = [&](const std::string& suffix, std::string contents) {
    files.emplace_back(dir / (stem + suffix), std::move(contents));
  };
  if (result.has_fit()) {
    add("_w.pgm", to_pgm(rows, cols, result.w));
    add("_w.csv", to_csv(rows, cols, result.w));
    add("_f.pgm", to_pgm(rows, cols, result.pieces.f));
    add("_f.csv", to_csv(rows, cols, result.pieces.f));
    add("_labels.csv", labels_to_csv(rows, cols, result.segmentation.labels));
  }
  add("_report.json", report_to_json(result.report));

  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  for (const auto& [path, contents] : files) {
    write_file_atomic(path, contents);
    written.push_back(path);
  }
  return written;
}

double median(std::vector<double> values) {
  if (values.empty()) throw InvalidArgument("median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t k = values.size() / 2;
  return values.size() % 2 ? values[k] : 0.5 * (values[k - 1] + values[k]);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t key) {
  // splitmix64 finalizer over the combined value.
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (key + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

struct SweepInstance {
  std::string scene;
  int rows, cols;
  double noise;
  std::uint64_t seed;
  SyntheticInstance data;
};

std::string format_double(double v) {
  std::ostringstream out;
  out.precision(10);
  out << v;
  return out.str();
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepConfig& config, std::vector<RunReport>* reports) {
  if (config.repeats < 1) throw InvalidArgument("repeats must be at least 1");
  if (config.jobs < 1) throw InvalidArgument("jobs must be at least 1");
  const std::vector<std::string> scenes =
      config.scenes.empty() ? builtin_synthetic_names() : config.scenes;
  for (const std::string& v : config.variants)
    if (v != kHeuristicVariant) variant_from_name(v);

  std::vector<SweepInstance> instances;
  for (std::size_t s = 0; s < scenes.size(); ++s)
    for (std::size_t z = 0; z < config.sizes.size(); ++z)
      for (std::size_t k = 0; k < config.noise.size(); ++k) {
        const auto [m, n] = config.sizes[z];
        const std::uint64_t key = (s * 1000 + z) * 1000 + k;
        const std::uint64_t seed = derive_seed(config.seed, key);
        SyntheticSpec spec = builtin_synthetic(scenes[s], m, n, config.noise[k], seed);
        instances.push_back({scenes[s], m, n, config.noise[k], seed, generate_synthetic(spec)});
      }

  struct Job {
    std::size_t instance;
    std::size_t variant;
    int repeat;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < instances.size(); ++i)
    for (std::size_t v = 0; v < config.variants.size(); ++v)
      for (int r = 0; r < config.repeats; ++r) jobs.push_back({i, v, r});

  std::vector<std::optional<RunResult>> results(jobs.size());
  std::vector<std::string> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < jobs.size(); k = next++) {
      const Job& job = jobs[k];
      const SweepInstance& inst = instances[job.instance];
      RunConfig rc;
      rc.variant = config.variants[job.variant];
      rc.xi = config.xi;
      rc.limits = config.limits;
      rc.norm = config.norm;
      rc.backend = config.backend;
      InstanceDescriptor desc{"synthetic:" + inst.scene, inst.rows, inst.cols, inst.noise,
                              inst.seed, inst.data.clipped_pixels};
      GroundTruth truth{inst.data.truth.labels, inst.data.clean};
      try {
        results[k] = run_instance(inst.data.instance, rc, desc, &truth);
      } catch (const std::exception& e) {
        errors[k] = e.what();
      }
    }
  };
  const int workers = std::min<int>(config.jobs, static_cast<int>(jobs.size()));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  for (std::size_t k = 0; k < jobs.size(); ++k)
    if (!errors[k].empty()) throw Error("sweep cell failed: " + errors[k]);

  std::vector<SweepRow> rows;
  for (std::size_t k = 0; k < jobs.size(); k += config.repeats) {
    const SweepInstance& inst = instances[jobs[k].instance];
    SweepRow row;
    row.scene = inst.scene;
    row.rows = inst.rows;
    row.cols = inst.cols;
    row.noise = inst.noise;
    row.variant = config.variants[jobs[k].variant];
    row.repeats = config.repeats;
    std::vector<double> time, nodes, gap, cuts, objective, segments, ri;
    for (int r = 0; r < config.repeats; ++r) {
      const RunResult& res = *results[k + r];
      if (reports) reports->push_back(res.report);
      row.statuses += (r ? "/" : "") + res.report.status;
      time.push_back(res.report.wall_time);
      if (res.report.node_count) nodes.push_back(static_cast<double>(*res.report.node_count));
      if (res.report.gap) gap.push_back(*res.report.gap);
      cuts.push_back(res.report.cuts_added);
      objective.push_back(res.report.objective);
      segments.push_back(res.metrics.segment_count);
      ri.push_back(res.metrics.rand_index.value_or(0.0));
    }
    row.wall_time = median(time);
    if (!nodes.empty()) row.nodes = median(nodes);
    if (!gap.empty()) row.gap = median(gap);
    row.cuts_added = median(cuts);
    row.objective = median(objective);
    row.segments = median(segments);
    row.rand_index = median(ri);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string sweep_table_csv(const std::vector<SweepRow>& rows) {
  std::string out =
      "scene,size,noise,variant,repeats,status,time_s,nodes,gap,cuts,objective,segments,rand_index\n";
  for (const SweepRow& r : rows) {
    out += r.scene + "," + std::to_string(r.rows) + "x" + std::to_string(r.cols) + "," +
           format_double(r.noise) + "," + r.variant + "," + std::to_string(r.repeats) + "," +
           r.statuses + "," + format_double(r.wall_time) + "," +
           (r.nodes ? format_double(*r.nodes) : "") + "," + (r.gap ? format_double(*r.gap) : "") +
           "," + format_double(r.cuts_added) + "," + format_double(r.objective) + "," +
           format_double(r.segments) + "," + format_double(r.rand_index) + "\n";
  }
  return out;
}

std::vector<RunResult> sweep_xi(const GridInstance& instance, const RunConfig& config,
                                const InstanceDescriptor& descriptor,
                                const std::vector<double>& xis, const GroundTruth* truth) {
  if (xis.empty()) throw InvalidArgument("xi list is empty");
  std::vector<RunResult> out;
  for (double xi : xis) {
    RunConfig rc = config;
    rc.xi = xi;
    out.push_back(run_instance(instance, rc, descriptor, truth));
  }
  return out;
}

std::vector<RunResult> sweep_time_limits(const GridInstance& instance, const RunConfig& config,
                                         const InstanceDescriptor& descriptor,
                                         const std::vector<double>& limits,
                                         const GroundTruth* truth) {
  if (limits.empty()) throw InvalidArgument("time limit list is empty");
  std::vector<RunResult> out;
  for (double limit : limits) {
    RunConfig rc = config;
    rc.limits.time_limit = limit;
    out.push_back(run_instance(instance, rc, descriptor, truth));
  }
  return out;
}

}  // namespace pwfit

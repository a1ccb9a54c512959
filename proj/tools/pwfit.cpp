#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pwfit/error.hpp"
#include "pwfit/formulation.hpp"
#include "pwfit/instance_io.hpp"
#include "pwfit/pipeline.hpp"

namespace {

using namespace pwfit;

std::pair<int, int> parse_size(const std::string& text) {
  const auto x = text.find('x');
  try {
    if (x == std::string::npos) throw std::invalid_argument(text);
    std::size_t used = 0;
    const int rows = std::stoi(text.substr(0, x), &used);
    if (used != x) throw std::invalid_argument(text);
    const std::string rest = text.substr(x + 1);
    const int cols = std::stoi(rest, &used);
    if (used != rest.size()) throw std::invalid_argument(text);
    if (rows < 1 || cols < 1) throw std::invalid_argument(text);
    return {rows, cols};
  } catch (const std::logic_error&) {
    throw InvalidArgument("bad size '" + text + "' (expected ROWSxCOLS, e.g. 20x30)");
  }
}

// Where the instance comes from: a file or a built-in scene.
struct InputOptions {
  std::string input;
  std::string format;
  std::string synthetic;
  std::string size = "20x30";
  double noise = 0.0;
  std::uint64_t seed = 1;

  void attach(CLI::App* cmd) {
    auto* in = cmd->add_option("--input", input, "Image file (.pgm or .csv)");
    cmd->add_option("--format", format, "Image format, inferred from the extension by default")
        ->check(CLI::IsMember({"pgm", "csv"}));
    auto* syn = cmd->add_option("--synthetic", synthetic, "Built-in scene instead of a file")
                    ->check(CLI::IsMember(builtin_synthetic_names()));
    in->excludes(syn);
    cmd->add_option("--size", size, "Scene size ROWSxCOLS")->capture_default_str();
    cmd->add_option("--noise", noise, "Scene noise variance")->capture_default_str()->check(CLI::NonNegativeNumber);
    cmd->add_option("--seed", seed, "Scene noise seed")->capture_default_str();
  }

  struct Loaded {
    GridInstance instance;
    InstanceDescriptor descriptor;
    std::optional<GroundTruth> truth;
  };

  Loaded load() const {
    if (!synthetic.empty()) {
      const auto [m, n] = parse_size(size);
      SyntheticInstance s = generate_synthetic(builtin_synthetic(synthetic, m, n, noise, seed));
      InstanceDescriptor d{"synthetic:" + synthetic, m, n, noise, seed, s.clipped_pixels};
      GroundTruth truth{s.truth.labels, s.clean};
      return {std::move(s.instance), d, std::move(truth)};
    }
    if (input.empty()) throw InvalidArgument("one of --input or --synthetic is required");
    const ImageFormat fmt =
        format.empty() ? image_format_from_path(input) : image_format_from_string(format);
    GridInstance inst = load_image(input, fmt);
    InstanceDescriptor d;
    d.source = input;
    d.rows = inst.rows();
    d.cols = inst.cols();
    return {std::move(inst), d, std::nullopt};
  }

  std::string default_stem() const {
    return synthetic.empty() ? std::filesystem::path(input).stem().string() : synthetic;
  }
};

struct SolveOptions {
  std::string variant = "mph-4";
  double xi = 0.5;
  double time_limit = 600.0;
  double gap = 0.0;
  std::string norm = "l1";
  bool trace = false;

  void attach(CLI::App* cmd, bool with_variant = true) {
    if (with_variant) {
      std::vector<std::string> names = variant_names();
      names.push_back(kHeuristicVariant);
      cmd->add_option("--variant", variant, "Solver variant or 'heuristic'")->capture_default_str()
          ->check(CLI::IsMember(names));
    }
    cmd->add_option("--time-limit", time_limit, "Seconds for the whole solve")->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--gap", gap, "Relative optimality gap target")->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--norm", norm, "Norm of the post-hoc piece fit")->capture_default_str()
        ->check(CLI::IsMember({"l1", "l2"}));
    cmd->add_flag("--trace", trace, "Print one line per cutting-plane round to stderr");
  }

  RunConfig config() const {
    RunConfig rc;
    rc.variant = variant;
    rc.xi = xi;
    rc.limits.time_limit = time_limit;
    rc.limits.gap_target = gap;
    rc.norm = fit_norm_from_string(norm);
    if (trace) {
      rc.on_round = [](const RoundTrace& t) {
        std::fprintf(stderr, "round %d: %s obj=%.9g bound=%.9g gap=%.3g cuts=%d nodes=%lld t=%.2fs\n",
                     t.round, to_string(t.status), t.objective, t.bound, t.gap, t.cuts_added,
                     static_cast<long long>(t.nodes), t.wall_time);
      };
    }
    return rc;
  }
};

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(10);
  out << v;
  return out.str();
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : ""; }

int run_solve(const InputOptions& in, const SolveOptions& so, const std::string& out_dir,
              std::string stem) {
  auto loaded = in.load();
  RunResult res = run_instance(loaded.instance, so.config(), loaded.descriptor,
                               loaded.truth ? &*loaded.truth : nullptr);
  if (stem.empty()) stem = in.default_stem();
  for (const auto& path : write_artifacts(res, loaded.instance.rows(), loaded.instance.cols(),
                                          out_dir, stem))
    std::cout << "wrote " << path.string() << "\n";
  const RunReport& r = res.report;
  std::cout << "status=" << r.status << " objective=" << fmt(r.objective)
            << " bound=" << fmt(r.best_bound) << " gap=" << fmt(r.gap)
            << " segments=" << res.metrics.segment_count << " cuts=" << r.cuts_added
            << " time=" << fmt(r.wall_time) << "s\n";
  if (!res.has_fit()) std::cerr << "pwfit: warning: no incumbent found; only the report was written\n";
  return 0;
}

std::vector<double> parse_list(const std::vector<std::string>& items, const char* what) {
  std::vector<double> out;
  for (const std::string& s : items) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(s, &used));
      if (used != s.size()) throw std::invalid_argument(s);
    } catch (const std::logic_error&) {
      throw InvalidArgument(std::string("bad ") + what + " '" + s + "'");
    }
  }
  return out;
}

int run_sweep_cmd(const std::vector<std::string>& sizes, const std::vector<std::string>& noise,
                  const std::vector<std::string>& variants, const std::vector<std::string>& scenes,
                  int repeats, const SolveOptions& so, std::uint64_t seed, int jobs,
                  const std::string& out_dir) {
  SweepConfig cfg;
  cfg.sizes.clear();
  for (const std::string& s : sizes) cfg.sizes.push_back(parse_size(s));
  cfg.noise = parse_list(noise, "noise level");
  cfg.variants = variants;
  cfg.scenes = scenes;
  cfg.repeats = repeats;
  cfg.xi = so.xi;
  cfg.limits.time_limit = so.time_limit;
  cfg.limits.gap_target = so.gap;
  cfg.norm = fit_norm_from_string(so.norm);
  cfg.seed = seed;
  cfg.jobs = jobs;

  std::vector<RunReport> reports;
  const std::vector<SweepRow> rows = run_sweep(cfg, out_dir.empty() ? nullptr : &reports);
  const std::string table = sweep_table_csv(rows);
  std::cout << table;
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    write_file_atomic(std::filesystem::path(out_dir) / "sweep.csv", table);
    for (std::size_t k = 0; k < reports.size(); ++k) {
      const RunReport& r = reports[k];
      const std::string name = r.instance.source.substr(r.instance.source.find(':') + 1) + "_" +
                               std::to_string(r.instance.rows) + "x" +
                               std::to_string(r.instance.cols) + "_n" +
                               fmt(r.instance.noise_sigma2.value_or(0.0)) + "_" + r.variant +
                               "_r" + std::to_string(k % cfg.repeats) + ".json";
      write_report(r, std::filesystem::path(out_dir) / name);
    }
  }
  return 0;
}

int run_sweep_xi(const InputOptions& in, const SolveOptions& so,
                 const std::vector<std::string>& xis, const std::string& out_dir) {
  auto loaded = in.load();
  const std::vector<double> values = parse_list(xis, "xi");
  const std::vector<RunResult> runs =
      sweep_xi(loaded.instance, so.config(), loaded.descriptor, values,
               loaded.truth ? &*loaded.truth : nullptr);
  std::string table = "xi,status,segments,objective,gap,time_s\n";
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const RunResult& r = runs[k];
    table += fmt(values[k]) + "," + r.report.status + "," +
             std::to_string(r.metrics.segment_count) + "," + fmt(r.report.objective) + "," +
             fmt(r.report.gap) + "," + fmt(r.report.wall_time) + "\n";
    if (!out_dir.empty())
      write_artifacts(r, loaded.instance.rows(), loaded.instance.cols(), out_dir,
                      in.default_stem() + "_xi" + fmt(values[k]));
  }
  std::cout << table;
  if (!out_dir.empty()) write_file_atomic(std::filesystem::path(out_dir) / "sweep_xi.csv", table);
  return 0;
}

int run_sweep_limits(const InputOptions& in, const SolveOptions& so,
                     const std::vector<std::string>& limits, const std::string& out_dir) {
  auto loaded = in.load();
  const std::vector<double> values = parse_list(limits, "time limit");
  for (double v : values)
    if (!(v > 0.0)) throw InvalidArgument("time limits must be positive");
  const std::vector<RunResult> runs =
      sweep_time_limits(loaded.instance, so.config(), loaded.descriptor, values,
                        loaded.truth ? &*loaded.truth : nullptr);
  std::string table = "time_limit,status,objective,bound,gap,time_s\n";
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const RunReport& r = runs[k].report;
    table += fmt(values[k]) + "," + r.status + "," + fmt(r.objective) + "," + fmt(r.best_bound) +
             "," + fmt(r.gap) + "," + fmt(r.wall_time) + "\n";
    if (!out_dir.empty())
      write_artifacts(runs[k], loaded.instance.rows(), loaded.instance.cols(), out_dir,
                      in.default_stem() + "_limit" + fmt(values[k]));
  }
  std::cout << table;
  if (!out_dir.empty())
    write_file_atomic(std::filesystem::path(out_dir) / "sweep_limits.csv", table);
  return 0;
}

int run_write_lp(const InputOptions& in, double xi, const std::string& variant,
                 const std::string& out) {
  auto loaded = in.load();
  const Params params = compute_lambda(loaded.instance, xi);
  const GridGraph& g = loaded.instance.graph();
  const VariantConfig v = variant_from_name(variant);
  std::vector<Cycle> cycles;
  if (v.initial_cycles != InitialCycles::none) cycles = enumerate_4cycles(g);
  if (v.initial_cycles == InitialCycles::four_and_eight) {
    std::vector<Cycle> eight = enumerate_8cycles(g);
    cycles.insert(cycles.end(), eight.begin(), eight.end());
  }
  const ModelDescription model = build_2d_model(loaded.instance, params, cycles);
  write_file_atomic(out, to_lp_format(model));
  const ModelStatistics s = model_statistics(model);
  std::cout << "wrote " << out << " (" << model.variables.size() << " columns, "
            << s.total_constraints << " rows, " << s.binaries << " binaries)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Piecewise-affine fitting of grid data by mixed-integer programming"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "pwfit 1.0");

  auto* solve = app.add_subcommand("solve", "Fit one instance and write w, f, labels and report");
  InputOptions solve_in;
  SolveOptions solve_opts;
  std::string solve_out = ".", solve_stem;
  solve_in.attach(solve);
  solve_opts.attach(solve);
  solve->add_option("--xi", solve_opts.xi, "Regularization scale")->capture_default_str()->check(CLI::PositiveNumber);
  solve->add_option("--out", solve_out, "Output directory")->capture_default_str();
  solve->add_option("--stem", solve_stem, "Artifact file prefix (default: input name)");

  auto* sweep = app.add_subcommand("sweep", "Variant x noise x size matrix on the built-in scenes");
  std::vector<std::string> sizes{"20x30"}, noise{"0"}, variants{"mph-4"}, scenes;
  int repeats = 3, jobs = 1;
  std::string aggregate = "median", sweep_out;
  std::uint64_t sweep_seed = 1;
  SolveOptions sweep_opts;
  sweep->add_option("--sizes", sizes, "Comma-separated ROWSxCOLS")->capture_default_str()->delimiter(',');
  sweep->add_option("--noise", noise, "Comma-separated noise variances")->capture_default_str()->delimiter(',');
  sweep->add_option("--variants", variants, "Comma-separated variants")->capture_default_str()->delimiter(',');
  sweep->add_option("--scenes", scenes, "Comma-separated scenes (default: all)")
      ->delimiter(',')
      ->check(CLI::IsMember(builtin_synthetic_names()));
  sweep->add_option("--repeats", repeats, "Runs per cell")->capture_default_str()->check(CLI::PositiveNumber);
  sweep->add_option("--aggregate", aggregate, "Aggregation over repeats")->capture_default_str()
      ->check(CLI::IsMember({"median"}));
  sweep->add_option("--xi", sweep_opts.xi, "Regularization scale")->capture_default_str()->check(CLI::PositiveNumber);
  sweep->add_option("--seed", sweep_seed, "Base seed of the scene noise")->capture_default_str();
  sweep->add_option("--jobs", jobs, "Parallel workers")->capture_default_str()->check(CLI::PositiveNumber);
  sweep->add_option("--out", sweep_out, "Directory for the table and per-run reports");
  sweep_opts.attach(sweep, false);

  auto* xi_cmd = app.add_subcommand("sweep-xi", "One run per regularization scale");
  InputOptions xi_in;
  SolveOptions xi_opts;
  std::vector<std::string> xis{"0.5", "1", "2"};
  std::string xi_out;
  xi_in.attach(xi_cmd);
  xi_opts.attach(xi_cmd);
  xi_cmd->add_option("--xis", xis, "Comma-separated xi values")->capture_default_str()->delimiter(',');
  xi_cmd->add_option("--out", xi_out, "Directory for label maps and reports");

  auto* lim_cmd = app.add_subcommand("sweep-limits", "One run per time limit");
  InputOptions lim_in;
  SolveOptions lim_opts;
  std::vector<std::string> limits{"50", "200", "600", "1200"};
  std::string lim_out;
  lim_in.attach(lim_cmd);
  lim_opts.attach(lim_cmd);
  lim_cmd->add_option("--xi", lim_opts.xi, "Regularization scale")->capture_default_str()->check(CLI::PositiveNumber);
  lim_cmd->add_option("--limits", limits, "Comma-separated time limits in seconds")->capture_default_str()
      ->delimiter(',');
  lim_cmd->add_option("--out", lim_out, "Directory for artifacts and reports");

  auto* lp_cmd = app.add_subcommand("write-lp", "Write the model in CPLEX LP format");
  InputOptions lp_in;
  double lp_xi = 0.5;
  std::string lp_variant = "mp", lp_out;
  lp_in.attach(lp_cmd);
  lp_cmd->add_option("--xi", lp_xi, "Regularization scale")->capture_default_str()->check(CLI::PositiveNumber);
  lp_cmd->add_option("--variant", lp_variant, "Variant whose initial cycles are included")->capture_default_str()
      ->check(CLI::IsMember(variant_names()));
  lp_cmd->add_option("--out", lp_out, "Output .lp file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    if (const auto nl = msg.find('\n'); nl != std::string::npos) msg.resize(nl);
    std::cerr << "pwfit: " << msg << "\n";
    return 2;
  }

  try {
    if (*solve) return run_solve(solve_in, solve_opts, solve_out, solve_stem);
    if (*sweep)
      return run_sweep_cmd(sizes, noise, variants, scenes, repeats, sweep_opts, sweep_seed, jobs,
                           sweep_out);
    if (*xi_cmd) return run_sweep_xi(xi_in, xi_opts, xis, xi_out);
    if (*lim_cmd) return run_sweep_limits(lim_in, lim_opts, limits, lim_out);
    if (*lp_cmd) return run_write_lp(lp_in, lp_xi, lp_variant, lp_out);
  } catch (const std::exception& e) {
    std::cerr << "pwfit: error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

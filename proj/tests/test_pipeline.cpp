#include <filesystem>

#include "doctest.h"
#include "pwfit/error.hpp"
#include "pwfit/instance_io.hpp"
#include "pwfit/pipeline.hpp"

using namespace pwfit;
namespace fs = std::filesystem;

namespace {

InstanceDescriptor describe(const std::string& name, const SyntheticInstance& s) {
  return {"synthetic:" + name, s.instance.rows(), s.instance.cols(), 0.0, 0, s.clipped_pixels};
}

}  // namespace

TEST_SUITE("pipeline") {
  TEST_CASE("heuristic run") {
    const SyntheticInstance s = generate_synthetic(builtin_synthetic("plus", 12, 16));
    RunConfig cfg;
    cfg.variant = kHeuristicVariant;
    const GroundTruth truth{s.truth.labels, s.clean};
    const RunResult r = run_instance(s.instance, cfg, describe("plus", s), &truth);
    CHECK_FALSE(r.solution.has_value());
    CHECK(r.has_fit());
    CHECK(r.report.status == "heuristic");
    CHECK_FALSE(r.report.best_bound.has_value());
    CHECK_FALSE(r.report.gap.has_value());
    CHECK(r.metrics.rand_index.has_value());
    CHECK(r.metrics.segment_count == r.segmentation.num_segments());
    CHECK(r.report.objective == doctest::Approx(r.metrics.objective));
  }

  TEST_CASE("exact run recovers a clean scene") {
    const SyntheticInstance s = generate_synthetic(builtin_synthetic("plus", 20, 30));
    RunConfig cfg;
    cfg.limits.time_limit = 120;
    const GroundTruth truth{s.truth.labels, s.clean};
    const RunResult r = run_instance(s.instance, cfg, describe("plus", s), &truth);
    REQUIRE(r.solution.has_value());
    CHECK(r.report.status == "optimal");
    CHECK(*r.metrics.rand_index == 1.0);
    CHECK(*r.metrics.exact_match);
    CHECK(*r.metrics.mae_f <= 1e-6);
    CHECK(r.report.variant == "mph-4");
    CHECK(r.report.lambda_row == r.params.lambda_row);
  }

  TEST_CASE("median") {
    CHECK(median({3.0, 1.0, 2.0}) == 2.0);
    CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
    CHECK_THROWS_AS(median({}), InvalidArgument);
  }

  TEST_CASE("sweeps are deterministic") {
    SweepConfig cfg;
    cfg.sizes = {{8, 10}};
    cfg.noise = {0.0, 0.001};
    cfg.variants = {kHeuristicVariant};
    cfg.scenes = {"cross", "terraces"};
    cfg.repeats = 2;
    cfg.jobs = 3;
    std::vector<RunReport> reports;
    const std::vector<SweepRow> a = run_sweep(cfg, &reports);
    CHECK(a.size() == 4);
    CHECK(reports.size() == 8);
    cfg.jobs = 1;
    const std::vector<SweepRow> b = run_sweep(cfg);
    REQUIRE(b.size() == a.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      CHECK(a[k].scene == b[k].scene);
      CHECK(a[k].objective == b[k].objective);
      CHECK(a[k].segments == b[k].segments);
      CHECK(a[k].statuses == "heuristic/heuristic");
    }
    const std::string csv = sweep_table_csv(a);
    CHECK(csv.rfind("scene,", 0) == 0);
    CHECK(derive_seed(1, 2) == derive_seed(1, 2));
    CHECK(derive_seed(1, 2) != derive_seed(1, 3));
  }

  TEST_CASE("artifacts") {
    const SyntheticInstance s = generate_synthetic(builtin_synthetic("cross", 6, 8));
    RunConfig cfg;
    cfg.variant = kHeuristicVariant;
    const RunResult r = run_instance(s.instance, cfg, describe("cross", s));
    const fs::path dir = fs::temp_directory_path() / "pwfit_test_artifacts";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const auto written = write_artifacts(r, 6, 8, dir, "run");
    CHECK(written.size() == 6);
    for (const char* suffix : {"_w.pgm", "_w.csv", "_f.pgm", "_f.csv", "_labels.csv", "_report.json"})
      CHECK(fs::exists(dir / (std::string("run") + suffix)));
    CHECK(report_to_json(read_report(dir / "run_report.json")) == report_to_json(r.report));
    CHECK(parse_csv(read_file(dir / "run_w.csv")).values() == r.w);
    fs::remove_all(dir);
  }

  TEST_CASE("xi sweep") {
    const SyntheticInstance s = generate_synthetic(builtin_synthetic("terraces", 6, 8));
    RunConfig cfg;
    cfg.variant = kHeuristicVariant;
    const auto runs = sweep_xi(s.instance, cfg, describe("terraces", s), {0.5, 2.0});
    REQUIRE(runs.size() == 2);
    CHECK(runs[0].report.xi == 0.5);
    CHECK(runs[1].params.lambda_row[0] == doctest::Approx(4 * runs[0].params.lambda_row[0]));
    CHECK_THROWS_AS(sweep_xi(s.instance, cfg, describe("terraces", s), {}), InvalidArgument);
  }
}

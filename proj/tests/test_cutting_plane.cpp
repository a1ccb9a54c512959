#include <cmath>
#include <random>

#include "doctest.h"
#include "pwfit/formulation.hpp"
#include "pwfit/separation.hpp"
#include "pwfit/solver_backend.hpp"
#include "support/oracles.hpp"

using namespace pwfit;

namespace {

SolveLimits limits(double seconds = 60.0) {
  SolveLimits l;
  l.time_limit = seconds;
  return l;
}

std::vector<double> random_image(int m, int n, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> y(m * n);
  for (double& v : y) v = u(rng);
  return y;
}

// Three identical rows shaped like a V; the kink sits in the middle column.
GridInstance v_rows() {
  std::vector<double> y;
  for (int i = 0; i < 3; ++i)
    for (double v : {4.0, 3.0, 2.0, 3.0, 4.0}) y.push_back(v / 4.0);
  return GridInstance(3, 5, y);
}

}  // namespace

TEST_SUITE("cutting_plane") {
  TEST_CASE("collinear chain needs no boundary") {
    const GridInstance inst(1, 6, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6});
    const FitSolution s =
        cutting_plane_solve(inst, Params::uniform(1, 6, 0.05), variant_from_name("mp"), limits());
    CHECK(s.status == SolveStatus::optimal);
    CHECK(s.objective == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(s.rounds == 0);
    CHECK(s.cuts_added == 0);
    for (auto v : s.x) CHECK(v == 0);
  }

  TEST_CASE("step on a chain") {
    std::vector<double> y{0, 1, 2, 10, 11, 12};
    for (double& v : y) v /= 12.0;
    const double lambda = 0.01;
    const FitSolution s = cutting_plane_solve(GridInstance(1, 6, y), Params::uniform(1, 6, lambda),
                                              variant_from_name("mph"), limits());
    CHECK(s.status == SolveStatus::optimal);
    CHECK(s.objective == doctest::Approx(lambda).epsilon(1e-7));
    CHECK(s.x == EdgeLabeling{0, 0, 1, 0, 0});
    for (int k = 0; k < 6; ++k) CHECK(s.w[k] == doctest::Approx(y[k]).epsilon(1e-7));
  }

  TEST_CASE("outlier is cut off") {
    std::vector<double> y;
    for (int i = 0; i < 9; ++i) y.push_back(0.1 * i);
    y[4] = 0.9;
    const FitSolution s = cutting_plane_solve(GridInstance(1, 9, y), Params::uniform(1, 9, 0.05),
                                              variant_from_name("mp"), limits());
    const oracle::Optimum o = oracle::brute_force_1d(y, 0.05, 2.0);
    // The outlier alone or paired with either neighbour: two nodes always fit a line.
    CHECK(o.optimal_labelings == 3);
    CHECK(o.objective == doctest::Approx(0.1).epsilon(1e-9));
    CHECK(s.objective == doctest::Approx(0.1).epsilon(1e-7));
    int active = 0;
    for (auto v : s.x) active += v;
    CHECK(active == 2);
    CHECK((s.x[3] == 1 || s.x[4] == 1));
  }

  TEST_CASE("random chains agree with enumeration") {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 25; ++trial) {
      const int n = 3 + static_cast<int>(rng() % 4);
      const std::vector<double> y = random_image(1, n, rng);
      const double lambda = 0.02 + 0.02 * (trial % 5);
      const FitSolution s = cutting_plane_solve(GridInstance(1, n, y), Params::uniform(1, n, lambda),
                                                variant_from_name("mph"), limits());
      const oracle::Optimum o = oracle::brute_force_1d(y, lambda, 2.0);
      REQUIRE(s.status == SolveStatus::optimal);
      CHECK(s.objective == doctest::Approx(o.objective).epsilon(1e-6));
    }
  }

  TEST_CASE("dormant neighbours force zero second difference on a chain") {
    std::mt19937 rng(23);
    for (int trial = 0; trial < 25; ++trial) {
      const int n = 5 + static_cast<int>(rng() % 6);
      const std::vector<double> y = random_image(1, n, rng);
      const FitSolution s = cutting_plane_solve(GridInstance(1, n, y), Params::uniform(1, n, 0.05),
                                                variant_from_name("mp"), limits());
      REQUIRE(s.status == SolveStatus::optimal);
      for (int i = 1; i + 1 < n; ++i)
        if (s.x[i - 1] + s.x[i] == 0)
          CHECK(std::abs(s.w[i - 1] - 2 * s.w[i] + s.w[i + 1]) <= 1e-6);
    }
  }

  TEST_CASE("small grids agree with enumeration") {
    std::mt19937 rng(29);
    for (int trial = 0; trial < 6; ++trial) {
      const std::vector<double> y = random_image(3, 3, rng);
      const GridInstance inst(3, 3, y);
      const Params p = compute_lambda(inst, 0.5);
      const oracle::Optimum o =
          oracle::brute_force_2d({3, 3}, y, p.lambda_row, p.lambda_col, p.big_m);
      for (const std::string name : {"mp", "mph-4-f"}) {
        const FitSolution s = cutting_plane_solve(inst, p, variant_from_name(name), limits());
        REQUIRE(s.status == SolveStatus::optimal);
        CHECK(s.multicut_feasible);
        CHECK(oracle::is_multicut({3, 3}, s.x));
        CHECK(s.objective == doctest::Approx(o.objective).epsilon(1e-6));
      }
    }
  }

  TEST_CASE("relaxation admits an infeasible labeling at the optimum") {
    const GridInstance inst = v_rows();
    const GridGraph& g = inst.graph();
    const Params p = compute_lambda(inst, 0.5);
    CHECK(p.lambda_row[0] == doctest::Approx(0.125));
    for (double l : p.lambda_col) CHECK(l == 0.0);

    auto relaxed = load_model(build_2d_model(inst, p));
    const SolveReport r = relaxed->solve(limits());
    REQUIRE(r.status == SolveStatus::optimal);
    CHECK(r.objective == doctest::Approx(3 * 0.125).epsilon(1e-7));

    // Row 0 breaks left of the kink, rows 1 and 2 right of it.
    EdgeLabeling mixed(g.num_edges(), 0);
    mixed[g.row_edge(0, 1)] = 1;
    mixed[g.row_edge(1, 2)] = 1;
    mixed[g.row_edge(2, 2)] = 1;
    const auto fit = relaxed->solve_fixed_labeling(mixed);
    REQUIRE(fit.has_value());
    CHECK(fit->objective == doctest::Approx(r.objective).epsilon(1e-7));

    const SeparationOutcome phase1 = check_feasibility(g, mixed);
    CHECK_FALSE(phase1.feasible);
    CutPool pool;
    const SeparationOutcome cuts = separate(g, mixed, {}, pool, 100);
    REQUIRE_FALSE(cuts.new_cuts.empty());
    bool face = false;
    for (const MulticutCut& c : cuts.new_cuts) face = face || c.cycle.size() == 4;
    CHECK(face);

    const FitSolution s = cutting_plane_solve(inst, p, variant_from_name("mp"), limits());
    CHECK(s.status == SolveStatus::optimal);
    CHECK(s.multicut_feasible);
    CHECK(s.objective == doctest::Approx(r.objective).epsilon(1e-7));
  }

  TEST_CASE("constant image") {
    const GridInstance inst(4, 5, std::vector<double>(20, 0.4));
    const FitSolution s =
        cutting_plane_solve(inst, compute_lambda(inst, 0.5), variant_from_name("mp"), limits());
    CHECK(s.status == SolveStatus::optimal);
    CHECK(s.rounds == 0);
    CHECK(s.objective == doctest::Approx(0.0).epsilon(1e-9));
  }

  TEST_CASE("scaling data, weights and big-M scales the objective") {
    std::mt19937 rng(41);
    for (int trial = 0; trial < 5; ++trial) {
      const std::vector<double> y = random_image(3, 3, rng);
      const GridInstance inst(3, 3, y);
      const Params p = compute_lambda(inst, 0.5);
      const double c = 3.0;
      std::vector<double> yc = y;
      for (double& v : yc) v *= c;
      Params pc = p;
      for (double& l : pc.lambda_row) l *= c;
      for (double& l : pc.lambda_col) l *= c;
      pc.big_m *= c;
      const FitSolution a = cutting_plane_solve(inst, p, variant_from_name("mph-4"), limits());
      const FitSolution b =
          cutting_plane_solve(GridInstance(3, 3, yc), pc, variant_from_name("mph-4"), limits());
      REQUIRE(a.status == SolveStatus::optimal);
      REQUIRE(b.status == SolveStatus::optimal);
      CHECK(b.objective == doctest::Approx(c * a.objective).epsilon(1e-6));
    }
  }

  TEST_CASE("round callback sees every round") {
    const GridInstance inst = v_rows();
    int calls = 0;
    const FitSolution s = cutting_plane_solve(inst, compute_lambda(inst, 0.5),
                                              variant_from_name("mp"), limits(),
                                              [&](const RoundTrace& t) {
                                                CHECK(t.round == calls);
                                                ++calls;
                                              });
    CHECK(calls == static_cast<int>(s.trace.size()));
    CHECK(calls == s.rounds + 1);
    CHECK(s.first_objective.has_value());
  }
}

#include <algorithm>
#include <cmath>
#include <random>

#include "pwfit/error.hpp"
#include "pwfit/instance_io.hpp"

namespace pwfit {

SyntheticInstance generate_synthetic(const SyntheticSpec& spec) {
  const GridGraph g(spec.rows, spec.cols);
  if (spec.pieces.empty()) throw InvalidArgument("synthetic spec has no pieces");
  if (spec.noise_sigma2 < 0.0) throw InvalidArgument("noise variance must be non-negative");

  std::vector<int> owner(g.num_nodes(), -1);
  std::vector<double> clean(g.num_nodes());
  for (int i = 0; i < spec.rows; ++i) {
    for (int j = 0; j < spec.cols; ++j) {
      const NodeId v = g.node(i, j);
      for (int p = 0; p < static_cast<int>(spec.pieces.size()); ++p) {
        if (!spec.pieces[p].mask(i, j, spec.rows, spec.cols)) continue;
        if (owner[v] >= 0)
          throw InvalidArgument("synthetic masks " + std::to_string(owner[v]) + " and " +
                                std::to_string(p) + " overlap at (" + std::to_string(i) + ", " +
                                std::to_string(j) + ")");
        owner[v] = p;
      }
      if (owner[v] < 0)
        throw InvalidArgument("synthetic masks leave (" + std::to_string(i) + ", " +
                              std::to_string(j) + ") uncovered");
      const Plane& pl = spec.pieces[owner[v]].plane;
      clean[v] = pl.a1 * i + pl.a2 * j + pl.b;
      if (clean[v] < 0.0 || clean[v] > 1.0)
        throw InvalidArgument("synthetic clean value outside [0,1] at (" + std::to_string(i) +
                              ", " + std::to_string(j) + ")");
    }
  }

  std::vector<double> y = clean;
  int clipped = 0;
  if (spec.noise_sigma2 > 0.0) {
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> noise(0.0, std::sqrt(spec.noise_sigma2));
    for (double& v : y) {
      const double noisy = v + noise(rng);
      const double c = std::clamp(noisy, 0.0, 1.0);
      if (c != noisy) ++clipped;
      v = c;
    }
  }

  return {GridInstance(g, std::move(y)), std::move(clean), connected_segmentation(g, owner),
          clipped};
}

namespace {

// Planes below are written in unit coordinates u = i/(m-1), v = j/(n-1) and
// converted to pixel slopes so a scene looks the same at every size.
struct UnitPlane {
  double au, av, b;
};

Plane to_pixels(const UnitPlane& p, int rows, int cols) {
  return {rows > 1 ? p.au / (rows - 1) : 0.0, cols > 1 ? p.av / (cols - 1) : 0.0, p.b};
}

double unit(int k, int count) { return count > 1 ? static_cast<double>(k) / (count - 1) : 0.0; }

using UnitMask = std::function<bool(double, double)>;

PieceSpec piece(UnitMask mask, UnitPlane plane, int rows, int cols) {
  return {[mask = std::move(mask)](int i, int j, int m, int n) {
            return mask(unit(i, m), unit(j, n));
          },
          to_pixels(plane, rows, cols)};
}

std::vector<PieceSpec> cross_scene(int m, int n) {
  // Split by v = 0.25 + 0.5u (crosses every row) and u = 0.3 + 0.4v (crosses
  // every column).
  auto left = [](double u, double v) { return v < 0.25 + 0.5 * u; };
  auto top = [](double u, double v) { return u < 0.3 + 0.4 * v; };
  return {
      piece([=](double u, double v) { return left(u, v) && top(u, v); }, {0.20, 0.15, 0.10}, m, n),
      piece([=](double u, double v) { return !left(u, v) && top(u, v); }, {-0.25, -0.10, 0.85}, m, n),
      piece([=](double u, double v) { return left(u, v) && !top(u, v); }, {0.30, -0.20, 0.55}, m, n),
      piece([=](double u, double v) { return !left(u, v) && !top(u, v); }, {-0.15, 0.20, 0.25}, m, n),
  };
}

std::vector<PieceSpec> plus_scene(int m, int n) {
  // Vertical band on top of a horizontal band on top of the background.
  auto vertical = [](double u, double v) { return v >= 0.35 + 0.1 * u && v < 0.6 + 0.1 * u; };
  auto horizontal = [](double u, double) { return u >= 0.4 && u < 0.65; };
  return {
      piece([=](double u, double v) { return !vertical(u, v) && !horizontal(u, v); },
            {0.10, 0.10, 0.05}, m, n),
      piece(vertical, {-0.20, -0.10, 0.90}, m, n),
      piece([=](double u, double v) { return horizontal(u, v) && !vertical(u, v); },
            {-0.20, 0.05, 0.50}, m, n),
  };
}

std::vector<PieceSpec> terraces_scene(int m, int n) {
  auto s = [](double u, double v) { return 0.6 * u + 0.4 * v; };
  return {
      piece([=](double u, double v) { return s(u, v) < 0.3; }, {-0.30, -0.20, 0.70}, m, n),
      piece([=](double u, double v) { return s(u, v) >= 0.3 && s(u, v) < 0.62; },
            {0.25, 0.20, 0.15}, m, n),
      piece([=](double u, double v) { return s(u, v) >= 0.62; }, {-0.20, -0.30, 0.95}, m, n),
  };
}

}  // namespace

std::vector<std::string> builtin_synthetic_names() { return {"cross", "plus", "terraces"}; }

SyntheticSpec builtin_synthetic(const std::string& name, int rows, int cols, double noise_sigma2,
                                std::uint64_t seed) {
  if (rows < 2 || cols < 2) throw InvalidArgument("synthetic scenes need at least 2x2 pixels");
  SyntheticSpec spec;
  spec.name = name;
  spec.rows = rows;
  spec.cols = cols;
  spec.noise_sigma2 = noise_sigma2;
  spec.seed = seed;
  if (name == "cross") spec.pieces = cross_scene(rows, cols);
  else if (name == "plus") spec.pieces = plus_scene(rows, cols);
  else if (name == "terraces") spec.pieces = terraces_scene(rows, cols);
  else throw InvalidArgument("unknown synthetic scene '" + name + "' (expected cross, plus or terraces)");
  return spec;
}

}  // namespace pwfit

#include "pwfit/segmentation.hpp"

#include <cmath>
#include <unordered_map>

#include "pwfit/error.hpp"

namespace pwfit {

Segmentation Segmentation::from_labels(const GridGraph& g, const std::vector<int>& labels) {
  if (static_cast<int>(labels.size()) != g.num_nodes())
    throw InvalidArgument("label map does not match the grid");
  Segmentation s;
  s.labels.resize(labels.size());
  std::unordered_map<int, int> dense;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    auto [it, inserted] = dense.emplace(labels[v], static_cast<int>(dense.size()));
    if (inserted) s.segments.emplace_back();
    s.labels[v] = it->second;
    s.segments[it->second].push_back(v);
  }
  for (EdgeId e = 0; e < g.num_edges(); ++e)
    if (s.labels[g.edge(e).u] != s.labels[g.edge(e).v]) s.boundary.push_back(e);
  return s;
}

Segmentation connected_segmentation(const GridGraph& g, const std::vector<int>& labels) {
  if (static_cast<int>(labels.size()) != g.num_nodes())
    throw InvalidArgument("label map does not match the grid");
  EdgeLabeling x(g.num_edges());
  for (EdgeId e = 0; e < g.num_edges(); ++e)
    x[e] = labels[g.edge(e).u] != labels[g.edge(e).v];
  return Segmentation::from_labels(g, connected_components(g, x));
}

bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  std::unordered_map<int, int> ab, ba;
  for (std::size_t k = 0; k < a.size(); ++k) {
    auto [i, fresh_a] = ab.emplace(a[k], b[k]);
    auto [j, fresh_b] = ba.emplace(b[k], a[k]);
    if (i->second != b[k] || j->second != a[k]) return false;
  }
  return true;
}

double plane_distance(const Plane& p, const Plane& q) {
  return std::sqrt((p.a1 - q.a1) * (p.a1 - q.a1) + (p.a2 - q.a2) * (p.a2 - q.a2) +
                   (p.b - q.b) * (p.b - q.b));
}

void PlaneStats::add(double z1, double z2, double y) {
  n_ += 1;
  s1_ += z1;
  s2_ += z2;
  s11_ += z1 * z1;
  s12_ += z1 * z2;
  s22_ += z2 * z2;
  sy_ += y;
  s1y_ += z1 * y;
  s2y_ += z2 * y;
  syy_ += y * y;
}

void PlaneStats::merge(const PlaneStats& o) {
  n_ += o.n_;
  s1_ += o.s1_;
  s2_ += o.s2_;
  s11_ += o.s11_;
  s12_ += o.s12_;
  s22_ += o.s22_;
  sy_ += o.sy_;
  s1y_ += o.s1y_;
  s2y_ += o.s2y_;
  syy_ += o.syy_;
}

namespace {

constexpr double kTiny = 1e-9;

}  // namespace

std::pair<bool, bool> PlaneStats::fitted_axes() const {
  if (n_ <= 1) return {false, false};
  const double m1 = s1_ / n_, m2 = s2_ / n_;
  const double c11 = s11_ - n_ * m1 * m1;
  const double c22 = s22_ - n_ * m2 * m2;
  const double c12 = s12_ - n_ * m1 * m2;
  const bool spread1 = c11 > kTiny * n_;
  const bool spread2 = c22 > kTiny * n_;
  if (spread1 && spread2 && c11 * c22 - c12 * c12 > kTiny * c11 * c22) return {true, true};
  if (spread1 && (!spread2 || c11 >= c22)) return {true, false};
  return {false, spread2};
}

Plane PlaneStats::fit() const {
  Plane p;
  if (n_ <= 0) return p;
  const double m1 = s1_ / n_, m2 = s2_ / n_, my = sy_ / n_;
  // Centered second moments.
  const double c11 = s11_ - n_ * m1 * m1;
  const double c22 = s22_ - n_ * m2 * m2;
  const double c12 = s12_ - n_ * m1 * m2;
  const double c1y = s1y_ - n_ * m1 * my;
  const double c2y = s2y_ - n_ * m2 * my;
  const auto [use1, use2] = fitted_axes();
  if (use1 && use2) {
    const double det = c11 * c22 - c12 * c12;
    p.a1 = (c1y * c22 - c2y * c12) / det;
    p.a2 = (c2y * c11 - c1y * c12) / det;
  } else if (use1) {
    p.a1 = c1y / c11;
  } else if (use2) {
    p.a2 = c2y / c22;
  }
  p.b = my - p.a1 * m1 - p.a2 * m2;
  return p;
}

double PlaneStats::squared_error(const Plane& p) const {
  // sum (y - a1 z1 - a2 z2 - b)^2 expanded over the running sums.
  const double a1 = p.a1, a2 = p.a2, b = p.b;
  const double value = syy_ + a1 * a1 * s11_ + a2 * a2 * s22_ + b * b * n_ - 2 * a1 * s1y_ -
                       2 * a2 * s2y_ - 2 * b * sy_ + 2 * a1 * a2 * s12_ + 2 * a1 * b * s1_ +
                       2 * a2 * b * s2_;
  return value > 0.0 ? value : 0.0;
}

}  // namespace pwfit

#pragma once

#include <utility>
#include <vector>

#include "pwfit/grid.hpp"

namespace pwfit {

struct Segmentation {
  std::vector<int> labels;                    // node -> segment id
  std::vector<std::vector<NodeId>> segments;  // members, ascending
  std::vector<EdgeId> boundary;               // edges whose endpoints differ, ascending

  int num_segments() const { return static_cast<int>(segments.size()); }

  /// Relabels to dense ids in order of first appearance (row-major) and
  /// derives members and boundary. Labels need not be connected.
  static Segmentation from_labels(const GridGraph& g, const std::vector<int>& labels);
};

/// Splits every label into its 4-connected pieces.
Segmentation connected_segmentation(const GridGraph& g, const std::vector<int>& labels);

/// True when both label maps induce the same partition.
bool same_partition(const std::vector<int>& a, const std::vector<int>& b);

/// Plane value = a1 * z1 + a2 * z2 + b with z = (row, col). On a chain
/// (single-row grid) the position along the chain plays z1 and a2 = 0.
struct Plane {
  double a1 = 0.0;
  double a2 = 0.0;
  double b = 0.0;
};

double plane_distance(const Plane& p, const Plane& q);

/// Running sums for a least-squares plane over (z1, z2, y) samples.
class PlaneStats {
 public:
  void add(double z1, double z2, double y);
  void merge(const PlaneStats& other);
  double count() const { return n_; }

  /// Least-squares plane. Axes without spread get slope 0; if the two axes
  /// are collinear only the wider one is fitted; a single sample gives the
  /// constant plane.
  Plane fit() const;
  /// Which slopes fit() estimates: {z1, z2}.
  std::pair<bool, bool> fitted_axes() const;
  /// Sum of squared residuals of `p` over the samples.
  double squared_error(const Plane& p) const;

 private:
  double n_ = 0, s1_ = 0, s2_ = 0, s11_ = 0, s12_ = 0, s22_ = 0;
  double sy_ = 0, s1y_ = 0, s2y_ = 0, syy_ = 0;
};

}  // namespace pwfit

#pragma once

#include <array>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

namespace pwfit {

using NodeId = int;
using EdgeId = int;

// x_e = 1 marks an active edge (segment boundary), 0 a dormant one.
using EdgeLabeling = std::vector<std::uint8_t>;

struct Edge {
  NodeId u;  // u < v
  NodeId v;
};

struct Incidence {
  NodeId node;
  EdgeId edge;
};

/// 4-connected m x n grid. Nodes are numbered row-major. Edges are numbered
/// row edges first (((i,j),(i,j+1)) in row-major order), then column edges
/// (((i,j),(i+1,j)) in row-major order). This order is the layout of every
/// EdgeLabeling and of the x block in the MILP.
class GridGraph {
 public:
  GridGraph(int rows, int cols);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int num_nodes() const { return rows_ * cols_; }
  int num_row_edges() const { return rows_ * (cols_ - 1); }
  int num_col_edges() const { return (rows_ - 1) * cols_; }
  int num_edges() const { return num_row_edges() + num_col_edges(); }

  NodeId node(int row, int col) const { return row * cols_ + col; }
  int row_of(NodeId v) const { return v / cols_; }
  int col_of(NodeId v) const { return v % cols_; }

  EdgeId row_edge(int row, int col) const { return row * (cols_ - 1) + col; }
  EdgeId col_edge(int row, int col) const {
    return num_row_edges() + row * cols_ + col;
  }
  bool is_row_edge(EdgeId e) const { return e < num_row_edges(); }

  Edge edge(EdgeId e) const { return edges_[e]; }
  std::span<const Incidence> incident(NodeId v) const;
  std::optional<EdgeId> edge_between(NodeId a, NodeId b) const;
  bool adjacent(NodeId a, NodeId b) const { return edge_between(a, b).has_value(); }

 private:
  int rows_;
  int cols_;
  std::vector<Edge> edges_;
  std::vector<Incidence> incidence_;   // 4 slots per node
  std::vector<std::uint8_t> degree_;
};

/// Throws InvalidArgument when m < 1, n < 1 or m*n < 2.
GridGraph build_grid(int m, int n);

/// Closed walk through distinct nodes. nodes[k] and nodes[k+1] are joined by
/// edges[k]; edges.back() closes nodes.back() to nodes.front().
struct Cycle {
  std::vector<NodeId> nodes;
  std::vector<EdgeId> edges;
  bool chordless = false;
};

Cycle cycle_from_nodes(const GridGraph& g, std::span<const NodeId> nodes);
bool has_chord(const GridGraph& g, const Cycle& c);

/// Unit-square faces, edges listed top, right, bottom, left.
std::vector<Cycle> enumerate_4cycles(const GridGraph& g);

/// Chordless 8-edge cycles: the rings around each interior node.
std::vector<Cycle> enumerate_8cycles(const GridGraph& g);

/// Components of the subgraph of dormant edges. Labels are dense and ordered
/// by the smallest row-major node of each component.
std::vector<int> connected_components(const GridGraph& g, const EdgeLabeling& x);

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  int find(int a) {
    while (parent_[a] != a) {
      parent_[a] = parent_[parent_[a]];
      a = parent_[a];
    }
    return a;
  }

  // Returns the surviving root.
  int unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return a;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return a;
  }

 private:
  std::vector<int> parent_;
  std::vector<int> rank_;
};

}  // namespace pwfit

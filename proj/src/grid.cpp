#include "pwfit/grid.hpp"

#include <string>

#include "pwfit/error.hpp"

namespace pwfit {

GridGraph::GridGraph(int rows, int cols) : rows_(rows), cols_(cols) {
  if (rows < 1 || cols < 1 || static_cast<long>(rows) * cols < 2) {
    throw InvalidArgument("grid must have m >= 1, n >= 1 and m*n >= 2, got " +
                          std::to_string(rows) + "x" + std::to_string(cols));
  }
  edges_.reserve(num_edges());
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j + 1 < cols_; ++j) edges_.push_back({node(i, j), node(i, j + 1)});
  for (int i = 0; i + 1 < rows_; ++i)
    for (int j = 0; j < cols_; ++j) edges_.push_back({node(i, j), node(i + 1, j)});

  incidence_.assign(4 * num_nodes(), Incidence{-1, -1});
  degree_.assign(num_nodes(), 0);
  // Neighbor order per node: up, left, right, down (ascending node id).
  for (NodeId v = 0; v < num_nodes(); ++v) {
    int i = row_of(v), j = col_of(v);
    auto push = [&](NodeId w, EdgeId e) { incidence_[4 * v + degree_[v]++] = {w, e}; };
    if (i > 0) push(node(i - 1, j), col_edge(i - 1, j));
    if (j > 0) push(node(i, j - 1), row_edge(i, j - 1));
    if (j + 1 < cols_) push(node(i, j + 1), row_edge(i, j));
    if (i + 1 < rows_) push(node(i + 1, j), col_edge(i, j));
  }
}

std::span<const Incidence> GridGraph::incident(NodeId v) const {
  return {incidence_.data() + 4 * v, degree_[v]};
}

std::optional<EdgeId> GridGraph::edge_between(NodeId a, NodeId b) const {
  for (const Incidence& inc : incident(a))
    if (inc.node == b) return inc.edge;
  return std::nullopt;
}

GridGraph build_grid(int m, int n) { return GridGraph(m, n); }

Cycle cycle_from_nodes(const GridGraph& g, std::span<const NodeId> nodes) {
  Cycle c;
  c.nodes.assign(nodes.begin(), nodes.end());
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    NodeId a = nodes[k], b = nodes[(k + 1) % nodes.size()];
    auto e = g.edge_between(a, b);
    if (!e) throw InvalidArgument("cycle nodes " + std::to_string(a) + " and " +
                                  std::to_string(b) + " are not adjacent");
    c.edges.push_back(*e);
  }
  c.chordless = !has_chord(g, c);
  return c;
}

bool has_chord(const GridGraph& g, const Cycle& c) {
  const std::size_t len = c.nodes.size();
  std::vector<int> position(g.num_nodes(), -1);
  for (std::size_t k = 0; k < len; ++k) position[c.nodes[k]] = static_cast<int>(k);
  for (std::size_t k = 0; k < len; ++k) {
    for (const Incidence& inc : g.incident(c.nodes[k])) {
      int p = position[inc.node];
      if (p < 0) continue;
      std::size_t d = (static_cast<std::size_t>(p) + len - k) % len;
      if (d != 1 && d != len - 1) return true;
    }
  }
  return false;
}

std::vector<Cycle> enumerate_4cycles(const GridGraph& g) {
  std::vector<Cycle> out;
  for (int i = 0; i + 1 < g.rows(); ++i) {
    for (int j = 0; j + 1 < g.cols(); ++j) {
      Cycle c;
      c.nodes = {g.node(i, j), g.node(i, j + 1), g.node(i + 1, j + 1), g.node(i + 1, j)};
      c.edges = {g.row_edge(i, j), g.col_edge(i, j + 1), g.row_edge(i + 1, j),
                 g.col_edge(i, j)};
      c.chordless = true;
      out.push_back(std::move(c));
    }
  }
  return out;
}

std::vector<Cycle> enumerate_8cycles(const GridGraph& g) {
  std::vector<Cycle> out;
  for (int i = 1; i + 1 < g.rows(); ++i) {
    for (int j = 1; j + 1 < g.cols(); ++j) {
      const NodeId ring[] = {g.node(i - 1, j - 1), g.node(i - 1, j), g.node(i - 1, j + 1),
                             g.node(i, j + 1),     g.node(i + 1, j + 1), g.node(i + 1, j),
                             g.node(i + 1, j - 1), g.node(i, j - 1)};
      Cycle c = cycle_from_nodes(g, ring);
      c.chordless = true;
      out.push_back(std::move(c));
    }
  }
  return out;
}

std::vector<int> connected_components(const GridGraph& g, const EdgeLabeling& x) {
  if (static_cast<int>(x.size()) != g.num_edges())
    throw InvalidArgument("edge labeling has " + std::to_string(x.size()) +
                          " entries, grid has " + std::to_string(g.num_edges()) + " edges");
  UnionFind uf(g.num_nodes());
  for (EdgeId e = 0; e < g.num_edges(); ++e)
    if (!x[e]) uf.unite(g.edge(e).u, g.edge(e).v);

  std::vector<int> root_label(g.num_nodes(), -1);
  std::vector<int> labels(g.num_nodes());
  int next = 0;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    int r = uf.find(v);
    if (root_label[r] < 0) root_label[r] = next++;
    labels[v] = root_label[r];
  }
  return labels;
}

}  // namespace pwfit

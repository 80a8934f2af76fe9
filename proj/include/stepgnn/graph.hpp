#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace stepgnn {

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Edge = std::pair<std::size_t, std::size_t>;

/// Finite simple undirected graph whose vertices are partitioned into
/// `palette` colors (1-based). Immutable after construction.
class LabeledGraph {
 public:
  LabeledGraph() = default;
  /// Throws GraphError on self loops, out-of-range endpoints, duplicate
  /// edges, or colors outside [1, palette].
  LabeledGraph(std::size_t n, int palette, std::vector<int> colors, std::vector<Edge> edges);

  std::size_t size() const { return colors_.size(); }
  int palette() const { return palette_; }
  int color(std::size_t v) const { return colors_[v]; }
  const std::vector<int>& colors() const { return colors_; }
  /// Neighbours in ascending id order.
  std::span<const std::size_t> neighbors(std::size_t v) const;
  std::size_t degree(std::size_t v) const { return adjacency_[v].size(); }
  std::size_t max_degree() const;
  std::size_t edge_count() const { return edge_count_; }
  /// Edges as (u, v) with u < v, sorted.
  std::vector<Edge> edges() const;

  /// Same graph with vertex v renamed perm[v].
  LabeledGraph relabeled(std::span<const std::size_t> perm) const;
  LabeledGraph recolored(int palette, std::vector<int> colors) const;

  friend bool operator==(const LabeledGraph& a, const LabeledGraph& b);

 private:
  int palette_ = 1;
  std::vector<int> colors_;
  std::vector<std::vector<std::size_t>> adjacency_;
  std::size_t edge_count_ = 0;
};

/// Shape of the two-level tree T[x, k, m]: root s with m children
/// x_1..x_m, x leaves under x_1 and k leaves under each of x_2..x_m.
struct TreeParams {
  std::size_t x = 0;
  std::size_t k = 0;
  std::size_t m = 1;
};

struct RootedTree {
  LabeledGraph graph;
  std::size_t root = 0;
};

/// Unicolored T[x, k, m]. Vertex 0 is s, vertices 1..m are x_1..x_m, then the
/// leaves of x_1 followed by the leaves of x_2, ..., x_m.
RootedTree make_tree(const TreeParams& p);

/// Vertex count 1 + m + x + (m - 1) k.
std::size_t tree_order(const TreeParams& p);

/// Recolors a tree as red (1) root and internal vertices with blue (2) leaves.
RootedTree color_red_blue(const RootedTree& t);

/// Erdos-Renyi G(n, p) with p = avg_degree / (n - 1) and i.i.d. uniform
/// colors in [1, palette]. Deterministic per seed.
LabeledGraph random_graph(std::size_t n, double avg_degree, int palette, std::uint64_t seed);

/// Uniform random labelled tree (random attachment), colors uniform.
LabeledGraph random_tree(std::size_t n, int palette, std::uint64_t seed);

struct GraphFile {
  LabeledGraph graph;
  std::optional<std::size_t> root;
};

/// Line format: `n palette`, then n colors, then one `u v` line per edge
/// with u < v, then an optional `root r`.
void write_graph(std::ostream& out, const LabeledGraph& g, std::optional<std::size_t> root = {});
GraphFile read_graph(std::istream& in);
void write_graph(const std::filesystem::path& path, const LabeledGraph& g,
                 std::optional<std::size_t> root = {});
GraphFile read_graph(const std::filesystem::path& path);

}  // namespace stepgnn

#include "stepgnn/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

namespace stepgnn {

LabeledGraph::LabeledGraph(std::size_t n, int palette, std::vector<int> colors,
                           std::vector<Edge> edges)
    : palette_(palette), colors_(std::move(colors)), adjacency_(n) {
  if (palette < 1) throw GraphError("palette size must be >= 1");
  if (colors_.size() != n)
    throw GraphError("expected " + std::to_string(n) + " colors, got " +
                     std::to_string(colors_.size()));
  for (std::size_t v = 0; v < n; ++v) {
    if (colors_[v] < 1 || colors_[v] > palette)
      throw GraphError("color " + std::to_string(colors_[v]) + " of vertex " + std::to_string(v) +
                       " outside [1, " + std::to_string(palette) + "]");
  }
  for (auto [u, v] : edges) {
    if (u >= n || v >= n)
      throw GraphError("edge (" + std::to_string(u) + ", " + std::to_string(v) +
                       ") out of range");
    if (u == v) throw GraphError("self-loop at vertex " + std::to_string(u));
    adjacency_[u].push_back(v);
    adjacency_[v].push_back(u);
  }
  for (auto& nb : adjacency_) {
    std::sort(nb.begin(), nb.end());
    if (std::adjacent_find(nb.begin(), nb.end()) != nb.end())
      throw GraphError("duplicate edge");
  }
  edge_count_ = edges.size();
}

std::span<const std::size_t> LabeledGraph::neighbors(std::size_t v) const {
  return adjacency_[v];
}

std::size_t LabeledGraph::max_degree() const {
  std::size_t best = 0;
  for (const auto& nb : adjacency_) best = std::max(best, nb.size());
  return best;
}

std::vector<Edge> LabeledGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (std::size_t u = 0; u < adjacency_.size(); ++u)
    for (std::size_t v : adjacency_[u])
      if (u < v) out.emplace_back(u, v);
  return out;
}

LabeledGraph LabeledGraph::relabeled(std::span<const std::size_t> perm) const {
  const std::size_t n = size();
  if (perm.size() != n) throw GraphError("permutation size mismatch");
  std::vector<int> colors(n);
  for (std::size_t v = 0; v < n; ++v) colors[perm[v]] = colors_[v];
  std::vector<Edge> es;
  for (auto [u, v] : edges()) es.emplace_back(perm[u], perm[v]);
  return LabeledGraph(n, palette_, std::move(colors), std::move(es));
}

LabeledGraph LabeledGraph::recolored(int palette, std::vector<int> colors) const {
  return LabeledGraph(size(), palette, std::move(colors), edges());
}

bool operator==(const LabeledGraph& a, const LabeledGraph& b) {
  return a.palette_ == b.palette_ && a.colors_ == b.colors_ && a.adjacency_ == b.adjacency_;
}

std::size_t tree_order(const TreeParams& p) {
  return 1 + p.m + p.x + (p.m - 1) * p.k;
}

RootedTree make_tree(const TreeParams& p) {
  if (p.m < 1) throw GraphError("tree needs m >= 1 internal children");
  const std::size_t n = tree_order(p);
  std::vector<Edge> edges;
  edges.reserve(n - 1);
  for (std::size_t i = 1; i <= p.m; ++i) edges.emplace_back(0, i);
  std::size_t next = p.m + 1;
  for (std::size_t j = 0; j < p.x; ++j) edges.emplace_back(1, next++);
  for (std::size_t i = 2; i <= p.m; ++i)
    for (std::size_t j = 0; j < p.k; ++j) edges.emplace_back(i, next++);
  return {LabeledGraph(n, 1, std::vector<int>(n, 1), std::move(edges)), 0};
}

RootedTree color_red_blue(const RootedTree& t) {
  // Leaves are the degree-one vertices away from the root and its children.
  const auto& g = t.graph;
  std::vector<int> colors(g.size(), 1);
  for (std::size_t v = 0; v < g.size(); ++v) {
    if (v == t.root) continue;
    const auto nb = g.neighbors(v);
    const bool child_of_root = std::find(nb.begin(), nb.end(), t.root) != nb.end();
    if (!child_of_root) colors[v] = 2;
  }
  return {g.recolored(2, std::move(colors)), t.root};
}

LabeledGraph random_graph(std::size_t n, double avg_degree, int palette, std::uint64_t seed) {
  if (n < 1) throw GraphError("random graph needs n >= 1");
  if (palette < 1) throw GraphError("palette size must be >= 1");
  const double p = n == 1 ? 0.0 : avg_degree / static_cast<double>(n - 1);
  if (!(p >= 0.0 && p <= 1.0))
    throw GraphError("edge probability " + std::to_string(p) + " outside [0, 1]");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick_color(1, palette);
  std::vector<int> colors(n);
  for (auto& c : colors) c = pick_color(rng);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<Edge> edges;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v)
      if (coin(rng) < p) edges.emplace_back(u, v);
  return LabeledGraph(n, palette, std::move(colors), std::move(edges));
}

LabeledGraph random_tree(std::size_t n, int palette, std::uint64_t seed) {
  if (n < 1) throw GraphError("random tree needs n >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick_color(1, palette);
  std::vector<int> colors(n);
  for (auto& c : colors) c = pick_color(rng);
  std::vector<Edge> edges;
  for (std::size_t v = 1; v < n; ++v) {
    std::uniform_int_distribution<std::size_t> parent(0, v - 1);
    edges.emplace_back(parent(rng), v);
  }
  return LabeledGraph(n, palette, std::move(colors), std::move(edges));
}

void write_graph(std::ostream& out, const LabeledGraph& g, std::optional<std::size_t> root) {
  out << g.size() << ' ' << g.palette() << '\n';
  for (std::size_t v = 0; v < g.size(); ++v) out << (v ? " " : "") << g.color(v);
  out << '\n';
  for (auto [u, v] : g.edges()) out << u << ' ' << v << '\n';
  if (root) out << "root " << *root << '\n';
}

GraphFile read_graph(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&](bool required) -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    if (required) throw GraphError("unexpected end of graph file after line " +
                                   std::to_string(line_no));
    return false;
  };
  auto fail = [&](const std::string& what) {
    throw GraphError("line " + std::to_string(line_no) + ": " + what);
  };

  next_line(true);
  long long n = -1;
  int palette = 0;
  {
    std::istringstream hdr(line);
    std::string extra;
    if (!(hdr >> n >> palette) || (hdr >> extra) || n < 0) fail("expected header 'n palette'");
  }
  std::vector<int> colors;
  if (n > 0) {
    next_line(true);
    std::istringstream cs(line);
    int c = 0;
    while (cs >> c) colors.push_back(c);
    if (!cs.eof()) fail("malformed color list");
    if (colors.size() != static_cast<std::size_t>(n))
      fail("expected " + std::to_string(n) + " colors, found " + std::to_string(colors.size()));
  }
  std::vector<Edge> edges;
  std::optional<std::size_t> root;
  while (next_line(false)) {
    if (root) fail("content after root line");
    std::istringstream es(line);
    std::string first;
    es >> first;
    std::string extra;
    if (first == "root") {
      long long r = -1;
      if (!(es >> r) || (es >> extra) || r < 0 || r >= n) fail("malformed root line");
      root = static_cast<std::size_t>(r);
      continue;
    }
    long long u = -1;
    long long v = -1;
    std::istringstream pair(line);
    if (!(pair >> u >> v) || (pair >> extra)) fail("expected edge 'u v'");
    if (u == v) fail("self-loop at vertex " + std::to_string(u));
    if (u < 0 || v < 0 || u >= n || v >= n) fail("edge endpoint out of range");
    if (u > v) fail("edge endpoints must satisfy u < v");
    edges.emplace_back(static_cast<std::size_t>(u), static_cast<std::size_t>(v));
  }
  try {
    return {LabeledGraph(static_cast<std::size_t>(n), palette, std::move(colors),
                         std::move(edges)),
            root};
  } catch (const GraphError& e) {
    throw GraphError(std::string("invalid graph file: ") + e.what());
  }
}

void write_graph(const std::filesystem::path& path, const LabeledGraph& g,
                 std::optional<std::size_t> root) {
  std::ofstream out(path);
  if (!out) throw GraphError("cannot open " + path.string() + " for writing");
  write_graph(out, g, root);
}

GraphFile read_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw GraphError("cannot open " + path.string());
  return read_graph(in);
}

}  // namespace stepgnn

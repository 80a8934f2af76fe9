#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "stepgnn/compiler.hpp"
#include "stepgnn/graph.hpp"

namespace stepgnn {

/// Per-iteration, per-vertex embeddings. Iteration 0 holds the one-hot
/// colors zero-padded to the first layer's input width.
class EmbeddingTable {
 public:
  EmbeddingTable(std::size_t vertices, std::size_t width0);

  std::size_t vertices() const { return n_; }
  /// Number of completed iterations (the table holds iterations() + 1 rows).
  std::size_t iterations() const { return data_.size() - 1; }
  std::size_t width(std::size_t t) const { return widths_[t]; }
  std::span<const double> at(std::size_t t, std::size_t v) const;
  std::span<double> at(std::size_t t, std::size_t v);
  std::span<const double> final(std::size_t v) const { return at(iterations(), v); }

  void push_iteration(std::size_t width);

 private:
  std::size_t n_;
  std::vector<std::size_t> widths_;
  std::vector<std::vector<double>> data_;
};

struct ForwardOptions {
  /// Worker threads for the per-vertex update; results are bit-identical
  /// for every value.
  unsigned threads = 1;
};

/// xi^{t+1}(v) = act(A_t xi^t(v) + B_t sum_{w in N(v)} xi^t(w) + c_t), with
/// neighbour sums accumulated in ascending vertex order.
EmbeddingTable forward(const GnnSpec& spec, const LabeledGraph& g, ForwardOptions opts = {});

/// Output coordinate after the last iteration, one value per vertex.
std::vector<double> forward_output(const GnnSpec& spec, const LabeledGraph& g);

/// eps_t = max_v ||xi^t(v) - q^t(v)||_inf for t = 0..iterations.
struct LayerErrorReport {
  std::vector<double> eps;
  double final() const { return eps.back(); }
};

/// Runs the same weights under two activations. Throws SpecError when the
/// specs differ in anything but the activation.
LayerErrorReport layer_errors(const GnnSpec& approx, const GnnSpec& exact, const LabeledGraph& g);

struct Probe {
  std::size_t graph = 0;
  std::size_t vertex = 0;
  bool expected = false;
};

struct Corpus {
  std::vector<LabeledGraph> graphs;
  std::vector<Probe> probes;
};

/// Labels every vertex of every graph with the oracle value of f.
Corpus label_corpus(std::vector<LabeledGraph> graphs, const Formula& f);

/// min over probes of (xi - 1/2) for positives and (1/2 - xi) for
/// negatives at the output coordinate. Throws on an empty corpus.
double expressivity_margin(const GnnSpec& spec, const Corpus& corpus);

/// A margin above 1/6 means outputs within 1/3 of the right boolean.
inline bool expresses(double margin) { return margin > 1.0 / 6.0; }

}  // namespace stepgnn

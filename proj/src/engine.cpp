#include "stepgnn/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace stepgnn {

EmbeddingTable::EmbeddingTable(std::size_t vertices, std::size_t width0)
    : n_(vertices), widths_{width0}, data_{std::vector<double>(vertices * width0, 0.0)} {}

std::span<const double> EmbeddingTable::at(std::size_t t, std::size_t v) const {
  return {data_[t].data() + v * widths_[t], widths_[t]};
}

std::span<double> EmbeddingTable::at(std::size_t t, std::size_t v) {
  return {data_[t].data() + v * widths_[t], widths_[t]};
}

void EmbeddingTable::push_iteration(std::size_t width) {
  widths_.push_back(width);
  data_.emplace_back(n_ * width, 0.0);
}

namespace {

void update_range(const GnnLayer& layer, const ActivationSpec& act, const LabeledGraph& g,
                  const EmbeddingTable& table, EmbeddingTable& out_table, std::size_t t,
                  std::size_t begin, std::size_t end) {
  const std::size_t w = layer.in_dim();
  const std::size_t d = layer.out_dim();
  std::vector<double> agg(w);
  for (std::size_t v = begin; v < end; ++v) {
    std::fill(agg.begin(), agg.end(), 0.0);
    for (std::size_t u : g.neighbors(v)) {
      const auto xu = table.at(t, u);
      for (std::size_t i = 0; i < w; ++i) agg[i] += xu[i];
    }
    const auto xv = table.at(t, v);
    auto out = out_table.at(t + 1, v);
    for (std::size_t r = 0; r < d; ++r) {
      const auto a = layer.A.row(r);
      const auto b = layer.B.row(r);
      double pre = layer.c[r];
      for (std::size_t i = 0; i < w; ++i) pre += a[i] * xv[i] + b[i] * agg[i];
      out[r] = act(pre);
    }
  }
}

}  // namespace

EmbeddingTable forward(const GnnSpec& spec, const LabeledGraph& g, ForwardOptions opts) {
  const std::size_t n = g.size();
  const std::size_t width0 = spec.input_dim();
  if (static_cast<std::size_t>(g.palette()) > width0)
    throw SpecError("graph palette " + std::to_string(g.palette()) +
                    " does not fit the GNN input width " + std::to_string(width0));
  EmbeddingTable table(n, width0);
  for (std::size_t v = 0; v < n; ++v) table.at(0, v)[static_cast<std::size_t>(g.color(v) - 1)] = 1.0;

  std::size_t width = width0;
  for (std::size_t t = 0; t < spec.layers.size(); ++t) {
    const auto& layer = spec.layers[t];
    if (layer.in_dim() != width || layer.B.cols != width || layer.B.rows != layer.out_dim() ||
        layer.c.size() != layer.out_dim())
      throw SpecError("dimension mismatch in layer " + std::to_string(t + 1));
    table.push_iteration(layer.out_dim());
    const unsigned threads = std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (threads == 1) {
      update_range(layer, spec.activation, g, table, table, t, 0, n);
    } else {
      std::vector<std::jthread> pool;
      const std::size_t chunk = (n + threads - 1) / threads;
      for (unsigned k = 0; k < threads; ++k) {
        const std::size_t b = std::min(n, k * chunk);
        const std::size_t e = std::min(n, b + chunk);
        pool.emplace_back([&, b, e] { update_range(layer, spec.activation, g, table, table, t, b, e); });
      }
    }
    width = layer.out_dim();
  }
  return table;
}

std::vector<double> forward_output(const GnnSpec& spec, const LabeledGraph& g) {
  const auto table = forward(spec, g);
  std::vector<double> out(g.size());
  for (std::size_t v = 0; v < g.size(); ++v) out[v] = table.final(v)[spec.output_index];
  return out;
}

LayerErrorReport layer_errors(const GnnSpec& approx, const GnnSpec& exact, const LabeledGraph& g) {
  if (approx.d != exact.d || approx.iterations != exact.iterations ||
      approx.layers.size() != exact.layers.size())
    throw SpecError("layer_errors needs specs with identical shape");
  for (std::size_t t = 0; t < approx.layers.size(); ++t) {
    const auto& a = approx.layers[t];
    const auto& b = exact.layers[t];
    if (!(a.A == b.A) || !(a.B == b.B) || a.c != b.c)
      throw SpecError("layer_errors needs identical weights in layer " + std::to_string(t + 1));
  }
  const auto xa = forward(approx, g);
  const auto xe = forward(exact, g);
  LayerErrorReport rep;
  for (std::size_t t = 0; t <= xa.iterations(); ++t) {
    double worst = 0.0;
    for (std::size_t v = 0; v < g.size(); ++v) {
      const auto p = xa.at(t, v);
      const auto q = xe.at(t, v);
      for (std::size_t i = 0; i < p.size(); ++i) worst = std::max(worst, std::abs(p[i] - q[i]));
    }
    rep.eps.push_back(worst);
  }
  return rep;
}

Corpus label_corpus(std::vector<LabeledGraph> graphs, const Formula& f) {
  Corpus corpus{std::move(graphs), {}};
  const SubformulaList subs(f);
  for (std::size_t gi = 0; gi < corpus.graphs.size(); ++gi) {
    const auto truth = eval_all(subs, corpus.graphs[gi]);
    for (std::size_t v = 0; v < corpus.graphs[gi].size(); ++v)
      corpus.probes.push_back({gi, v, truth[subs.root_index()][v]});
  }
  return corpus;
}

double expressivity_margin(const GnnSpec& spec, const Corpus& corpus) {
  if (corpus.probes.empty()) throw std::invalid_argument("expressivity margin of an empty corpus");
  std::vector<std::vector<double>> outputs(corpus.graphs.size());
  double margin = std::numeric_limits<double>::infinity();
  for (const auto& p : corpus.probes) {
    auto& out = outputs.at(p.graph);
    if (out.empty()) out = forward_output(spec, corpus.graphs[p.graph]);
    const double xi = out.at(p.vertex);
    margin = std::min(margin, p.expected ? xi - 0.5 : 0.5 - xi);
  }
  return margin;
}

}  // namespace stepgnn

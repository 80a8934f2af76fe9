#pragma once

#include "stepgnn/compiler.hpp"

namespace stepgnn::fixtures {

// Hand-built Q1 weights: four identical 4x4 layers, every vertex starts at
// e_1, answer in coordinate 3.
inline GnnSpec hand_built_q1(ActivationSpec act = activation_by_name("sigma-star")) {
  GnnLayer layer{Matrix(4, 4), Matrix(4, 4), {-1.0, 1.0, 0.0, 1.0}};
  layer.A(1, 0) = -1.0;
  layer.A(3, 2) = -1.0;
  layer.B(0, 0) = 1.0;
  layer.B(2, 1) = 1.0;
  GnnSpec spec;
  spec.d = 4;
  spec.iterations = 4;
  spec.output_index = 3;
  spec.layers.assign(4, layer);
  spec.activation = std::move(act);
  return spec;
}

// Q1 straight from its English reading: every neighbour has degree >= 2.
inline bool q1_by_degree(const LabeledGraph& g, std::size_t v) {
  for (std::size_t w : g.neighbors(v))
    if (g.degree(w) < 2) return false;
  return true;
}

}  // namespace stepgnn::fixtures

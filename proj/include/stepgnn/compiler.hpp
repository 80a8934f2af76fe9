#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "stepgnn/activation.hpp"
#include "stepgnn/formula.hpp"

namespace stepgnn {

/// Dense row-major matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
  std::size_t row_nonzeros(std::size_t r) const;

  friend bool operator==(const Matrix&, const Matrix&) = default;
};

/// One combine step: x' = act(A x + B y + c) where y is the neighbour sum.
/// A and B are d x w with w the width of the previous embedding.
struct GnnLayer {
  Matrix A;
  Matrix B;
  std::vector<double> c;

  std::size_t out_dim() const { return A.rows; }
  std::size_t in_dim() const { return A.cols; }
};

/// Compiled GNN. Layer 1 reads the one-hot color block (width = palette) and
/// every later layer reads the d subformula coordinates.
struct GnnSpec {
  std::size_t d = 0;
  std::size_t iterations = 0;
  std::size_t output_index = 0;
  std::vector<GnnLayer> layers;
  ActivationSpec activation = activation_by_name("sigma-star");

  /// Width of the initial one-hot features.
  std::size_t input_dim() const;
  /// Same weights under a different activation.
  GnnSpec with_activation(ActivationSpec act) const;
};

class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Builds one coordinate per distinct subformula. Coordinate j is produced
/// at layer level(j) by its rule and carried by an identity row afterwards:
///   Color(i)        A[j, i-1] = 1 (layer 1 reads the color block)
///   Top             c[j] = 1
///   Not(Q_i)        A[j, i] = -1, c[j] = 1
///   And(Q_a, Q_b)   A[j, a] = A[j, b] = 1, c[j] = -1
///   Dia>=K(Q_i)     B[j, i] = 1, c[j] = -(K - 1)
/// A Top operand of Not/And is folded into the bias; a Diamond over Top
/// counts neighbours through the color block, whose entries sum to one.
GnnSpec compile(const Formula& f, int palette,
                ActivationSpec activation = activation_by_name("sigma-star"));

/// True iff every coordinate, from the first layer that writes it, is
/// reproduced verbatim by all later layers under sigma* on boolean inputs.
bool carry_forward_check(const GnnSpec& spec);

/// Text format: header `d iterations output_index activation m`, then per
/// layer a `layer t cols` line followed by the d rows of A, the d rows of B
/// and one line holding c.
void write_spec(std::ostream& out, const GnnSpec& spec);
GnnSpec read_spec(std::istream& in);
void write_spec(const std::filesystem::path& path, const GnnSpec& spec);
GnnSpec read_spec(const std::filesystem::path& path);

}  // namespace stepgnn

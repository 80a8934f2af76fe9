#include "stepgnn/compiler.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <fmt/format.h>

namespace stepgnn {

std::size_t Matrix::row_nonzeros(std::size_t r) const {
  const auto rw = row(r);
  return static_cast<std::size_t>(std::count_if(rw.begin(), rw.end(), [](double v) { return v != 0.0; }));
}

std::size_t GnnSpec::input_dim() const { return layers.empty() ? d : layers.front().in_dim(); }

GnnSpec GnnSpec::with_activation(ActivationSpec act) const {
  GnnSpec out = *this;
  out.activation = std::move(act);
  return out;
}

GnnSpec compile(const Formula& f, int palette, ActivationSpec activation) {
  if (palette < 1) throw std::invalid_argument("palette size must be >= 1");
  if (f.max_color() > palette)
    throw std::invalid_argument("formula mentions color " + std::to_string(f.max_color()) +
                                " but the palette has " + std::to_string(palette));
  const SubformulaList subs(f);
  const std::vector<int> level = subformula_levels(subs);
  const std::size_t d = subs.size();
  const int top_level = *std::max_element(level.begin(), level.end());
  const std::size_t iterations = static_cast<std::size_t>(std::max({depth(f), top_level, 1}));

  GnnSpec spec;
  spec.d = d;
  spec.iterations = iterations;
  spec.output_index = subs.root_index();
  spec.activation = std::move(activation);

  auto is_top = [&](int i) { return subs[static_cast<std::size_t>(i)].kind == FormulaKind::Top; };

  for (std::size_t t = 1; t <= iterations; ++t) {
    const std::size_t width = t == 1 ? static_cast<std::size_t>(palette) : d;
    GnnLayer layer{Matrix(d, width), Matrix(d, width), std::vector<double>(d, 0.0)};
    for (std::size_t j = 0; j < d; ++j) {
      const auto& s = subs[j];
      const std::size_t produced_at = static_cast<std::size_t>(std::max(level[j], 1));
      if (t < produced_at) continue;
      if (t > produced_at) {
        layer.A(j, j) = 1.0;
        continue;
      }
      switch (s.kind) {
        case FormulaKind::Color:
          layer.A(j, static_cast<std::size_t>(s.value - 1)) = 1.0;
          break;
        case FormulaKind::Top:
          layer.c[j] = 1.0;
          break;
        case FormulaKind::Not:
          if (is_top(s.left)) break;  // constant false
          layer.A(j, static_cast<std::size_t>(s.left)) = -1.0;
          layer.c[j] = 1.0;
          break;
        case FormulaKind::And: {
          if (s.left == s.right) {
            if (is_top(s.left)) {
              layer.c[j] = 1.0;
            } else {
              layer.A(j, static_cast<std::size_t>(s.left)) = 1.0;
            }
            break;
          }
          double bias = -1.0;
          for (int operand : {s.left, s.right}) {
            if (is_top(operand)) {
              bias += 1.0;
            } else {
              layer.A(j, static_cast<std::size_t>(operand)) = 1.0;
            }
          }
          layer.c[j] = bias;
          break;
        }
        case FormulaKind::Diamond:
          if (is_top(s.left)) {
            // Only reachable at layer 1: every vertex has exactly one color.
            for (std::size_t col = 0; col < width; ++col) layer.B(j, col) = 1.0;
          } else {
            layer.B(j, static_cast<std::size_t>(s.left)) = 1.0;
          }
          layer.c[j] = -static_cast<double>(s.value - 1);
          break;
      }
    }
    spec.layers.push_back(std::move(layer));
  }
  return spec;
}

bool carry_forward_check(const GnnSpec& spec) {
  if (spec.layers.size() != spec.iterations) return false;
  for (std::size_t j = 0; j < spec.d; ++j) {
    bool written = false;
    for (const auto& layer : spec.layers) {
      if (layer.out_dim() != spec.d) return false;
      const bool nonzero =
          layer.A.row_nonzeros(j) > 0 || layer.B.row_nonzeros(j) > 0 || layer.c[j] != 0.0;
      if (!written) {
        written = nonzero;
        continue;
      }
      if (layer.in_dim() != spec.d || layer.B.row_nonzeros(j) != 0) return false;
      if (layer.A.row_nonzeros(j) > 1 || (layer.A.row_nonzeros(j) == 1 && layer.A(j, j) == 0.0))
        return false;
      for (double b : {0.0, 1.0}) {
        if (sigma_star(layer.A(j, j) * b + layer.c[j]) != b) return false;
      }
    }
  }
  return true;
}

namespace {

std::string format_entry(double v) {
  if (v == 0.0) return "0";
  if (std::trunc(v) == v && std::abs(v) < 1e15) return fmt::format("{}", static_cast<long long>(v));
  return fmt::format("{}", v);
}

void write_row(std::ostream& out, std::span<const double> row) {
  for (std::size_t i = 0; i < row.size(); ++i) out << (i ? " " : "") << format_entry(row[i]);
  out << '\n';
}

std::vector<double> read_row(std::istream& in, std::size_t expected, const std::string& what) {
  std::string line;
  while (std::getline(in, line))
    if (line.find_first_not_of(" \t\r") != std::string::npos) break;
  if (!in) throw SpecError("unexpected end of spec while reading " + what);
  std::istringstream ls(line);
  std::vector<double> row;
  double v = 0.0;
  while (ls >> v) row.push_back(v);
  if (!ls.eof() || row.size() != expected)
    throw SpecError("malformed " + what + ": expected " + std::to_string(expected) + " numbers");
  return row;
}

}  // namespace

void write_spec(std::ostream& out, const GnnSpec& spec) {
  out << spec.d << ' ' << spec.iterations << ' ' << spec.output_index << ' '
      << spec.activation.name() << ' ' << spec.activation.composition_depth() << '\n';
  for (std::size_t t = 0; t < spec.layers.size(); ++t) {
    const auto& layer = spec.layers[t];
    out << "layer " << t + 1 << ' ' << layer.in_dim() << '\n';
    for (std::size_t r = 0; r < layer.out_dim(); ++r) write_row(out, layer.A.row(r));
    for (std::size_t r = 0; r < layer.out_dim(); ++r) write_row(out, layer.B.row(r));
    write_row(out, layer.c);
  }
}

GnnSpec read_spec(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw SpecError("empty spec");
  std::istringstream hdr(line);
  long long d = -1;
  long long iterations = -1;
  long long output = -1;
  std::string act;
  int m = -1;
  if (!(hdr >> d >> iterations >> output >> act >> m) || d <= 0 || iterations < 0 || output < 0 ||
      output >= d || m < 0)
    throw SpecError("malformed header, expected 'd iterations output_index activation m'");
  GnnSpec spec;
  spec.d = static_cast<std::size_t>(d);
  spec.iterations = static_cast<std::size_t>(iterations);
  spec.output_index = static_cast<std::size_t>(output);
  try {
    spec.activation = activation_by_name(act, m);
  } catch (const std::invalid_argument& e) {
    throw SpecError(e.what());
  }
  for (long long t = 1; t <= iterations; ++t) {
    while (std::getline(in, line))
      if (line.find_first_not_of(" \t\r") != std::string::npos) break;
    std::istringstream ls(line);
    std::string tag;
    long long idx = -1;
    long long cols = -1;
    if (!in || !(ls >> tag >> idx >> cols) || tag != "layer" || idx != t || cols <= 0)
      throw SpecError("expected 'layer " + std::to_string(t) + " cols'");
    if (t > 1 && cols != d) throw SpecError("layers after the first must read d columns");
    const auto w = static_cast<std::size_t>(cols);
    GnnLayer layer{Matrix(spec.d, w), Matrix(spec.d, w), {}};
    for (std::size_t r = 0; r < spec.d; ++r) {
      const auto row = read_row(in, w, "row of A");
      std::copy(row.begin(), row.end(), layer.A.data.begin() + static_cast<std::ptrdiff_t>(r * w));
    }
    for (std::size_t r = 0; r < spec.d; ++r) {
      const auto row = read_row(in, w, "row of B");
      std::copy(row.begin(), row.end(), layer.B.data.begin() + static_cast<std::ptrdiff_t>(r * w));
    }
    layer.c = read_row(in, spec.d, "bias");
    spec.layers.push_back(std::move(layer));
  }
  return spec;
}

void write_spec(const std::filesystem::path& path, const GnnSpec& spec) {
  std::ofstream out(path);
  if (!out) throw SpecError("cannot open " + path.string() + " for writing");
  write_spec(out, spec);
}

GnnSpec read_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot open " + path.string());
  return read_spec(in);
}

}  // namespace stepgnn

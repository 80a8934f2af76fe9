#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace stepgnn {

class LabeledGraph;

/// Node kinds of a graded modal (GC2) formula. The two alternating variables
/// of GC2 are implicit: Diamond(K, phi) at x means "x has at least K
/// neighbours y with phi(y)".
enum class FormulaKind { Color, Top, Not, And, Diamond };

/// Immutable GC2 formula tree with structural equality. Copies share nodes.
class Formula {
 public:
  static Formula color(int index);
  static Formula top();
  static Formula negate(Formula child);
  static Formula conj(Formula left, Formula right);
  static Formula diamond(int threshold, Formula child);

  FormulaKind kind() const { return node_->kind; }
  /// Color index for Color, threshold K for Diamond, 0 otherwise.
  int value() const { return node_->value; }
  const Formula& child() const;
  const Formula& left() const;
  const Formula& right() const;

  /// Number of nodes in the tree, counting repeats.
  std::size_t tree_size() const;
  /// Largest color index mentioned, 0 when the formula is color free.
  int max_color() const;

  friend bool operator==(const Formula& a, const Formula& b);

 private:
  struct Node {
    FormulaKind kind;
    int value = 0;
    std::vector<Formula> children;
  };
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Syntax error carrying the byte offset where parsing stopped.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position);
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Parses the concrete syntax
///
///   formula := "C" INT | "top" | "not" formula | "dia>=" INT formula
///            | "(" formula { "and" formula } ")"
///
/// Whitespace between tokens is ignored. `and` chains associate to the left.
/// Color indices must lie in [1, palette_size] and thresholds must be >= 1.
Formula parse(std::string_view text, int palette_size);

/// Prints in the grammar accepted by parse(); parse(print(f)) == f.
std::string print(const Formula& f);

/// One entry of a SubformulaList; child indices refer to earlier entries.
struct Subformula {
  Formula formula;
  FormulaKind kind;
  int value = 0;
  int left = -1;   // child for Not/Diamond, left operand for And
  int right = -1;  // right operand for And
};

/// Distinct subformulas in topological order (children first, root last).
class SubformulaList {
 public:
  explicit SubformulaList(const Formula& root);

  std::size_t size() const { return entries_.size(); }
  const Subformula& operator[](std::size_t i) const { return entries_[i]; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }
  std::size_t root_index() const { return entries_.size() - 1; }

  /// Position of a structurally equal subformula, or -1.
  int index_of(const Formula& f) const;

 private:
  using Key = std::tuple<FormulaKind, int, int, int>;
  int intern(const Formula& f);
  int lookup(const Formula& f) const;

  std::vector<Subformula> entries_;
  std::map<Key, int> index_;
};

SubformulaList subformulas(const Formula& f);

/// Number of distinct subformulas other than Top. Atoms count once each; Top
/// is the depth-0 base. Gives 4 for Q1 and 7 for Q2.
int depth(const Formula& f);

/// Evaluation layer of each subformula: Top is 0, colors 1, and every other
/// node one more than its deepest child.
std::vector<int> subformula_levels(const SubformulaList& subs);

/// Ground-truth semantics by structural recursion.
bool eval_oracle(const Formula& f, const LabeledGraph& g, std::size_t v);

/// Truth table of every subformula at every vertex: result[j][v].
std::vector<std::vector<bool>> eval_all(const SubformulaList& subs, const LabeledGraph& g);

/// Longest root-to-leaf path, counting every node.
int height(const Formula& f);

/// Random formula of height <= max_height over colors [1, palette];
/// deterministic per seed. Diamond thresholds are drawn from [1, 3].
Formula random_formula(int max_height, int palette, std::uint64_t seed);

namespace queries {
/// All neighbours of v have degree at least two.
inline constexpr std::string_view kQ1 = "not (dia>=1 (not (dia>=2 top)))";
/// v is red (C1) and has a neighbour with a blue (C2) and a red neighbour.
inline constexpr std::string_view kQ2 = "(C1 and dia>=1 ((dia>=1 C2) and (dia>=1 C1)))";

Formula q1();
Formula q2();
/// Resolves "q1"/"q2" to the formula and palette size the experiments use.
std::pair<Formula, int> by_name(std::string_view name);
}  // namespace queries

}  // namespace stepgnn

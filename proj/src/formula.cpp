#include "stepgnn/formula.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <random>

#include "stepgnn/graph.hpp"

namespace stepgnn {

Formula Formula::color(int index) {
  if (index < 1) throw std::invalid_argument("color index must be >= 1");
  return Formula(std::make_shared<const Node>(Node{FormulaKind::Color, index, {}}));
}

Formula Formula::top() {
  static const Formula t(std::make_shared<const Node>(Node{FormulaKind::Top, 0, {}}));
  return t;
}

Formula Formula::negate(Formula child) {
  return Formula(std::make_shared<const Node>(Node{FormulaKind::Not, 0, {std::move(child)}}));
}

Formula Formula::conj(Formula left, Formula right) {
  return Formula(std::make_shared<const Node>(
      Node{FormulaKind::And, 0, {std::move(left), std::move(right)}}));
}

Formula Formula::diamond(int threshold, Formula child) {
  if (threshold < 1) throw std::invalid_argument("diamond threshold must be >= 1");
  return Formula(
      std::make_shared<const Node>(Node{FormulaKind::Diamond, threshold, {std::move(child)}}));
}

const Formula& Formula::child() const {
  if (node_->kind != FormulaKind::Not && node_->kind != FormulaKind::Diamond)
    throw std::logic_error("formula has no single child");
  return node_->children[0];
}

const Formula& Formula::left() const {
  if (node_->kind != FormulaKind::And) throw std::logic_error("formula is not a conjunction");
  return node_->children[0];
}

const Formula& Formula::right() const {
  if (node_->kind != FormulaKind::And) throw std::logic_error("formula is not a conjunction");
  return node_->children[1];
}

std::size_t Formula::tree_size() const {
  std::size_t n = 1;
  for (const auto& c : node_->children) n += c.tree_size();
  return n;
}

int Formula::max_color() const {
  int best = node_->kind == FormulaKind::Color ? node_->value : 0;
  for (const auto& c : node_->children) best = std::max(best, c.max_color());
  return best;
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (a.node_->kind != b.node_->kind || a.node_->value != b.node_->value) return false;
  return a.node_->children == b.node_->children;
}

ParseError::ParseError(const std::string& what, std::size_t position)
    : std::runtime_error(what + " at offset " + std::to_string(position)), position_(position) {}

namespace {

class Parser {
 public:
  Parser(std::string_view text, int palette) : text_(text), palette_(palette) {}

  Formula parse_all() {
    Formula f = formula();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError("unexpected trailing input", pos_);
    return f;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(std::string_view token) {
    skip_ws();
    if (text_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }

  void expect(std::string_view token) {
    if (!accept(token)) throw ParseError("expected '" + std::string(token) + "'", pos_);
  }

  int integer() {
    skip_ws();
    const std::size_t start = pos_;
    long long v = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      v = v * 10 + (text_[pos_] - '0');
      if (v > 1'000'000'000) throw ParseError("integer too large", start);
      ++pos_;
    }
    if (pos_ == start) throw ParseError("expected integer", start);
    return static_cast<int>(v);
  }

  Formula formula() {
    skip_ws();
    const std::size_t at = pos_;
    if (accept("top")) return Formula::top();
    if (accept("not")) return Formula::negate(formula());
    if (accept("dia>=")) {
      const std::size_t k_at = pos_;
      const int k = integer();
      if (k < 1) throw ParseError("diamond threshold must be >= 1", k_at);
      return Formula::diamond(k, formula());
    }
    if (accept("C")) {
      const std::size_t c_at = pos_;
      const int c = integer();
      if (c < 1 || c > palette_)
        throw ParseError("color index " + std::to_string(c) + " outside [1, " +
                             std::to_string(palette_) + "]",
                         c_at);
      return Formula::color(c);
    }
    if (accept("(")) {
      Formula acc = formula();
      while (accept("and")) acc = Formula::conj(acc, formula());
      expect(")");
      return acc;
    }
    throw ParseError("expected formula", at);
  }

  std::string_view text_;
  int palette_;
  std::size_t pos_ = 0;
};

}  // namespace

Formula parse(std::string_view text, int palette_size) {
  return Parser(text, palette_size).parse_all();
}

std::string print(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::Color:
      return "C" + std::to_string(f.value());
    case FormulaKind::Top:
      return "top";
    case FormulaKind::Not:
      return "not " + print(f.child());
    case FormulaKind::And:
      return "(" + print(f.left()) + " and " + print(f.right()) + ")";
    case FormulaKind::Diamond:
      return "dia>=" + std::to_string(f.value()) + " " + print(f.child());
  }
  return {};
}

SubformulaList::SubformulaList(const Formula& root) { intern(root); }

int SubformulaList::intern(const Formula& f) {
  int left = -1;
  int right = -1;
  switch (f.kind()) {
    case FormulaKind::Not:
    case FormulaKind::Diamond:
      left = intern(f.child());
      break;
    case FormulaKind::And:
      left = intern(f.left());
      right = intern(f.right());
      break;
    default:
      break;
  }
  const Key key{f.kind(), f.value(), left, right};
  if (auto it = index_.find(key); it != index_.end()) return it->second;
  const int id = static_cast<int>(entries_.size());
  entries_.push_back({f, f.kind(), f.value(), left, right});
  index_.emplace(key, id);
  return id;
}

int SubformulaList::lookup(const Formula& f) const {
  int left = -1;
  int right = -1;
  switch (f.kind()) {
    case FormulaKind::Not:
    case FormulaKind::Diamond:
      left = lookup(f.child());
      if (left < 0) return -1;
      break;
    case FormulaKind::And:
      left = lookup(f.left());
      right = lookup(f.right());
      if (left < 0 || right < 0) return -1;
      break;
    default:
      break;
  }
  auto it = index_.find(Key{f.kind(), f.value(), left, right});
  return it == index_.end() ? -1 : it->second;
}

int SubformulaList::index_of(const Formula& f) const { return lookup(f); }

SubformulaList subformulas(const Formula& f) { return SubformulaList(f); }

int depth(const Formula& f) {
  const SubformulaList subs(f);
  return static_cast<int>(std::count_if(subs.begin(), subs.end(), [](const Subformula& s) {
    return s.kind != FormulaKind::Top;
  }));
}

std::vector<int> subformula_levels(const SubformulaList& subs) {
  std::vector<int> level(subs.size(), 0);
  for (std::size_t j = 0; j < subs.size(); ++j) {
    const auto& s = subs[j];
    switch (s.kind) {
      case FormulaKind::Top:
        level[j] = 0;
        break;
      case FormulaKind::Color:
        level[j] = 1;
        break;
      case FormulaKind::Not:
      case FormulaKind::Diamond:
        level[j] = level[s.left] + 1;
        break;
      case FormulaKind::And:
        level[j] = std::max(level[s.left], level[s.right]) + 1;
        break;
    }
  }
  return level;
}

std::vector<std::vector<bool>> eval_all(const SubformulaList& subs, const LabeledGraph& g) {
  const std::size_t n = g.size();
  std::vector<std::vector<bool>> truth(subs.size(), std::vector<bool>(n, false));
  for (std::size_t j = 0; j < subs.size(); ++j) {
    const auto& s = subs[j];
    auto& row = truth[j];
    for (std::size_t v = 0; v < n; ++v) {
      switch (s.kind) {
        case FormulaKind::Color:
          row[v] = g.color(v) == s.value;
          break;
        case FormulaKind::Top:
          row[v] = true;
          break;
        case FormulaKind::Not:
          row[v] = !truth[s.left][v];
          break;
        case FormulaKind::And:
          row[v] = truth[s.left][v] && truth[s.right][v];
          break;
        case FormulaKind::Diamond: {
          int count = 0;
          for (std::size_t w : g.neighbors(v)) count += truth[s.left][w] ? 1 : 0;
          row[v] = count >= s.value;
          break;
        }
      }
    }
  }
  return truth;
}

bool eval_oracle(const Formula& f, const LabeledGraph& g, std::size_t v) {
  if (v >= g.size()) throw std::out_of_range("vertex " + std::to_string(v) + " out of range");
  if (f.max_color() > g.palette())
    throw std::invalid_argument("formula mentions a color outside the graph palette");
  // Direct recursion on the tree, no memoisation: this is the reference
  // semantics the table-driven paths are checked against.
  std::function<bool(const Formula&, std::size_t)> holds = [&](const Formula& h,
                                                               std::size_t u) -> bool {
    switch (h.kind()) {
      case FormulaKind::Color:
        return g.color(u) == h.value();
      case FormulaKind::Top:
        return true;
      case FormulaKind::Not:
        return !holds(h.child(), u);
      case FormulaKind::And:
        return holds(h.left(), u) && holds(h.right(), u);
      case FormulaKind::Diamond: {
        int count = 0;
        for (std::size_t w : g.neighbors(u)) {
          if (holds(h.child(), w) && ++count >= h.value()) return true;
        }
        return false;
      }
    }
    return false;
  };
  return holds(f, v);
}

int height(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::Not:
    case FormulaKind::Diamond:
      return 1 + height(f.child());
    case FormulaKind::And:
      return 1 + std::max(height(f.left()), height(f.right()));
    default:
      return 1;
  }
}

namespace {

Formula grow(int budget, int palette, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, 9);
  const int roll = budget <= 1 ? 0 : pick(rng);
  if (roll <= 1) {
    // Atoms: mostly colors, occasionally top.
    if (std::uniform_int_distribution<int>(0, 5)(rng) == 0) return Formula::top();
    return Formula::color(std::uniform_int_distribution<int>(1, palette)(rng));
  }
  if (roll <= 3) return Formula::negate(grow(budget - 1, palette, rng));
  if (roll <= 6) {
    Formula a = grow(budget - 1, palette, rng);
    Formula b = grow(budget - 1, palette, rng);
    return Formula::conj(std::move(a), std::move(b));
  }
  const int k = std::uniform_int_distribution<int>(1, 3)(rng);
  return Formula::diamond(k, grow(budget - 1, palette, rng));
}

}  // namespace

Formula random_formula(int max_height, int palette, std::uint64_t seed) {
  if (max_height < 1 || palette < 1) throw std::invalid_argument("invalid random formula shape");
  std::mt19937_64 rng(seed);
  return grow(max_height, palette, rng);
}

namespace queries {

Formula q1() { return parse(kQ1, 1); }
Formula q2() { return parse(kQ2, 2); }

std::pair<Formula, int> by_name(std::string_view name) {
  if (name == "q1" || name == "Q1") return {q1(), 1};
  if (name == "q2" || name == "Q2") return {q2(), 2};
  throw std::invalid_argument("unknown query '" + std::string(name) + "' (expected q1 or q2)");
}

}  // namespace queries

}  // namespace stepgnn

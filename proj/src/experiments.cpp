#include "stepgnn/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <stdexcept>
#include <tuple>

#include <fmt/format.h>

#include "stepgnn/compiler.hpp"

namespace stepgnn {

namespace {

bool is_exact(const std::string& name) { return name == "sigma-star" || name == "crelu"; }

template <class T>
std::string cell(const std::optional<T>& v) {
  return v ? fmt::format("{}", *v) : std::string();
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

ResultRow sweep_row(const char* experiment, const QuerySpec& q, const SeparationPoint& p) {
  return {experiment, q.label, p.activation, p.m, p.k, p.n, p.delta, p.gap, 0.0};
}

}  // namespace

void ExperimentConfig::validate() const {
  if (ms.empty()) throw std::invalid_argument("empty m sweep");
  if (ks.empty()) throw std::invalid_argument("empty k sweep");
  const auto act = activation_by_name(activation, 1);  // throws on unknown names
  const int n_min = act.step_params() ? act.step_params()->N : 0;
  for (int m : ms) {
    if (m < n_min)
      throw std::invalid_argument(fmt::format("m = {} is below N = {} for {}", m, n_min, activation));
  }
  resolve_query(query, palette);
}

void write_csv(std::ostream& out, std::vector<ResultRow> rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.experiment, a.query, a.activation, a.m, a.k) <
           std::tie(b.experiment, b.query, b.activation, b.m, b.k);
  });
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << fmt::format("{},{},{},{},{},{},{},{:.17g},{:.6f}\n", quote(r.experiment), quote(r.query),
                       quote(r.activation), cell(r.m), cell(r.k), cell(r.n), cell(r.delta), r.value,
                       r.seconds);
  }
}

QuerySpec resolve_query(const std::string& query, int palette) {
  if (query == "q1" || query == "Q1" || query == "q2" || query == "Q2") {
    auto [f, pal] = queries::by_name(query);
    std::string label = query;
    label[0] = 'q';
    return {label, f, pal};
  }
  if (palette < 1) throw std::invalid_argument("palette size must be >= 1");
  return {print(parse(query, palette)), parse(query, palette), palette};
}

RootedTree experiment_tree(int x, std::size_t k, int palette) {
  RootedTree t = make_tree({static_cast<std::size_t>(x), k, k});
  if (palette < 2) return t;
  RootedTree rb = color_red_blue(t);
  if (palette > 2) rb.graph = rb.graph.recolored(palette, rb.graph.colors());
  return rb;
}

SeparationPoint separation_point(const QuerySpec& q, const ActivationSpec& act, std::size_t k) {
  const RootedTree t0 = experiment_tree(0, k, q.palette);
  const RootedTree t1 = experiment_tree(1, k, q.palette);
  const GnnSpec spec = compile(q.formula, q.palette, act);
  const double y0 = forward_output(spec, t0.graph)[t0.root];
  const double y1 = forward_output(spec, t1.graph)[t1.root];
  const bool b0 = eval_oracle(q.formula, t0.graph, t0.root);
  const bool b1 = eval_oracle(q.formula, t1.graph, t1.root);
  SeparationPoint p;
  p.activation = act.name();
  p.m = act.composition_depth();
  p.k = k;
  p.n = t1.graph.size();
  p.delta = std::max(t0.graph.max_degree(), t1.graph.max_degree());
  p.gap = std::abs(y1 - y0);
  p.oracle_gap = b0 == b1 ? 0.0 : 1.0;
  p.exact = is_exact(act.name());
  p.step = act.step_params();
  return p;
}

std::vector<std::string> audit_separation(std::span<const SeparationPoint> points) {
  std::vector<std::string> out;
  for (const auto& p : points) {
    if (p.exact) {
      if (p.gap != p.oracle_gap)
        out.push_back(fmt::format("{} k={}: exact activation gap {} differs from oracle gap {}",
                                  p.activation, p.k, p.gap, p.oracle_gap));
      continue;
    }
    if (!p.step) continue;
    const int need = required_composition_depth(*p.step, static_cast<int>(p.delta));
    if (p.m < need) continue;
    const double slack = 1.0 / static_cast<double>(p.delta + 2);
    if (std::abs(p.gap - p.oracle_gap) >= slack)
      out.push_back(fmt::format("{} m={} k={}: gap {} not within {} of oracle gap {}", p.activation,
                                p.m, p.k, p.gap, slack, p.oracle_gap));
  }
  return out;
}

std::vector<std::string> audit_saturation(std::span<const SeparationPoint> points) {
  std::vector<std::string> out;
  // Group by (activation, m); within a group compare the extreme k values.
  std::vector<const SeparationPoint*> sorted;
  for (const auto& p : points) sorted.push_back(&p);
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) {
    return std::tie(a->activation, a->m, a->k) < std::tie(b->activation, b->m, b->k);
  });
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j]->activation == sorted[i]->activation &&
           sorted[j]->m == sorted[i]->m)
      ++j;
    const auto& first = *sorted[i];
    const auto& last = *sorted[j - 1];
    if (first.exact) {
      for (std::size_t r = i; r < j; ++r) {
        if (sorted[r]->gap != sorted[r]->oracle_gap)
          out.push_back(fmt::format("{} k={}: control gap {} differs from oracle gap {}",
                                    sorted[r]->activation, sorted[r]->k, sorted[r]->gap,
                                    sorted[r]->oracle_gap));
      }
    } else if (j - i >= 2 && !(last.gap < first.gap)) {
      out.push_back(fmt::format("{} m={}: gap at k={} ({}) is not below gap at k={} ({})",
                                first.activation, first.m, last.k, last.gap, first.k, first.gap));
    }
    i = j;
  }
  return out;
}

std::vector<std::string> audit_convergence(std::span<const ConvergencePoint> points, double tol) {
  std::vector<std::string> out;
  for (const auto& p : points) {
    if (!(p.observed <= p.bound + tol))
      out.push_back(fmt::format("{} m={}: observed {} exceeds bound {}", p.activation, p.m,
                                p.observed, p.bound));
  }
  return out;
}

namespace {

ExperimentResult run_sweep(const ExperimentConfig& cfg, const char* experiment, bool saturation) {
  cfg.validate();
  const QuerySpec q = resolve_query(cfg.query, cfg.palette);
  std::vector<SeparationPoint> points;
  ExperimentResult res;
  for (int m : cfg.ms) {
    const ActivationSpec act = activation_by_name(cfg.activation, m);
    for (std::size_t k : cfg.ks) {
      const auto start = std::chrono::steady_clock::now();
      points.push_back(separation_point(q, act, k));
      ResultRow row = sweep_row(experiment, q, points.back());
      if (cfg.timing) row.seconds = seconds_since(start);
      res.rows.push_back(std::move(row));
    }
  }
  res.violations = saturation ? audit_saturation(points) : audit_separation(points);
  return res;
}

}  // namespace

ExperimentResult run_separation(const ExperimentConfig& cfg) {
  return run_sweep(cfg, "separation", false);
}

ExperimentResult run_saturation(const ExperimentConfig& cfg) {
  return run_sweep(cfg, "saturation", true);
}

ExperimentResult run_convergence(const std::string& activation, int m_lo, int m_hi,
                                 const Grid& grid, double tol) {
  const auto sl = step_like_by_name(activation);
  if (!sl) throw std::invalid_argument("'" + activation + "' has no step-like certificate");
  if (m_lo < sl->params.N || m_hi < m_lo)
    throw std::invalid_argument(fmt::format("invalid m range [{}, {}] for N = {}", m_lo, m_hi,
                                            sl->params.N));
  const auto observed = observed_convergence(sl->activation, sl->params, grid, m_lo, m_hi);
  ExperimentResult res;
  std::vector<ConvergencePoint> points;
  for (int m = m_lo; m <= m_hi; ++m) {
    const double obs = observed[static_cast<std::size_t>(m - m_lo)];
    const double bound = convergence_bound(sl->params, m);
    points.push_back({activation, m, obs, bound});
    res.rows.push_back({"convergence", "", activation, m, {}, grid.count, {}, obs, 0.0});
    res.rows.push_back({"convergence-bound", "", activation, m, {}, grid.count, {}, bound, 0.0});
  }
  res.violations = audit_convergence(points, tol);
  return res;
}

std::vector<StepLikeReport> run_steplike_verify(std::span<const std::string> names,
                                                const Grid& grid, double tol, double h_scale) {
  std::vector<StepLikeReport> out;
  for (const auto& name : names) {
    auto sl = step_like_by_name(name);
    if (!sl) throw std::invalid_argument("unknown step-like activation '" + name + "'");
    StepLikeParams p = sl->params;
    p.H *= h_scale;
    auto report = verify_step_like(sl->activation, p, grid, tol);
    report.name = name;
    out.push_back(std::move(report));
  }
  return out;
}

ExactnessReport check_exact(const Formula& f, int palette, std::span<const LabeledGraph> graphs,
                            const ActivationSpec& act) {
  const SubformulaList subs(f);
  const GnnSpec spec = compile(f, palette, act);
  ExactnessReport rep;
  for (const auto& g : graphs) {
    const auto truth = eval_all(subs, g);
    const EmbeddingTable table = forward(spec, g);
    for (std::size_t v = 0; v < g.size(); ++v) {
      ++rep.vertices;
      const auto xi = table.final(v);
      for (std::size_t j = 0; j < spec.d; ++j) {
        const double want = truth[j][v] ? 1.0 : 0.0;
        if (xi[j] != want) {
          ++rep.coordinate_mismatches;
          if (j == spec.output_index) ++rep.root_mismatches;
        }
      }
    }
  }
  return rep;
}

std::vector<LabeledGraph> random_corpus(std::size_t count, std::size_t max_n, double avg_degree,
                                        int palette, std::uint64_t seed) {
  if (max_n < 1) throw std::invalid_argument("max_n must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> size(1, max_n);
  std::vector<LabeledGraph> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t n = size(rng);
    const double avg = n > 1 ? std::min(avg_degree, static_cast<double>(n - 1)) : 0.0;
    out.push_back(random_graph(n, avg, palette, rng()));
  }
  return out;
}

std::vector<LabeledGraph> small_trees(std::size_t max_k, std::size_t max_m, int palette) {
  std::vector<LabeledGraph> out;
  for (int x = 0; x <= 1; ++x) {
    for (std::size_t k = 0; k <= max_k; ++k) {
      for (std::size_t m = 1; m <= max_m; ++m) {
        RootedTree t = make_tree({static_cast<std::size_t>(x), k, m});
        if (palette >= 2) {
          t = color_red_blue(t);
          if (palette > 2) t.graph = t.graph.recolored(palette, t.graph.colors());
        }
        out.push_back(std::move(t.graph));
      }
    }
  }
  return out;
}

}  // namespace stepgnn

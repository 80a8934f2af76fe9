// Command-line front end: compile formulas, evaluate them, and run the
// separation, saturation and step-like sweeps. CSV goes to --out or stdout.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include <CLI11.hpp>
#include "stepgnn/activation.hpp"
#include "stepgnn/compiler.hpp"
#include "stepgnn/engine.hpp"
#include "stepgnn/experiments.hpp"
#include "stepgnn/formula.hpp"
#include "stepgnn/graph.hpp"

using namespace stepgnn;

namespace {

constexpr const char* kActivationHelp =
    "activation name; relu runs but is not exact, since diamond counts above one are not clipped";

// "a:b" (inclusive), "a:b:step", or a comma list.
template <class T>
std::vector<T> parse_range(const std::string& text) {
  std::vector<T> out;
  if (text.find(':') != std::string::npos) {
    std::vector<long long> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(std::stoll(item));
    if (parts.size() < 2 || parts.size() > 3) throw std::invalid_argument("bad range '" + text + "'");
    const long long step = parts.size() == 3 ? parts[2] : 1;
    if (step <= 0 || parts[1] < parts[0]) throw std::invalid_argument("bad range '" + text + "'");
    for (long long v = parts[0]; v <= parts[1]; v += step) out.push_back(static_cast<T>(v));
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const long long v = std::stoll(item);
    if (v < 0) throw std::invalid_argument("negative value in '" + text + "'");
    out.push_back(static_cast<T>(v));
  }
  if (out.empty()) throw std::invalid_argument("empty list '" + text + "'");
  return out;
}

struct Common {
  std::string query = "q1";
  std::string formula;
  int colors = 1;
  std::string activation;
  std::string m = "1";
  std::string out;
  bool timing = false;
};

QuerySpec query_of(const Common& c) {
  return c.formula.empty() ? resolve_query(c.query, c.colors) : resolve_query(c.formula, c.colors);
}

// Writes to the --out path, or stdout when none is given.
template <class F>
void emit(const std::string& path, F&& body) {
  if (path.empty()) {
    body(std::cout);
    return;
  }
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  body(f);
}

int report_violations(const ExperimentResult& res) {
  for (const auto& v : res.violations) std::cerr << "violation: " << v << '\n';
  return res.ok() ? 0 : 1;
}

void add_query_flags(CLI::App* sub, Common& c) {
  sub->add_option("--query", c.query, "q1 or q2")->capture_default_str();
  sub->add_option("--formula", c.formula, "formula text, overrides --query");
  sub->add_option("--colors", c.colors, "palette size for --formula")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GC2 to GNN compiler and step-like activation test bench"};
  app.require_subcommand(1);

  Common c;
  std::string graph_path;
  std::string k_range = "2:64:2";
  std::uint64_t seed = 1;
  int delta = 64;
  double tol = 1e-9;
  double h_scale = 1.0;
  std::size_t random_count = 0;
  std::size_t grid_count = Grid{}.count;
  double grid_lo = Grid{}.lo;
  double grid_hi = Grid{}.hi;

  auto* compile_cmd = app.add_subcommand("compile", "compile a formula to GNN weights");
  add_query_flags(compile_cmd, c);
  compile_cmd->add_option("--activation", c.activation, kActivationHelp);
  compile_cmd->add_option("--m", c.m, "composition depth");
  compile_cmd->add_option("--out", c.out, "spec file (default stdout)");

  auto* eval_cmd = app.add_subcommand("eval", "run a compiled formula on a graph file");
  add_query_flags(eval_cmd, c);
  eval_cmd->add_option("--graph", graph_path, "graph file")->required();
  eval_cmd->add_option("--activation", c.activation, kActivationHelp);
  eval_cmd->add_option("--m", c.m, "composition depth");
  eval_cmd->add_option("--out", c.out, "CSV output");

  auto* exact_cmd = app.add_subcommand("check-exact", "compare compiled output with the oracle");
  add_query_flags(exact_cmd, c);
  exact_cmd->add_option("--activation", c.activation, "sigma-star or crelu");
  exact_cmd->add_option("--random", random_count, "also check this many random formulas");
  exact_cmd->add_option("--seed", seed, "corpus seed")->capture_default_str();

  auto* sep_cmd = app.add_subcommand("separation", "gap between T[0,k,k] and T[1,k,k]");
  auto* sat_cmd = app.add_subcommand("saturation", "gap decay of a bounded activation");
  for (auto* sub : {sep_cmd, sat_cmd}) {
    add_query_flags(sub, c);
    sub->add_option("--activation", c.activation, kActivationHelp);
    sub->add_option("--m", c.m, "composition depths, a:b[:s] or a,b,c");
    sub->add_option("--k-range", k_range, "tree sizes, a:b[:s] or a,b,c")->capture_default_str();
    sub->add_option("--seed", seed, "recorded for reproducibility; the trees are fixed");
    sub->add_option("--out", c.out, "CSV output");
    sub->add_flag("--timing", c.timing, "fill the seconds column");
  }

  auto* verify_cmd = app.add_subcommand("steplike-verify", "check step-like certificates");
  verify_cmd->add_option("--activation", c.activation, "one certificate (default all)");
  verify_cmd->add_option("--tol", tol, "tolerance")->capture_default_str();
  verify_cmd->add_option("--perturb-h", h_scale, "multiply H by this factor");

  auto* conv_cmd = app.add_subcommand("convergence", "observed |sigma^m - sigma*| against the bound");
  conv_cmd->add_option("--activation", c.activation, "step-like activation")->required();
  conv_cmd->add_option("--m", c.m, "m range a:b");
  conv_cmd->add_option("--tol", tol, "slack added to the bound");
  conv_cmd->add_option("--out", c.out, "CSV output");

  for (auto* sub : {verify_cmd, conv_cmd}) {
    sub->add_option("--grid-lo", grid_lo)->capture_default_str();
    sub->add_option("--grid-hi", grid_hi)->capture_default_str();
    sub->add_option("--grid-count", grid_count)->capture_default_str();
  }

  auto* req_cmd = app.add_subcommand("required-m", "composition depth needed for a degree bound");
  req_cmd->add_option("--activation", c.activation, "step-like activation")->required();
  req_cmd->add_option("--delta", delta, "maximum degree")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    const Grid grid{grid_lo, grid_hi, grid_count};

    if (*compile_cmd) {
      const QuerySpec q = query_of(c);
      const auto act = activation_by_name(c.activation.empty() ? "sigma-star" : c.activation,
                                          std::stoi(c.m));
      const GnnSpec spec = compile(q.formula, q.palette, act);
      emit(c.out, [&](std::ostream& o) { write_spec(o, spec); });
      return 0;
    }

    if (*eval_cmd) {
      const QuerySpec q = query_of(c);
      const auto gf = read_graph(graph_path);
      const auto act = activation_by_name(c.activation.empty() ? "sigma-star" : c.activation,
                                          std::stoi(c.m));
      const GnnSpec spec = compile(q.formula, gf.graph.palette(), act);
      const auto out = forward_output(spec, gf.graph);
      emit(c.out, [&](std::ostream& o) {
        o << "vertex,oracle,output\n";
        for (std::size_t v = 0; v < gf.graph.size(); ++v)
          o << fmt::format("{},{},{:.17g}\n", v, eval_oracle(q.formula, gf.graph, v) ? 1 : 0, out[v]);
      });
      return 0;
    }

    if (*exact_cmd) {
      const QuerySpec q = query_of(c);
      const auto act = activation_by_name(c.activation.empty() ? "sigma-star" : c.activation);
      std::vector<std::pair<Formula, int>> formulas{{q.formula, q.palette}};
      for (std::size_t i = 0; i < random_count; ++i) {
        const int pal = 1 + static_cast<int>(i % 3);
        formulas.emplace_back(random_formula(6, pal, seed * 1000 + i), pal);
      }
      std::size_t bad = 0;
      for (const auto& [f, pal] : formulas) {
        auto graphs = random_corpus(200, 200, 5.0, pal, seed);
        auto trees = small_trees(10, 10, pal);
        graphs.insert(graphs.end(), trees.begin(), trees.end());
        const auto rep = check_exact(f, pal, graphs, act);
        std::cout << fmt::format("{}: {} vertices, {} output mismatches, {} coordinate mismatches\n",
                                 print(f), rep.vertices, rep.root_mismatches,
                                 rep.coordinate_mismatches);
        bad += rep.coordinate_mismatches;
      }
      return bad == 0 ? 0 : 1;
    }

    if (*sep_cmd || *sat_cmd) {
      ExperimentConfig cfg;
      cfg.query = c.formula.empty() ? c.query : c.formula;
      cfg.palette = c.colors;
      cfg.activation = c.activation.empty() ? (*sat_cmd ? "sigmoid" : "crelu") : c.activation;
      cfg.ms = parse_range<int>(c.m);
      cfg.ks = parse_range<std::size_t>(k_range);
      cfg.seed = seed;
      cfg.timing = c.timing;
      const auto res = *sat_cmd ? run_saturation(cfg) : run_separation(cfg);
      emit(c.out, [&](std::ostream& o) { write_csv(o, res.rows); });
      return report_violations(res);
    }

    if (*verify_cmd) {
      const std::vector<std::string> names =
          c.activation.empty() ? step_like_names() : std::vector<std::string>{c.activation};
      const auto reports = run_steplike_verify(names, grid, tol, h_scale);
      bool all = true;
      for (const auto& r : reports) {
        auto line = [](const char* tag, const ConditionCheck& k) {
          return fmt::format("  ({}) {} worst={:.6g} limit={:.6g} at x={:.6g} over {} points\n", tag,
                             k.pass ? "ok  " : "FAIL", k.worst, k.limit, k.where, k.checked);
        };
        std::cout << fmt::format("{} eta={} eps={} N={} H={}: {}\n", r.name, r.params.eta,
                                 r.params.eps, r.params.N, r.params.H, r.pass() ? "pass" : "FAIL");
        std::cout << line("a", r.fixed_points) << line("b", r.derivative) << line("c", r.closeness)
                  << line("d", r.curvature);
        all = all && r.pass();
      }
      if (c.activation.empty() || c.activation.find("eta0") != std::string::npos) {
        const auto k = tanh_eta0_constants();
        std::cout << fmt::format("eta0 constants: a={:.10f} alpha={:.10f}\n", k.a, k.alpha);
      }
      return all ? 0 : 1;
    }

    if (*conv_cmd) {
      const auto sl = step_like_by_name(c.activation);
      if (!sl) throw std::invalid_argument("'" + c.activation + "' has no step-like certificate");
      int lo = sl->params.N;
      int hi = lo + 20;
      if (conv_cmd->count("--m") > 0) {
        const auto ms = parse_range<int>(c.m);
        lo = ms.front();
        hi = ms.back();
      }
      const auto res = run_convergence(c.activation, lo, hi, grid,
                                       conv_cmd->count("--tol") > 0 ? tol : 1e-12);
      emit(c.out, [&](std::ostream& o) { write_csv(o, res.rows); });
      return report_violations(res);
    }

    if (*req_cmd) {
      const auto sl = step_like_by_name(c.activation);
      if (!sl) throw std::invalid_argument("'" + c.activation + "' has no step-like certificate");
      const auto closed = closed_form_composition_depth(sl->params, delta);
      std::cout << fmt::format("required m (scan): {}\n", required_composition_depth(sl->params, delta));
      std::cout << fmt::format("closed form, printed denominator 1 - log2(1 - eta): {:.6f}\n",
                               closed.printed);
      std::cout << fmt::format("closed form, rate denominator 1 - log2(1 + eta): {:.6f}\n",
                               closed.rate_consistent);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

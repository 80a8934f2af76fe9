#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "stepgnn/activation.hpp"
#include "stepgnn/engine.hpp"
#include "stepgnn/formula.hpp"

namespace stepgnn {

/// Knobs shared by the tree sweeps. `query` is "q1", "q2" or formula text
/// parsed against `palette`.
struct ExperimentConfig {
  std::string query = "q1";
  int palette = 1;  // only consulted for formula text
  std::string activation = "crelu";
  std::vector<int> ms{1};
  std::vector<std::size_t> ks{2, 4, 8, 16, 32, 64};
  std::uint64_t seed = 0;
  bool timing = false;  // off keeps the seconds column at 0 so reruns are byte-identical

  /// Throws std::invalid_argument on empty sweeps, unknown names, or m below
  /// the certificate's N.
  void validate() const;
};

/// One CSV line. Columns without meaning for an experiment are left empty.
struct ResultRow {
  std::string experiment;
  std::string query;
  std::string activation;
  std::optional<int> m;
  std::optional<std::size_t> k;
  std::optional<std::size_t> n;
  std::optional<std::size_t> delta;
  double value = 0.0;
  double seconds = 0.0;
};

inline constexpr const char* kCsvHeader = "experiment,query,activation,m,k,n,delta,value,seconds";

/// Header plus rows sorted by (experiment, query, activation, m, k).
void write_csv(std::ostream& out, std::vector<ResultRow> rows);

struct ExperimentResult {
  std::vector<ResultRow> rows;
  /// Human-readable description of every row that broke its governing bound.
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Resolved query: formula plus the palette its trees are colored with.
struct QuerySpec {
  std::string label;
  Formula formula;
  int palette;
};
QuerySpec resolve_query(const std::string& query, int palette);

/// T[x,k,k] with the root as source; red/blue coloring when palette >= 2.
RootedTree experiment_tree(int x, std::size_t k, int palette);

/// One point of a T[0,k,k] / T[1,k,k] sweep, with the context the audit needs.
struct SeparationPoint {
  std::string activation;
  int m = 1;
  std::size_t k = 0;
  std::size_t n = 0;
  std::size_t delta = 0;
  double gap = 0.0;
  double oracle_gap = 0.0;  // |Q(T1) - Q(T0)| at the source, 0 or 1
  bool exact = false;       // sigma-star or crelu
  std::optional<StepLikeParams> step;
};

SeparationPoint separation_point(const QuerySpec& q, const ActivationSpec& act, std::size_t k);

/// Exact activations must reproduce the oracle gap. Step-like activations
/// run at an m that meets the depth requirement for the tree's degree must
/// keep the gap within 2 / (2 (delta + 2)) of it.
std::vector<std::string> audit_separation(std::span<const SeparationPoint> points);

/// Exact activations must pin the gap to the oracle gap; any other
/// activation must show gap(k_max) < gap(k_min).
std::vector<std::string> audit_saturation(std::span<const SeparationPoint> points);

struct ConvergencePoint {
  std::string activation;
  int m = 0;
  double observed = 0.0;
  double bound = 0.0;
};

std::vector<std::string> audit_convergence(std::span<const ConvergencePoint> points,
                                           double tol = 1e-12);

ExperimentResult run_separation(const ExperimentConfig& cfg);
ExperimentResult run_saturation(const ExperimentConfig& cfg);

/// Rows (m, observed) and (m, bound) for m = m_lo..m_hi.
ExperimentResult run_convergence(const std::string& activation, int m_lo, int m_hi,
                                 const Grid& grid, double tol = 1e-12);

/// verify_step_like for each named certificate; `h_scale` multiplies H
/// (a value below 1 is the negative control).
std::vector<StepLikeReport> run_steplike_verify(std::span<const std::string> names,
                                                const Grid& grid, double tol = 1e-9,
                                                double h_scale = 1.0);

/// Mismatch counts of a compiled formula against the oracle.
struct ExactnessReport {
  std::size_t vertices = 0;
  std::size_t root_mismatches = 0;        // output coordinate
  std::size_t coordinate_mismatches = 0;  // every coordinate after the last layer
};

ExactnessReport check_exact(const Formula& f, int palette, std::span<const LabeledGraph> graphs,
                            const ActivationSpec& act);

/// `count` G(n, p) graphs with n uniform in [1, max_n].
std::vector<LabeledGraph> random_corpus(std::size_t count, std::size_t max_n, double avg_degree,
                                        int palette, std::uint64_t seed);

/// Every T[x,k,m] with x in {0,1}, 0 <= k <= max_k, 1 <= m <= max_m, colored
/// red/blue when palette >= 2.
std::vector<LabeledGraph> small_trees(std::size_t max_k, std::size_t max_m, int palette);

}  // namespace stepgnn

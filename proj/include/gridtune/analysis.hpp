#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gridtune/history.hpp"
#include "gridtune/session.hpp"
#include "gridtune/space.hpp"

namespace gridtune::analysis {

// Per-parameter exploration statistics over the ok entries of a history.
// span_pct is floor(100 * sampled span / tunable span); a single-point
// tunable range counts as fully covered. point_pct is floor(100 * distinct
// sampled values / grid points) and disambiguates zero-span cells.
struct CoverageRow {
  std::string param;
  std::int64_t sampled_min = 0;
  std::int64_t sampled_max = 0;
  std::int64_t tunable_min = 0;
  std::int64_t tunable_max = 0;
  int span_pct = 0;
  int point_pct = 0;

  friend bool operator==(const CoverageRow&, const CoverageRow&) = default;
};

std::vector<CoverageRow> coverage(const History& history, const SearchSpace& space);

// Running maximum of ok values in iteration order: one (iteration,
// best-so-far) point per ok entry.
std::vector<std::pair<std::int64_t, double>> best_so_far(const History& history);

// One row per (ok entry, unordered parameter pair): d*(d-1)/2 rows per entry.
struct PairplotRow {
  std::string param_a;
  std::int64_t value_a = 0;
  std::string param_b;
  std::int64_t value_b = 0;
  double metric = 0.0;

  friend bool operator==(const PairplotRow&, const PairplotRow&) = default;
};

std::vector<PairplotRow> pairplot_export(const History& history, const SearchSpace& space);

// Evaluates every grid point once, in lexicographic order of value vectors.
// best is the argmax over ok entries (lexicographically smallest on ties),
// absent when no evaluation succeeded. Throws GridTooLarge past the limit.
struct SweepResult {
  History history;
  std::optional<Configuration> best;
};

SweepResult exhaustive_sweep(const SearchSpace& space, Evaluator& evaluator, std::int64_t limit);

struct TuningReport {
  std::string engine;
  std::uint64_t seed = 0;
  Configuration best_config;
  double best_value = 0.0;
  std::int64_t total_evaluations = 0;
  double total_wall_time_s = 0.0;
  std::vector<std::pair<std::int64_t, double>> trajectory;
  std::vector<CoverageRow> coverage;

  friend bool operator==(const TuningReport&, const TuningReport&) = default;
};

// Throws EmptyHistory when the history has no ok entry.
TuningReport make_report(const History& history, const SearchSpace& space, std::string engine,
                         std::uint64_t seed);

// Cross-engine summary: best value, 1-based iteration count to reach within
// 1% of the history's own best, and the mean span_pct across parameters.
struct CompareRow {
  std::string name;
  double best_value = 0.0;
  std::int64_t iterations_to_best = 0;
  double mean_span_pct = 0.0;

  friend bool operator==(const CompareRow&, const CompareRow&) = default;
};

std::vector<CompareRow> compare(const std::vector<std::pair<std::string, const History*>>& runs,
                                const SearchSpace& space);

// CSV exports, fixed header rows, reals rendered with round-trip precision.
void write_coverage_csv(std::ostream& out, const std::vector<CoverageRow>& rows);
void write_trajectory_csv(std::ostream& out,
                          const std::vector<std::pair<std::int64_t, double>>& trajectory);
void write_pairplot_csv(std::ostream& out, const std::vector<PairplotRow>& rows);
void write_compare_csv(std::ostream& out, const std::vector<CompareRow>& rows);

std::string report_to_json(const TuningReport& report);

}  // namespace gridtune::analysis

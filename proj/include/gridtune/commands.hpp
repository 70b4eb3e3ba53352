#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gridtune/study.hpp"

namespace gridtune::cli {

// Exit codes: 0 success (>= 1 ok evaluation), 1 configuration/input error,
// 2 zero ok evaluations.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitNoOkEvaluations = 2;

struct TuneOverrides {
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
};

// Runs the tuning loop and writes history.jsonl (streamed per evaluation),
// report.json, coverage.csv, trajectory.csv, and pairplot.csv to the output
// directory.
int cmd_tune(const StudyConfig& study, const TuneOverrides& overrides, std::ostream& out);

// Evaluates the whole grid (engine must be 'exhaustive') and writes
// history.jsonl plus report.json with the argmax.
int cmd_sweep(const StudyConfig& study, std::int64_t limit, const TuneOverrides& overrides,
              std::ostream& out);

// Prints the cross-run comparison and per-run coverage; writes compare.csv
// and <name>_coverage.csv under output_dir.
int cmd_report(const SearchSpace& space, const std::vector<std::filesystem::path>& history_files,
               const std::filesystem::path& output_dir, std::ostream& out);

// Self-contained synthetic run on a built-in space; prints the summary.
int cmd_demo(const std::string& surface, const std::string& engine, std::uint64_t seed,
             std::ostream& out);

}  // namespace gridtune::cli

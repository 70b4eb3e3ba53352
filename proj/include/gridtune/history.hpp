#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gridtune/space.hpp"

namespace gridtune {

enum class EvalStatus { ok, failed, timeout };

std::string_view to_string(EvalStatus status);
EvalStatus eval_status_from_string(std::string_view text);

// One measurement of the objective at a configuration. value is present
// exactly when status == ok and holds the aggregate of the raw repeats.
struct Evaluation {
  Configuration config;
  std::optional<double> value;
  std::vector<double> repeats;
  double wall_time_s = 0.0;
  EvalStatus status = EvalStatus::failed;
  std::int64_t iteration = 0;

  bool ok() const { return status == EvalStatus::ok; }

  friend bool operator==(const Evaluation&, const Evaluation&) = default;
};

// Append-only record of the tuning run. At most one ok entry may exist per
// distinct configuration; failed/timeout entries are kept but not indexed,
// so the same point may be retried after a failure.
class History {
 public:
  // Throws DuplicateOk on a second ok entry for the same configuration and
  // IterationOrder when iteration numbers do not strictly increase.
  void record(Evaluation evaluation);

  // The prior ok entry for this configuration, or nullptr.
  const Evaluation* lookup(const Configuration& config) const;

  // The ok entry with the highest value (earliest on ties), or nullptr.
  const Evaluation* best_ok() const;

  const std::vector<Evaluation>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::size_t ok_count() const { return ok_index_.size(); }

  friend bool operator==(const History& a, const History& b) { return a.entries_ == b.entries_; }

 private:
  std::vector<Evaluation> entries_;
  std::map<std::vector<std::int64_t>, std::size_t> ok_index_;
};

// JSON-lines serialization. One object per evaluation with fields, in order:
// iteration, values[], value, repeats[], wall_time_s, status. value is null
// for non-ok entries; reals render with round-trip precision.
std::string to_json_line(const Evaluation& evaluation);
Evaluation evaluation_from_json_line(const std::string& line);

void write_history_jsonl(const std::filesystem::path& path, const History& history);
History load_history_jsonl(const std::filesystem::path& path);

}  // namespace gridtune

#include "gridtune/history.hpp"

#include <fstream>

#include <json.hpp>

#include "gridtune/errors.hpp"

namespace gridtune {

std::string_view to_string(EvalStatus status) {
  switch (status) {
    case EvalStatus::ok: return "ok";
    case EvalStatus::failed: return "failed";
    case EvalStatus::timeout: return "timeout";
  }
  return "failed";
}

EvalStatus eval_status_from_string(std::string_view text) {
  if (text == "ok") return EvalStatus::ok;
  if (text == "failed") return EvalStatus::failed;
  if (text == "timeout") return EvalStatus::timeout;
  fail(Errc::parse_error, "unknown evaluation status '" + std::string(text) + "'");
}

void History::record(Evaluation evaluation) {
  if (!entries_.empty() && evaluation.iteration <= entries_.back().iteration)
    fail(Errc::iteration_order, "iteration " + std::to_string(evaluation.iteration) +
                                    " not after " + std::to_string(entries_.back().iteration));
  if (evaluation.ok()) {
    if (!evaluation.value.has_value())
      fail(Errc::validation_error, "ok evaluation without a value");
    if (ok_index_.count(evaluation.config.values))
      fail(Errc::duplicate_ok, "configuration already has an ok evaluation");
    ok_index_.emplace(evaluation.config.values, entries_.size());
  } else if (evaluation.value.has_value()) {
    fail(Errc::validation_error, "non-ok evaluation carries a value");
  }
  entries_.push_back(std::move(evaluation));
}

const Evaluation* History::lookup(const Configuration& config) const {
  const auto it = ok_index_.find(config.values);
  return it == ok_index_.end() ? nullptr : &entries_[it->second];
}

const Evaluation* History::best_ok() const {
  const Evaluation* best = nullptr;
  for (const Evaluation& e : entries_) {
    if (!e.ok()) continue;
    if (!best || *e.value > *best->value) best = &e;
  }
  return best;
}

std::string to_json_line(const Evaluation& evaluation) {
  nlohmann::ordered_json j;
  j["iteration"] = evaluation.iteration;
  j["values"] = evaluation.config.values;
  if (evaluation.value.has_value())
    j["value"] = *evaluation.value;
  else
    j["value"] = nullptr;
  j["repeats"] = evaluation.repeats;
  j["wall_time_s"] = evaluation.wall_time_s;
  j["status"] = to_string(evaluation.status);
  return j.dump();
}

Evaluation evaluation_from_json_line(const std::string& line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    fail(Errc::parse_error, e.what());
  }
  Evaluation ev;
  try {
    ev.iteration = j.at("iteration").get<std::int64_t>();
    ev.config.values = j.at("values").get<std::vector<std::int64_t>>();
    if (!j.at("value").is_null()) ev.value = j.at("value").get<double>();
    ev.repeats = j.at("repeats").get<std::vector<double>>();
    ev.wall_time_s = j.at("wall_time_s").get<double>();
    ev.status = eval_status_from_string(j.at("status").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::parse_error, std::string("bad history line: ") + e.what());
  }
  return ev;
}

void write_history_jsonl(const std::filesystem::path& path, const History& history) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(Errc::io_error, "cannot open '" + path.string() + "' for writing");
  for (const Evaluation& e : history.entries()) out << to_json_line(e) << '\n';
}

History load_history_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot open '" + path.string() + "'");
  History history;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    history.record(evaluation_from_json_line(line));
  }
  return history;
}

}  // namespace gridtune

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "gridtune/bayes.hpp"
#include "gridtune/genetic.hpp"
#include "gridtune/harness.hpp"
#include "gridtune/neldermead.hpp"
#include "gridtune/session.hpp"
#include "gridtune/space.hpp"

namespace gridtune::cli {

enum class EngineKind { bo, ga, nms, random_search, exhaustive };

std::string_view to_string(EngineKind kind);
EngineKind engine_kind_from_string(std::string_view text);

// Engine selection switch plus the parameter block of the selected engine;
// the other blocks stay at their defaults.
struct EngineConfig {
  EngineKind kind = EngineKind::bo;
  bayes::Params bo;
  genetic::Params ga;
  neldermead::Params nms;

  friend bool operator==(const EngineConfig&, const EngineConfig&) = default;
};

// A full tuning study: the space, exactly one of workload/synthetic, the
// engine, and session settings.
struct StudyConfig {
  std::string name;
  SearchSpace space;
  std::optional<harness::WorkloadSpec> workload;
  std::optional<harness::SyntheticSpec> synthetic;
  EngineConfig engine;
  std::int64_t max_iterations = 50;
  std::uint64_t seed = 0;
  std::string output_dir = "out";

  friend bool operator==(const StudyConfig&, const StudyConfig&) = default;
};

// Strict JSON parsing: unknown keys are rejected at every level, errors name
// the offending field. parse_study(study_to_json(c)) round-trips.
StudyConfig parse_study(const std::filesystem::path& file);
StudyConfig parse_study_text(const std::string& text);
std::string study_to_json(const StudyConfig& config);

// Accepts either a full study file or a bare JSON array of parameter specs.
SearchSpace parse_space_file(const std::filesystem::path& file);

std::unique_ptr<Engine> make_engine(const EngineConfig& engine);
std::unique_ptr<Evaluator> make_evaluator(const StudyConfig& config);

}  // namespace gridtune::cli

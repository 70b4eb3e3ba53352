#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gridtune/history.hpp"
#include "gridtune/session.hpp"
#include "gridtune/space.hpp"

namespace gridtune::harness {

enum class Aggregation { median, mean, max };

std::string_view to_string(Aggregation a);
Aggregation aggregation_from_string(std::string_view text);

// Combines raw repeat measurements into the evaluation value. Median of an
// even count averages the middle pair.
double aggregate(Aggregation how, std::vector<double> repeats);

// An external workload: argv/env templates with {param} placeholders, plus
// how to pull the scalar metric out of its combined stdout/stderr.
struct WorkloadSpec {
  std::vector<std::string> command;
  std::map<std::string, std::string> env;
  std::string metric_pattern;  // POSIX ERE with exactly one capture group
  std::int64_t repeats = 1;
  Aggregation aggregation = Aggregation::median;
  double timeout_s = 3600.0;
  std::string working_dir;

  friend bool operator==(const WorkloadSpec&, const WorkloadSpec&) = default;
};

// Placeholder/binding consistency and metric_pattern checks.
// Throws UnknownPlaceholder, MissingBinding, BadPattern.
void validate_workload(const WorkloadSpec& workload, const SearchSpace& space);

struct RenderedCommand {
  std::vector<std::string> argv;
  std::map<std::string, std::string> env;
};

// Substitutes every {param} placeholder with the decimal value.
RenderedCommand render(const WorkloadSpec& workload, const SearchSpace& space,
                       const Configuration& config);

// Launches the workload `repeats` times sequentially. Each run scans the
// combined output for the LAST metric_pattern match (benchmark logs often
// print warm-up figures first). Status is ok only when every repeat matched
// within the timeout and exited zero; the child process group is killed on
// timeout.
Evaluation run_evaluation(const WorkloadSpec& workload, const SearchSpace& space,
                          const Configuration& config, std::int64_t iteration);

class SubprocessEvaluator final : public Evaluator {
 public:
  SubprocessEvaluator(WorkloadSpec workload, SearchSpace space);

  Evaluation evaluate(const Configuration& config, std::int64_t iteration) override;

 private:
  WorkloadSpec workload_;
  SearchSpace space_;
};

// Deterministic stand-in objectives for tests and demos.
//
//   resnet-like    closed form over the five threading parameters:
//                  100 * omp/(omp+14) * (1 - kmp/800) * (1 + batch/8192)
//                      * (1 - 0.01*(inter-1)), independent of intra
//   quadratic      -sum_i (v_i - t_i)^2 toward a target grid point
//   separable-sum  sum_i v_i
//   plateau        per-dimension quarter staircase with a single strictly
//                  best bonus cell at the target
//
// Optional Gaussian noise is seeded by hashing (seed, values, repeat index),
// so every repeat is bitwise reproducible.
enum class Surface { resnet_like, quadratic, separable_sum, plateau };

std::string_view to_string(Surface s);
Surface surface_from_string(std::string_view text);

struct SyntheticSpec {
  Surface surface = Surface::resnet_like;
  double noise_std = 0.0;
  std::uint64_t noise_seed = 0;
  std::int64_t repeats = 1;
  Aggregation aggregation = Aggregation::median;
  std::optional<Configuration> target;  // quadratic/plateau; defaults below

  friend bool operator==(const SyntheticSpec&, const SyntheticSpec&) = default;
};

// Default targets: quadratic snaps the cube midpoint, plateau uses the
// all-max corner.
Configuration default_target(Surface surface, const SearchSpace& space);

// One raw measurement. Pure in (spec, space, config, repeat_index).
// Throws UnboundParameter when resnet-like misses one of its five parameters.
double synthetic_eval(const SyntheticSpec& spec, const SearchSpace& space,
                      const Configuration& config, std::int64_t repeat_index);

class SyntheticEvaluator final : public Evaluator {
 public:
  SyntheticEvaluator(SyntheticSpec spec, SearchSpace space);

  Evaluation evaluate(const Configuration& config, std::int64_t iteration) override;

 private:
  SyntheticSpec spec_;
  SearchSpace space_;
};

}  // namespace gridtune::harness

#pragma once

#include <cstdint>
#include <functional>

#include "gridtune/engine.hpp"
#include "gridtune/history.hpp"

namespace gridtune {

// Produces one Evaluation per request. Implementations: subprocess workloads
// and synthetic surfaces (harness.hpp).
class Evaluator {
 public:
  virtual ~Evaluator() = default;
  virtual Evaluation evaluate(const Configuration& config, std::int64_t iteration) = 0;
};

// Serves the cached ok evaluation when one exists; otherwise runs the
// evaluator and records the result. Failed evaluations are never cached, so
// a point may be retried. cache_hit, when given, reports which path ran.
const Evaluation& evaluate_with_cache(History& history, const Configuration& config,
                                      Evaluator& evaluator, bool* cache_hit = nullptr);

// The sequential propose/evaluate/observe loop: one proposal, one
// evaluation, one observation at a time. Cache hits are fed back to the
// engine without consuming budget; every fresh evaluation (ok or not)
// consumes one iteration.
class TuningSession {
 public:
  using EvaluationCallback = std::function<void(const Evaluation&)>;

  TuningSession(Engine& engine, const SearchSpace& space, Evaluator& evaluator, Rng& rng,
                std::int64_t max_iterations);

  // Runs one cycle. Returns false when the engine reports SpaceExhausted;
  // throws BudgetExhausted when called past the iteration cap.
  bool step(const EvaluationCallback& on_evaluation = {});

  // Runs until the budget is spent or the space is exhausted.
  void run(const EvaluationCallback& on_evaluation = {});

  const History& history() const { return history_; }
  History take_history() { return std::move(history_); }
  std::int64_t iterations_used() const { return iterations_used_; }
  bool space_exhausted() const { return space_exhausted_; }

 private:
  Engine& engine_;
  const SearchSpace& space_;
  Evaluator& evaluator_;
  Rng& rng_;
  std::int64_t max_iterations_;
  std::int64_t iterations_used_ = 0;
  bool space_exhausted_ = false;
  History history_;
};

}  // namespace gridtune

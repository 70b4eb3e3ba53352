#include "gridtune/session.hpp"

#include "gridtune/errors.hpp"

namespace gridtune {

const Evaluation& evaluate_with_cache(History& history, const Configuration& config,
                                      Evaluator& evaluator, bool* cache_hit) {
  if (const Evaluation* prior = history.lookup(config)) {
    if (cache_hit) *cache_hit = true;
    return *prior;
  }
  if (cache_hit) *cache_hit = false;
  Evaluation ev = evaluator.evaluate(config, static_cast<std::int64_t>(history.size()));
  history.record(std::move(ev));
  return history.entries().back();
}

TuningSession::TuningSession(Engine& engine, const SearchSpace& space, Evaluator& evaluator,
                             Rng& rng, std::int64_t max_iterations)
    : engine_(engine), space_(space), evaluator_(evaluator), rng_(rng),
      max_iterations_(max_iterations) {
  validate_space(space);
  if (max_iterations < 1) fail(Errc::validation_error, "max_iterations must be >= 1");
}

bool TuningSession::step(const EvaluationCallback& on_evaluation) {
  if (space_exhausted_) return false;
  if (iterations_used_ >= max_iterations_)
    fail(Errc::budget_exhausted,
         "iteration cap of " + std::to_string(max_iterations_) + " reached");

  // An engine may keep re-proposing evaluated points; those are served from
  // history without consuming budget. The guard bounds a misbehaving engine.
  for (int consecutive_hits = 0; consecutive_hits < 10000; ++consecutive_hits) {
    Configuration config;
    try {
      config = engine_.propose(history_, space_, rng_);
    } catch (const TuneError& e) {
      if (e.code() == Errc::space_exhausted) {
        space_exhausted_ = true;
        return false;
      }
      throw;
    }
    bool cache_hit = false;
    const Evaluation& ev = evaluate_with_cache(history_, config, evaluator_, &cache_hit);
    if (cache_hit) {
      engine_.observe(ev);
      continue;
    }
    if (on_evaluation) on_evaluation(ev);
    engine_.observe(ev);
    ++iterations_used_;
    return true;
  }
  fail(Errc::stalled, "engine produced cache hits only");
}

void TuningSession::run(const EvaluationCallback& on_evaluation) {
  while (iterations_used_ < max_iterations_ && !space_exhausted_) {
    if (!step(on_evaluation)) break;
  }
}

}  // namespace gridtune

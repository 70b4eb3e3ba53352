#include "gridtune/genetic.hpp"

#include <algorithm>
#include <string>

#include "gridtune/errors.hpp"

namespace gridtune::genetic {

std::int64_t default_seed_pool(std::size_t dim) {
  return std::max<std::int64_t>(4, static_cast<std::int64_t>(dim));
}

std::pair<const Evaluation*, const Evaluation*> select_parents(const History& history,
                                                               const Fitness& fitness) {
  const Evaluation* first = nullptr;
  const Evaluation* second = nullptr;
  double first_fit = 0.0;
  double second_fit = 0.0;
  for (const Evaluation& e : history.entries()) {
    if (!e.ok()) continue;
    const double g = fitness ? fitness(e.config, *e.value) : *e.value;
    if (!first || g > first_fit) {
      second = first;
      second_fit = first_fit;
      first = &e;
      first_fit = g;
    } else if (!second || g > second_fit) {
      second = &e;
      second_fit = g;
    }
  }
  if (!first || !second)
    fail(Errc::insufficient_history, "parent selection needs two ok evaluations");
  return {first, second};
}

Configuration crossover(const Configuration& p1, const Configuration& p2, Rng& rng) {
  const std::size_t d = p1.values.size();
  if (d != p2.values.size()) fail(Errc::dimension_mismatch, "parents of different dimension");
  if (d == 0) fail(Errc::validation_error, "empty parents");
  if (d == 1) return rng.below(2) == 0 ? p1 : p2;
  const std::size_t cut = 1 + static_cast<std::size_t>(rng.below(d - 1));
  Configuration child = p1;
  for (std::size_t i = cut; i < d; ++i) child.values[i] = p2.values[i];
  return child;
}

Configuration mutate(const Configuration& child, const SearchSpace& space, double rate, Rng& rng) {
  if (child.values.size() != space.dim())
    fail(Errc::dimension_mismatch, "child does not match the space");
  Configuration mutated = child;
  for (std::size_t i = 0; i < space.dim(); ++i) {
    if (rng.unit() >= rate) continue;
    const ParameterSpec& p = space.params[i];
    const std::uint64_t idx = rng.below(static_cast<std::uint64_t>(p.point_count()));
    mutated.values[i] = p.min + static_cast<std::int64_t>(idx) * p.step;
  }
  return mutated;
}

GeneticEngine::GeneticEngine(Params params, Fitness fitness)
    : params_(params), fitness_(std::move(fitness)) {
  if (params_.mutation_rate < 0.0 || params_.mutation_rate > 1.0)
    fail(Errc::validation_error, "mutation_rate must be in [0, 1]");
  if (params_.seed_pool && *params_.seed_pool < 2)
    fail(Errc::validation_error, "seed_pool must be >= 2");
  if (params_.max_retries < 1) fail(Errc::validation_error, "max_retries must be >= 1");
}

Configuration GeneticEngine::do_propose(const History& history, const SearchSpace& space,
                                        Rng& rng) {
  const std::int64_t pool = params_.seed_pool.value_or(default_seed_pool(space.dim()));
  if (static_cast<std::int64_t>(history.ok_count()) < pool)
    return random_unevaluated(space, history, rng);

  const auto [fittest, second] = select_parents(history, fitness_);
  // Either parent may contribute the prefix; a fixed order would make half
  // the single-cut recombinations unreachable.
  auto breed = [&]() {
    const Configuration* a = &fittest->config;
    const Configuration* b = &second->config;
    if (rng.below(2) == 1) std::swap(a, b);
    return mutate(crossover(*a, *b, rng), space, params_.mutation_rate, rng);
  };
  // Duplicate results escape by re-running the breeding step with a fresh
  // cut, order, and mutation draw; retries stay in the parents' neighborhood.
  Configuration proposal = breed();
  for (std::int64_t retry = 0; retry < params_.max_retries && history.lookup(proposal); ++retry)
    proposal = breed();
  if (!history.lookup(proposal)) return proposal;
  return random_unevaluated(space, history, rng);
}

void GeneticEngine::do_observe(const Evaluation&) {}

}  // namespace gridtune::genetic

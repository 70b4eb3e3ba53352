#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>

#include "gridtune/engine.hpp"

namespace gridtune::genetic {

struct Params {
  double mutation_rate = 0.1;               // per-gene replacement probability
  std::optional<std::int64_t> seed_pool;    // random configs before breeding; default max(4, d)
  std::int64_t max_retries = 8;             // mutate re-runs to escape duplicates

  friend bool operator==(const Params&, const Params&) = default;
};

std::int64_t default_seed_pool(std::size_t dim);

// Fitness over an ok entry; defaults to the measured metric itself.
using Fitness = std::function<double(const Configuration&, double value)>;

// The two fittest ok entries, ties broken by earlier iteration.
// Throws InsufficientHistory below two ok entries.
std::pair<const Evaluation*, const Evaluation*> select_parents(const History& history,
                                                               const Fitness& fitness = {});

// Single-cut positional recombination: a uniform cut in {1, ..., d-1}, the
// prefix from p1 and the suffix from p2. For d = 1 either parent, equally.
Configuration crossover(const Configuration& p1, const Configuration& p2, Rng& rng);

// Each gene independently redrawn uniformly over its grid with probability
// rate (the redraw may repeat the original value).
Configuration mutate(const Configuration& child, const SearchSpace& space, double rate, Rng& rng);

// History-driven genetic engine: breed from the two globally fittest
// evaluations, no generational population.
class GeneticEngine final : public Engine {
 public:
  explicit GeneticEngine(Params params = {}, Fitness fitness = {});

  std::string_view name() const override { return "ga"; }

 protected:
  Configuration do_propose(const History& history, const SearchSpace& space, Rng& rng) override;
  void do_observe(const Evaluation& evaluation) override;

 private:
  Params params_;
  Fitness fitness_;
};

}  // namespace gridtune::genetic

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gridtune/engine.hpp"
#include "gridtune/gp.hpp"

namespace gridtune::bayes {

struct Params {
  double alpha = 2.0;    // exploration weight on the predictive stddev
  double epsilon = 0.0;  // improvement offset against the incumbent
  std::optional<std::int64_t> init_budget;  // random initial design; default max(5, d + 1)
  std::int64_t candidate_budget = 2048;
  std::int64_t refit_period = 5;  // observations between hyperparameter re-selections

  friend bool operator==(const Params&, const Params&) = default;
};

std::int64_t default_init_budget(std::size_t dim);

// Optimistic improvement over the incumbent: (mean + alpha * stddev) - (best_y + epsilon).
double smsego_gain(double mean, double stddev, double best_y, double alpha, double epsilon);

// k distinct uniform-random grid points. Throws SpaceTooSmall when k exceeds
// the grid size.
std::vector<Configuration> initial_design(const SearchSpace& space, std::int64_t k, Rng& rng);

// Bayesian optimization: a random initial design, then a Gaussian-process
// surrogate refit on every ok observation, scored over a candidate set (the
// full grid when it fits the candidate budget; otherwise uniform samples
// plus the one-step grid neighborhood of the incumbent). Already-evaluated
// candidates are dropped, so no configuration is proposed twice.
class BayesEngine final : public Engine {
 public:
  explicit BayesEngine(Params params = {});

  std::string_view name() const override { return "bo"; }

 protected:
  Configuration do_propose(const History& history, const SearchSpace& space, Rng& rng) override;
  void do_observe(const Evaluation& evaluation) override;

 private:
  Params params_;
  std::vector<Configuration> design_;
  std::size_t design_next_ = 0;
  bool design_ready_ = false;
  std::optional<gp::Hyper> hyper_;
  std::size_t hyper_ok_count_ = 0;
};

}  // namespace gridtune::bayes

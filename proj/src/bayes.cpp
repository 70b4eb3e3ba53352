#include "gridtune/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <utility>

#include "gridtune/errors.hpp"

namespace gridtune::bayes {

namespace {

// ok entries only: normalized inputs and raw metric targets.
std::pair<std::vector<std::vector<double>>, std::vector<double>> training_set(
    const History& history, const SearchSpace& space) {
  std::vector<std::vector<double>> u;
  std::vector<double> y;
  for (const Evaluation& e : history.entries()) {
    if (!e.ok()) continue;
    u.push_back(normalize(space, e.config));
    y.push_back(*e.value);
  }
  return {std::move(u), std::move(y)};
}

// One-step grid moves from config, one dimension at a time.
std::vector<Configuration> grid_neighbors(const SearchSpace& space, const Configuration& config) {
  std::vector<Configuration> out;
  for (std::size_t i = 0; i < space.dim(); ++i) {
    const ParameterSpec& p = space.params[i];
    for (std::int64_t delta : {-p.step, p.step}) {
      const std::int64_t v = config.values[i] + delta;
      if (v < p.min || v > p.max) continue;
      Configuration c = config;
      c.values[i] = v;
      out.push_back(std::move(c));
    }
  }
  return out;
}

}  // namespace

std::int64_t default_init_budget(std::size_t dim) {
  return std::max<std::int64_t>(5, static_cast<std::int64_t>(dim) + 1);
}

double smsego_gain(double mean, double stddev, double best_y, double alpha, double epsilon) {
  return (mean + alpha * stddev) - (best_y + epsilon);
}

std::vector<Configuration> initial_design(const SearchSpace& space, std::int64_t k, Rng& rng) {
  const std::int64_t total = grid_size(space);
  if (k < 1) fail(Errc::validation_error, "initial design size must be >= 1");
  if (k > total)
    fail(Errc::space_too_small, "initial design of " + std::to_string(k) +
                                    " points on a grid of " + std::to_string(total));

  if (total <= 4 * k) {
    // Dense regime: enumerate and partially shuffle.
    std::vector<Configuration> all;
    all.reserve(static_cast<std::size_t>(total));
    for (std::int64_t flat = 0; flat < total; ++flat) all.push_back(config_at(space, flat));
    for (std::int64_t i = 0; i < k; ++i) {
      const std::int64_t j =
          i + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(total - i)));
      std::swap(all[i], all[j]);
    }
    all.resize(static_cast<std::size_t>(k));
    return all;
  }

  std::set<Configuration> seen;
  std::vector<Configuration> design;
  while (static_cast<std::int64_t>(design.size()) < k) {
    Configuration c = random_config(space, rng);
    if (seen.insert(c).second) design.push_back(std::move(c));
  }
  return design;
}

BayesEngine::BayesEngine(Params params) : params_(std::move(params)) {
  if (params_.alpha < 0.0) fail(Errc::validation_error, "alpha must be >= 0");
  if (params_.epsilon < 0.0) fail(Errc::validation_error, "epsilon must be >= 0");
  if (params_.init_budget && *params_.init_budget < 1)
    fail(Errc::validation_error, "init_budget must be >= 1");
  if (params_.candidate_budget < 1) fail(Errc::validation_error, "candidate_budget must be >= 1");
  if (params_.refit_period < 1) fail(Errc::validation_error, "refit_period must be >= 1");
}

Configuration BayesEngine::do_propose(const History& history, const SearchSpace& space, Rng& rng) {
  const std::int64_t total = grid_size(space);
  const std::int64_t init_budget = params_.init_budget.value_or(default_init_budget(space.dim()));

  if (!design_ready_) {
    design_ = initial_design(space, std::min(init_budget, total), rng);
    design_ready_ = true;
  }

  if (static_cast<std::int64_t>(history.ok_count()) < init_budget) {
    while (design_next_ < design_.size()) {
      const Configuration& c = design_[design_next_++];
      if (!history.lookup(c)) return c;
    }
    // Design spent without enough ok entries (failures); keep sampling.
    return random_unevaluated(space, history, rng);
  }

  auto [train_u, train_y] = training_set(history, space);
  if (!hyper_ || history.ok_count() >= hyper_ok_count_ + static_cast<std::size_t>(params_.refit_period)) {
    hyper_ = gp::select_hypers(train_u, train_y, gp::default_hyper_grid(space.dim()));
    hyper_ok_count_ = history.ok_count();
  }
  const gp::Model model = gp::Model::fit(train_u, train_y, *hyper_);
  const double best_y = *history.best_ok()->value;

  const bool full_grid = total <= params_.candidate_budget;
  for (int attempt = 0;; ++attempt) {
    std::set<Configuration> candidates;
    if (full_grid) {
      for (std::int64_t flat = 0; flat < total; ++flat) {
        Configuration c = config_at(space, flat);
        if (!history.lookup(c)) candidates.insert(std::move(c));
      }
    } else {
      for (std::int64_t i = 0; i < params_.candidate_budget; ++i) {
        Configuration c = random_config(space, rng);
        if (!history.lookup(c)) candidates.insert(std::move(c));
      }
      for (Configuration& c : grid_neighbors(space, history.best_ok()->config))
        if (!history.lookup(c)) candidates.insert(std::move(c));
    }

    if (!candidates.empty()) {
      const Configuration* best = nullptr;
      double best_gain = 0.0;
      for (const Configuration& c : candidates) {
        const gp::Prediction p = model.predict(normalize(space, c));
        const double gain =
            smsego_gain(p.mean, std::sqrt(p.variance), best_y, params_.alpha, params_.epsilon);
        if (!best || gain > best_gain || (gain == best_gain && c < *best)) {
          best = &c;
          best_gain = gain;
        }
      }
      return *best;
    }

    if (full_grid) fail(Errc::space_exhausted, "every grid point has an ok evaluation");
    if (attempt >= 5) return random_unevaluated(space, history, rng);
  }
}

void BayesEngine::do_observe(const Evaluation&) {}

}  // namespace gridtune::bayes

#pragma once

#include <optional>
#include <string_view>

#include "gridtune/history.hpp"
#include "gridtune/rng.hpp"
#include "gridtune/space.hpp"

namespace gridtune {

// Common contract for the search engines. An engine proposes one grid
// configuration at a time and must see its evaluation (observe) before the
// next proposal; the base class enforces this strict alternation.
class Engine {
 public:
  virtual ~Engine() = default;

  virtual std::string_view name() const = 0;

  Configuration propose(const History& history, const SearchSpace& space, Rng& rng);
  void observe(const Evaluation& evaluation);

 protected:
  virtual Configuration do_propose(const History& history, const SearchSpace& space, Rng& rng) = 0;
  virtual void do_observe(const Evaluation& evaluation) = 0;

 private:
  std::optional<Configuration> pending_;
};

// Uniform draw over the grid points that do not have an ok evaluation yet.
// Throws SpaceExhausted when every grid point has one.
Configuration random_unevaluated(const SearchSpace& space, const History& history, Rng& rng);

// Baseline engine: independent uniform draws over the unevaluated grid.
class RandomEngine final : public Engine {
 public:
  std::string_view name() const override { return "random"; }

 protected:
  Configuration do_propose(const History& history, const SearchSpace& space, Rng& rng) override {
    return random_unevaluated(space, history, rng);
  }
  void do_observe(const Evaluation&) override {}
};

}  // namespace gridtune

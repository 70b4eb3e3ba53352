#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gridtune/engine.hpp"

namespace gridtune::neldermead {

struct Coefficients {
  double reflect = 1.0;
  double expand = 2.0;
  double contract = 0.5;
  double shrink = 0.5;

  friend bool operator==(const Coefficients&, const Coefficients&) = default;
};

struct Params {
  Coefficients coeffs;
  bool restart_on_stall = true;

  friend bool operator==(const Params&, const Params&) = default;
};

// d+1 unit-cube vertices: vertex 0 is the normalized start, vertex i
// displaces coordinate i-1 by +0.25 (or -0.25 when +0.25 would leave the
// cube).
std::vector<std::vector<double>> init_simplex(const SearchSpace& space, const Configuration& start,
                                              Rng& rng);

// Arithmetic mean per coordinate.
std::vector<double> centroid(const std::vector<std::vector<double>>& points);

// x_c + coefficient * (x_c - x_w), clamped to [0,1]^d. Reflection, expansion
// and outside contraction use positive coefficients; inside contraction uses
// the negated contraction coefficient.
std::vector<double> simplex_move(std::span<const double> centroid_point,
                                 std::span<const double> worst_point, double coefficient);

// Nelder-Mead simplex adapted to the grid: the simplex lives in the
// continuous unit cube, proposals snap to grid points at evaluation time,
// and snapped points already evaluated advance the state machine from the
// cached value without a new run. When a whole round is served from cache
// and the simplex has collapsed below one grid step per dimension, the
// engine restarts from a fresh random simplex (keeping global history).
class NelderMeadEngine final : public Engine {
 public:
  explicit NelderMeadEngine(Params params = {});

  std::string_view name() const override { return "nms"; }

  std::int64_t restart_count() const { return restarts_; }

  // Observation trace, one character per state-machine event:
  // B built vertex, R reflection, E expansion, O outside contraction,
  // I inside contraction, S shrink started, V shrunk vertex re-evaluated,
  // A vertex accepted, X restart.
  const std::string& event_log() const { return event_log_; }

  // Losses (negated metric) of the current simplex; empty while building.
  std::vector<double> simplex_losses() const;

 protected:
  Configuration do_propose(const History& history, const SearchSpace& space, Rng& rng) override;
  void do_observe(const Evaluation& evaluation) override;

 private:
  enum class Phase { building, reflecting, expanding, contracting_out, contracting_in, shrinking };

  struct Vertex {
    std::vector<double> u;
    double loss = 0.0;
  };

  void start_fresh(const SearchSpace& space, const History& history, Rng& rng);
  const std::vector<double>& current_target() const;
  void advance(double loss, bool fresh);
  void begin_round();
  void complete_round();
  void accept_worst(std::vector<double> u, double loss);
  void start_shrink();
  bool diameter_below_grid_step() const;

  Params params_;
  bool started_ = false;
  bool need_restart_ = false;
  Phase phase_ = Phase::building;
  std::vector<Vertex> simplex_;
  std::size_t build_next_ = 0;
  std::vector<double> centroid_;
  std::vector<double> reflect_u_;
  std::vector<double> expand_u_;
  std::vector<double> contract_u_;
  double reflect_loss_ = 0.0;
  std::size_t shrink_next_ = 0;
  bool fresh_eval_in_round_ = false;
  std::vector<double> unit_step_;
  std::int64_t restarts_ = 0;
  std::string event_log_;
};

}  // namespace gridtune::neldermead

#include "gridtune/engine.hpp"

#include "gridtune/errors.hpp"

namespace gridtune {

Configuration Engine::propose(const History& history, const SearchSpace& space, Rng& rng) {
  if (pending_)
    fail(Errc::protocol_violation, "propose called while a proposal awaits its observation");
  Configuration config = do_propose(history, space, rng);
  pending_ = config;
  return config;
}

void Engine::observe(const Evaluation& evaluation) {
  if (!pending_) fail(Errc::protocol_violation, "observe called without a pending proposal");
  if (evaluation.config != *pending_)
    fail(Errc::protocol_violation, "observed evaluation does not match the pending proposal");
  pending_.reset();
  do_observe(evaluation);
}

Configuration random_unevaluated(const SearchSpace& space, const History& history, Rng& rng) {
  const std::int64_t total = grid_size(space);
  if (static_cast<std::int64_t>(history.ok_count()) >= total)
    fail(Errc::space_exhausted, "every grid point has an ok evaluation");

  // Rejection sampling terminates fast at tuning densities; the exact walk
  // below covers small or nearly exhausted grids.
  for (int attempt = 0; attempt < 64; ++attempt) {
    Configuration config = random_config(space, rng);
    if (!history.lookup(config)) return config;
  }
  const std::int64_t remaining = total - static_cast<std::int64_t>(history.ok_count());
  std::int64_t target = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(remaining)));
  for (std::int64_t flat = 0; flat < total; ++flat) {
    Configuration config = config_at(space, flat);
    if (history.lookup(config)) continue;
    if (target-- == 0) return config;
  }
  fail(Errc::space_exhausted, "every grid point has an ok evaluation");
}

}  // namespace gridtune

#include "gridtune/neldermead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gridtune/errors.hpp"

namespace gridtune::neldermead {

namespace {
constexpr double kWorstLoss = std::numeric_limits<double>::infinity();
}

std::vector<std::vector<double>> init_simplex(const SearchSpace& space, const Configuration& start,
                                              Rng&) {
  const std::vector<double> origin = normalize(space, start);
  std::vector<std::vector<double>> vertices;
  vertices.reserve(space.dim() + 1);
  vertices.push_back(origin);
  for (std::size_t i = 0; i < space.dim(); ++i) {
    std::vector<double> v = origin;
    v[i] = v[i] + 0.25 > 1.0 ? v[i] - 0.25 : v[i] + 0.25;
    vertices.push_back(std::move(v));
  }
  return vertices;
}

std::vector<double> centroid(const std::vector<std::vector<double>>& points) {
  if (points.empty()) fail(Errc::validation_error, "centroid of no points");
  std::vector<double> c(points.front().size(), 0.0);
  for (const std::vector<double>& p : points) {
    if (p.size() != c.size()) fail(Errc::dimension_mismatch, "ragged centroid input");
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += p[i];
  }
  for (double& x : c) x /= static_cast<double>(points.size());
  return c;
}

std::vector<double> simplex_move(std::span<const double> centroid_point,
                                 std::span<const double> worst_point, double coefficient) {
  if (centroid_point.size() != worst_point.size())
    fail(Errc::dimension_mismatch, "centroid and worst point of different dimension");
  std::vector<double> out(centroid_point.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    double x = centroid_point[i] + coefficient * (centroid_point[i] - worst_point[i]);
    if (x < 0.0) x = 0.0;
    if (x > 1.0) x = 1.0;
    out[i] = x;
  }
  return out;
}

NelderMeadEngine::NelderMeadEngine(Params params) : params_(params) {
  if (!(params_.coeffs.reflect > 0.0) || !(params_.coeffs.expand > 1.0) ||
      !(params_.coeffs.contract > 0.0) || params_.coeffs.contract >= 1.0 ||
      !(params_.coeffs.shrink > 0.0) || params_.coeffs.shrink >= 1.0)
    fail(Errc::validation_error, "simplex coefficients out of range");
}

std::vector<double> NelderMeadEngine::simplex_losses() const {
  std::vector<double> out;
  if (phase_ == Phase::building) return out;
  out.reserve(simplex_.size());
  for (const Vertex& v : simplex_) out.push_back(v.loss);
  return out;
}

void NelderMeadEngine::start_fresh(const SearchSpace& space, const History& history, Rng& rng) {
  if (started_) {
    ++restarts_;
    event_log_ += 'X';
  }
  started_ = true;
  need_restart_ = false;

  const Configuration start = random_unevaluated(space, history, rng);
  std::vector<std::vector<double>> points = init_simplex(space, start, rng);
  simplex_.clear();
  simplex_.reserve(points.size());
  for (std::vector<double>& u : points)
    simplex_.push_back(Vertex{std::move(u), kWorstLoss});
  build_next_ = 0;
  phase_ = Phase::building;
  fresh_eval_in_round_ = false;

  unit_step_.assign(space.dim(), 0.0);
  for (std::size_t i = 0; i < space.dim(); ++i) {
    const ParameterSpec& p = space.params[i];
    if (p.max > p.min)
      unit_step_[i] = static_cast<double>(p.step) / static_cast<double>(p.max - p.min);
  }
}

Configuration NelderMeadEngine::do_propose(const History& history, const SearchSpace& space,
                                           Rng& rng) {
  if (!started_ || need_restart_) start_fresh(space, history, rng);

  // Cached points advance the state machine without a workload run; the
  // restart path always reaches an unevaluated point, so this terminates.
  for (int guard = 0; guard < 200000; ++guard) {
    const Configuration config = snap(space, current_target());
    const Evaluation* prior = history.lookup(config);
    if (!prior) return config;
    advance(-*prior->value, /*fresh=*/false);
    if (need_restart_) start_fresh(space, history, rng);
  }
  fail(Errc::stalled, "simplex cannot reach an unevaluated point");
}

void NelderMeadEngine::do_observe(const Evaluation& evaluation) {
  // Failed evaluations rank as worst-possible so the simplex moves away.
  const double loss = evaluation.ok() ? -*evaluation.value : kWorstLoss;
  advance(loss, /*fresh=*/true);
}

const std::vector<double>& NelderMeadEngine::current_target() const {
  switch (phase_) {
    case Phase::building: return simplex_[build_next_].u;
    case Phase::reflecting: return reflect_u_;
    case Phase::expanding: return expand_u_;
    case Phase::contracting_out:
    case Phase::contracting_in: return contract_u_;
    case Phase::shrinking: return simplex_[shrink_next_].u;
  }
  fail(Errc::protocol_violation, "simplex engine in unknown phase");
}

void NelderMeadEngine::advance(double loss, bool fresh) {
  fresh_eval_in_round_ = fresh_eval_in_round_ || fresh;
  const std::size_t worst = simplex_.size() - 1;
  switch (phase_) {
    case Phase::building:
      event_log_ += 'B';
      simplex_[build_next_].loss = loss;
      if (++build_next_ == simplex_.size()) begin_round();
      return;

    case Phase::reflecting:
      event_log_ += 'R';
      reflect_loss_ = loss;
      if (loss < simplex_[0].loss) {
        expand_u_ = simplex_move(centroid_, simplex_[worst].u, params_.coeffs.expand);
        phase_ = Phase::expanding;
      } else if (loss < simplex_[worst - 1].loss) {
        accept_worst(reflect_u_, loss);
      } else if (loss < simplex_[worst].loss) {
        contract_u_ = simplex_move(centroid_, simplex_[worst].u, params_.coeffs.contract);
        phase_ = Phase::contracting_out;
      } else {
        contract_u_ = simplex_move(centroid_, simplex_[worst].u, -params_.coeffs.contract);
        phase_ = Phase::contracting_in;
      }
      return;

    case Phase::expanding:
      event_log_ += 'E';
      if (loss < reflect_loss_)
        accept_worst(expand_u_, loss);
      else
        accept_worst(reflect_u_, reflect_loss_);
      return;

    case Phase::contracting_out:
      event_log_ += 'O';
      if (loss <= reflect_loss_)
        accept_worst(contract_u_, loss);
      else
        start_shrink();
      return;

    case Phase::contracting_in:
      event_log_ += 'I';
      if (loss < simplex_[worst].loss)
        accept_worst(contract_u_, loss);
      else
        start_shrink();
      return;

    case Phase::shrinking:
      event_log_ += 'V';
      simplex_[shrink_next_].loss = loss;
      if (++shrink_next_ == simplex_.size()) complete_round();
      return;
  }
}

void NelderMeadEngine::begin_round() {
  std::stable_sort(simplex_.begin(), simplex_.end(),
                   [](const Vertex& a, const Vertex& b) { return a.loss < b.loss; });
  std::vector<std::vector<double>> best_points;
  best_points.reserve(simplex_.size() - 1);
  for (std::size_t i = 0; i + 1 < simplex_.size(); ++i) best_points.push_back(simplex_[i].u);
  centroid_ = centroid(best_points);
  reflect_u_ = simplex_move(centroid_, simplex_.back().u, params_.coeffs.reflect);
  phase_ = Phase::reflecting;
}

void NelderMeadEngine::complete_round() {
  if (params_.restart_on_stall && !fresh_eval_in_round_ && diameter_below_grid_step()) {
    need_restart_ = true;
    return;
  }
  fresh_eval_in_round_ = false;
  begin_round();
}

void NelderMeadEngine::accept_worst(std::vector<double> u, double loss) {
  event_log_ += 'A';
  simplex_.back() = Vertex{std::move(u), loss};
  complete_round();
}

void NelderMeadEngine::start_shrink() {
  event_log_ += 'S';
  const std::vector<double>& best = simplex_[0].u;
  for (std::size_t i = 1; i < simplex_.size(); ++i) {
    for (std::size_t j = 0; j < best.size(); ++j)
      simplex_[i].u[j] = best[j] + params_.coeffs.shrink * (simplex_[i].u[j] - best[j]);
  }
  shrink_next_ = 1;
  phase_ = Phase::shrinking;
}

bool NelderMeadEngine::diameter_below_grid_step() const {
  for (std::size_t j = 0; j < unit_step_.size(); ++j) {
    if (unit_step_[j] <= 0.0) continue;
    double lo = simplex_[0].u[j];
    double hi = lo;
    for (const Vertex& v : simplex_) {
      lo = std::min(lo, v.u[j]);
      hi = std::max(hi, v.u[j]);
    }
    if (hi - lo >= unit_step_[j]) return false;
  }
  return true;
}

}  // namespace gridtune::neldermead

#include <algorithm>
#include <cmath>
#include <string>

#include "gridtune/errors.hpp"
#include "gridtune/harness.hpp"

namespace gridtune::harness {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Standard normal derived from (seed, values, repeat index) alone.
double hashed_normal(std::uint64_t seed, const std::vector<std::int64_t>& values,
                     std::int64_t repeat_index) {
  std::uint64_t h = splitmix64(seed);
  for (std::int64_t v : values) h = splitmix64(h ^ static_cast<std::uint64_t>(v));
  h = splitmix64(h ^ static_cast<std::uint64_t>(repeat_index));
  const std::uint64_t a = splitmix64(h);
  const std::uint64_t b = splitmix64(a);
  double u1 = static_cast<double>(a >> 11) * 0x1.0p-53;
  const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  constexpr double two_pi = 6.283185307179586476925286766559;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

std::size_t param_index(const SearchSpace& space, std::string_view name) {
  for (std::size_t i = 0; i < space.dim(); ++i)
    if (space.params[i].name == name) return i;
  fail(Errc::unbound_parameter,
       "surface needs parameter '" + std::string(name) + "' which the space does not declare");
}

double resnet_like_value(const SearchSpace& space, const Configuration& config) {
  const double inter =
      static_cast<double>(config.values[param_index(space, "inter_op_parallelism_threads")]);
  const double batch = static_cast<double>(config.values[param_index(space, "batch_size")]);
  const double kmp = static_cast<double>(config.values[param_index(space, "KMP_BLOCKTIME")]);
  const double omp = static_cast<double>(config.values[param_index(space, "OMP_NUM_THREADS")]);
  param_index(space, "intra_op_parallelism_threads");  // required but has no effect
  return 100.0 * (omp / (omp + 14.0)) * (1.0 - kmp / 800.0) * (1.0 + batch / 8192.0) *
         (1.0 - 0.01 * (inter - 1.0));
}

const Configuration& effective_target(const SyntheticSpec& spec, const SearchSpace& space,
                                      Configuration& storage) {
  if (spec.target) {
    check_config(space, *spec.target);
    if (spec.target->values.size() != space.dim())
      fail(Errc::dimension_mismatch, "surface target does not match the space");
    return *spec.target;
  }
  storage = default_target(spec.surface, space);
  return storage;
}

double surface_value(const SyntheticSpec& spec, const SearchSpace& space,
                     const Configuration& config) {
  switch (spec.surface) {
    case Surface::resnet_like: return resnet_like_value(space, config);
    case Surface::quadratic: {
      Configuration storage;
      const Configuration& t = effective_target(spec, space, storage);
      double s = 0.0;
      for (std::size_t i = 0; i < config.values.size(); ++i) {
        const double d = static_cast<double>(config.values[i] - t.values[i]);
        s += d * d;
      }
      return s == 0.0 ? 0.0 : -s;  // avoid negative zero at the optimum
    }
    case Surface::separable_sum: {
      double s = 0.0;
      for (std::int64_t v : config.values) s += static_cast<double>(v);
      return s;
    }
    case Surface::plateau: {
      Configuration storage;
      const Configuration& t = effective_target(spec, space, storage);
      const std::vector<double> u = normalize(space, config);
      double level = 0.0;
      for (double ui : u) level += std::min(std::floor(4.0 * ui), 3.0);
      if (config == t) level += 3.0 * static_cast<double>(space.dim()) + 1.0;
      return level;
    }
  }
  fail(Errc::validation_error, "unknown surface");
}

}  // namespace

std::string_view to_string(Aggregation a) {
  switch (a) {
    case Aggregation::median: return "median";
    case Aggregation::mean: return "mean";
    case Aggregation::max: return "max";
  }
  return "median";
}

Aggregation aggregation_from_string(std::string_view text) {
  if (text == "median") return Aggregation::median;
  if (text == "mean") return Aggregation::mean;
  if (text == "max") return Aggregation::max;
  fail(Errc::validation_error, "unknown aggregation '" + std::string(text) + "'");
}

double aggregate(Aggregation how, std::vector<double> repeats) {
  if (repeats.empty()) fail(Errc::validation_error, "aggregation of no repeats");
  switch (how) {
    case Aggregation::median: {
      std::sort(repeats.begin(), repeats.end());
      const std::size_t n = repeats.size();
      return n % 2 == 1 ? repeats[n / 2] : 0.5 * (repeats[n / 2 - 1] + repeats[n / 2]);
    }
    case Aggregation::mean: {
      double s = 0.0;
      for (double r : repeats) s += r;
      return s / static_cast<double>(repeats.size());
    }
    case Aggregation::max: return *std::max_element(repeats.begin(), repeats.end());
  }
  fail(Errc::validation_error, "unknown aggregation");
}

std::string_view to_string(Surface s) {
  switch (s) {
    case Surface::resnet_like: return "resnet-like";
    case Surface::quadratic: return "quadratic";
    case Surface::separable_sum: return "separable-sum";
    case Surface::plateau: return "plateau";
  }
  return "resnet-like";
}

Surface surface_from_string(std::string_view text) {
  if (text == "resnet-like") return Surface::resnet_like;
  if (text == "quadratic") return Surface::quadratic;
  if (text == "separable-sum") return Surface::separable_sum;
  if (text == "plateau") return Surface::plateau;
  fail(Errc::validation_error, "unknown surface '" + std::string(text) + "'");
}

Configuration default_target(Surface surface, const SearchSpace& space) {
  if (surface == Surface::plateau) {
    Configuration corner;
    for (const ParameterSpec& p : space.params) corner.values.push_back(p.max);
    return corner;
  }
  const std::vector<double> mid(space.dim(), 0.5);
  return snap(space, mid);
}

double synthetic_eval(const SyntheticSpec& spec, const SearchSpace& space,
                      const Configuration& config, std::int64_t repeat_index) {
  check_config(space, config);
  double value = surface_value(spec, space, config);
  if (spec.noise_std > 0.0)
    value += spec.noise_std * hashed_normal(spec.noise_seed, config.values, repeat_index);
  return value;
}

SyntheticEvaluator::SyntheticEvaluator(SyntheticSpec spec, SearchSpace space)
    : spec_(std::move(spec)), space_(std::move(space)) {
  validate_space(space_);
  if (spec_.repeats < 1) fail(Errc::validation_error, "repeats must be >= 1");
  if (spec_.noise_std < 0.0) fail(Errc::validation_error, "noise_std must be >= 0");
  // Fail fast on an unusable surface/space pairing.
  Configuration probe;
  for (const ParameterSpec& p : space_.params) probe.values.push_back(p.min);
  synthetic_eval(spec_, space_, probe, 0);
}

Evaluation SyntheticEvaluator::evaluate(const Configuration& config, std::int64_t iteration) {
  Evaluation ev;
  ev.config = config;
  ev.iteration = iteration;
  for (std::int64_t k = 0; k < spec_.repeats; ++k)
    ev.repeats.push_back(synthetic_eval(spec_, space_, config, k));
  ev.value = aggregate(spec_.aggregation, ev.repeats);
  ev.status = EvalStatus::ok;
  ev.wall_time_s = 0.0;  // synthetic runs cost nothing and must stay reproducible
  return ev;
}

}  // namespace gridtune::harness

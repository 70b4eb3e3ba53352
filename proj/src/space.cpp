#include "gridtune/space.hpp"

#include <cmath>
#include <set>

#include "gridtune/errors.hpp"

namespace gridtune {

void validate_space(const SearchSpace& space) {
  if (space.params.empty()) fail(Errc::validation_error, "search space has no parameters");
  std::set<std::string> names;
  for (const ParameterSpec& p : space.params) {
    if (p.name.empty()) fail(Errc::validation_error, "parameter with empty name");
    if (p.step <= 0) fail(Errc::validation_error, "parameter '" + p.name + "': step must be positive");
    if (p.min > p.max)
      fail(Errc::invalid_range, "parameter '" + p.name + "': min " + std::to_string(p.min) +
                                    " > max " + std::to_string(p.max));
    if ((p.max - p.min) % p.step != 0)
      fail(Errc::misaligned_step, "parameter '" + p.name + "': range " +
                                      std::to_string(p.max - p.min) + " not divisible by step " +
                                      std::to_string(p.step));
    if (!names.insert(p.name).second)
      fail(Errc::duplicate_name, "parameter '" + p.name + "' declared twice");
  }
  grid_size(space);  // overflow check
}

std::int64_t grid_size(const SearchSpace& space) {
  std::int64_t total = 1;
  for (const ParameterSpec& p : space.params) {
    if (__builtin_mul_overflow(total, p.point_count(), &total))
      fail(Errc::overflow, "grid size exceeds 64-bit range");
  }
  return total;
}

void check_config(const SearchSpace& space, const Configuration& config) {
  if (config.values.size() != space.dim())
    fail(Errc::dimension_mismatch, "configuration has " + std::to_string(config.values.size()) +
                                       " values, space has " + std::to_string(space.dim()));
  for (std::size_t i = 0; i < space.dim(); ++i) {
    const ParameterSpec& p = space.params[i];
    const std::int64_t v = config.values[i];
    if (v < p.min || v > p.max)
      fail(Errc::off_grid, "parameter '" + p.name + "': value " + std::to_string(v) +
                               " outside [" + std::to_string(p.min) + ", " +
                               std::to_string(p.max) + "]");
    if ((v - p.min) % p.step != 0)
      fail(Errc::off_grid,
           "parameter '" + p.name + "': value " + std::to_string(v) + " not on step grid");
  }
}

std::vector<double> normalize(const SearchSpace& space, const Configuration& config) {
  check_config(space, config);
  std::vector<double> unit(space.dim());
  for (std::size_t i = 0; i < space.dim(); ++i) {
    const ParameterSpec& p = space.params[i];
    unit[i] = p.max > p.min
                  ? static_cast<double>(config.values[i] - p.min) / static_cast<double>(p.max - p.min)
                  : 0.0;
  }
  return unit;
}

Configuration snap(const SearchSpace& space, std::span<const double> unit) {
  if (unit.size() != space.dim())
    fail(Errc::dimension_mismatch, "unit vector has " + std::to_string(unit.size()) +
                                       " components, space has " + std::to_string(space.dim()));
  Configuration config;
  config.values.reserve(space.dim());
  for (std::size_t i = 0; i < space.dim(); ++i) {
    const ParameterSpec& p = space.params[i];
    if (p.max == p.min) {
      config.values.push_back(p.min);
      continue;
    }
    double u = unit[i];
    if (!(u >= 0.0)) u = 0.0;  // also catches NaN
    if (u > 1.0) u = 1.0;
    const double r = static_cast<double>(p.min) + u * static_cast<double>(p.max - p.min);
    const double k = (r - static_cast<double>(p.min)) / static_cast<double>(p.step);
    double lo = std::floor(k);
    // midpoint ties resolve to the lower grid point
    std::int64_t idx = static_cast<std::int64_t>(lo) + ((k - lo) > 0.5 ? 1 : 0);
    const std::int64_t last = p.point_count() - 1;
    if (idx < 0) idx = 0;
    if (idx > last) idx = last;
    config.values.push_back(p.min + idx * p.step);
  }
  return config;
}

Configuration random_config(const SearchSpace& space, Rng& rng) {
  Configuration config;
  config.values.reserve(space.dim());
  for (const ParameterSpec& p : space.params) {
    const std::uint64_t idx = rng.below(static_cast<std::uint64_t>(p.point_count()));
    config.values.push_back(p.min + static_cast<std::int64_t>(idx) * p.step);
  }
  return config;
}

Configuration config_at(const SearchSpace& space, std::int64_t flat_index) {
  const std::int64_t total = grid_size(space);
  if (flat_index < 0 || flat_index >= total)
    fail(Errc::validation_error, "flat index " + std::to_string(flat_index) + " outside grid of " +
                                     std::to_string(total) + " points");
  Configuration config;
  config.values.resize(space.dim());
  for (std::size_t i = space.dim(); i-- > 0;) {
    const ParameterSpec& p = space.params[i];
    const std::int64_t pc = p.point_count();
    config.values[i] = p.min + (flat_index % pc) * p.step;
    flat_index /= pc;
  }
  return config;
}

}  // namespace gridtune

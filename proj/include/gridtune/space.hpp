#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gridtune/rng.hpp"

namespace gridtune {

// How a parameter reaches the workload under test.
enum class Binding { env_var, command_arg, both };

// One tunable integer parameter: the grid {min, min+step, ..., max}.
struct ParameterSpec {
  std::string name;
  std::int64_t min = 0;
  std::int64_t max = 0;
  std::int64_t step = 1;
  Binding binding = Binding::command_arg;

  std::int64_t point_count() const { return (max - min) / step + 1; }
  bool binds_env() const { return binding != Binding::command_arg; }
  bool binds_arg() const { return binding != Binding::env_var; }

  friend bool operator==(const ParameterSpec&, const ParameterSpec&) = default;
};

// The Cartesian product of the parameter grids.
struct SearchSpace {
  std::vector<ParameterSpec> params;

  std::size_t dim() const { return params.size(); }

  friend bool operator==(const SearchSpace&, const SearchSpace&) = default;
};

// One grid point: an integer value per parameter, in declaration order.
// Ordering is lexicographic on the value vector.
struct Configuration {
  std::vector<std::int64_t> values;

  friend auto operator<=>(const Configuration&, const Configuration&) = default;
};

// Throws InvalidRange / MisalignedStep / DuplicateName when a parameter
// violates its invariants.
void validate_space(const SearchSpace& space);

// Total number of grid points; throws Overflow past 64-bit range.
std::int64_t grid_size(const SearchSpace& space);

// Throws DimensionMismatch / OffGrid when config is not a grid point.
void check_config(const SearchSpace& space, const Configuration& config);

// Maps a configuration onto the unit cube: u_i = (v_i - min_i) / (max_i - min_i),
// with u_i = 0 for single-point dimensions.
std::vector<double> normalize(const SearchSpace& space, const Configuration& config);

// Maps a unit-cube point to the nearest grid configuration. Components are
// clamped to [0, 1] first; exact midpoints resolve to the lower grid point.
Configuration snap(const SearchSpace& space, std::span<const double> unit);

// Uniform draw over the grid, each dimension independent.
Configuration random_config(const SearchSpace& space, Rng& rng);

// Grid point at a flat index in lexicographic order of the value vectors
// (first parameter most significant). index must be in [0, grid_size).
Configuration config_at(const SearchSpace& space, std::int64_t flat_index);

}  // namespace gridtune

#include <doctest.h>

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <set>

#include "gridtune/errors.hpp"
#include "gridtune/space.hpp"

using namespace gridtune;

namespace {

SearchSpace single(std::int64_t min, std::int64_t max, std::int64_t step) {
  return SearchSpace{{{"p", min, max, step, Binding::command_arg}}};
}

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const TuneError& e) {
    return e.code();
  }
  FAIL("expected a TuneError");
  return Errc::validation_error;
}

}  // namespace

TEST_CASE("validate_space accepts typical tuning ranges") {
  const SearchSpace intra = single(1, 56, 1);
  validate_space(intra);
  CHECK(intra.params[0].point_count() == 56);

  const SearchSpace kmp = single(0, 200, 10);
  validate_space(kmp);
  CHECK(kmp.params[0].point_count() == 21);
}

TEST_CASE("validate_space rejects bad parameters") {
  CHECK(code_of([] { validate_space(single(5, 3, 1)); }) == Errc::invalid_range);
  CHECK(code_of([] { validate_space(single(0, 200, 13)); }) == Errc::misaligned_step);
  SearchSpace dup = single(0, 4, 1);
  dup.params.push_back(dup.params[0]);
  CHECK(code_of([&] { validate_space(dup); }) == Errc::duplicate_name);
}

TEST_CASE("grid_size") {
  CHECK(grid_size(single(0, 200, 10)) == 21);
  CHECK(grid_size(single(7, 7, 1)) == 1);

  SearchSpace two{{{"a", 1, 4, 1, Binding::command_arg}, {"b", 0, 200, 10, Binding::command_arg}}};
  // brute-force enumeration of the product grid
  std::set<std::pair<std::int64_t, std::int64_t>> points;
  for (std::int64_t a = 1; a <= 4; ++a)
    for (std::int64_t b = 0; b <= 200; b += 10) points.insert({a, b});
  CHECK(grid_size(two) == static_cast<std::int64_t>(points.size()));
  CHECK(grid_size(two) == 84);

  SearchSpace huge{{{"a", 0, std::int64_t(1) << 62, 1, Binding::command_arg},
                    {"b", 0, 1000, 1, Binding::command_arg}}};
  CHECK(code_of([&] { grid_size(huge); }) == Errc::overflow);
}

TEST_CASE("normalize endpoints and midpoints") {
  CHECK(normalize(single(1, 4, 1), Configuration{{1}})[0] == 0.0);
  CHECK(normalize(single(1, 4, 1), Configuration{{4}})[0] == 1.0);
  CHECK(normalize(single(0, 200, 10), Configuration{{100}})[0] == 0.5);
  // single-point dimension maps to 0
  CHECK(normalize(single(7, 7, 1), Configuration{{7}})[0] == 0.0);
}

TEST_CASE("normalize rejects off-grid configurations") {
  CHECK(code_of([] { normalize(single(0, 200, 10), Configuration{{105}}); }) == Errc::off_grid);
  CHECK(code_of([] { normalize(single(0, 200, 10), Configuration{{210}}); }) == Errc::off_grid);
  CHECK(code_of([] { normalize(single(0, 200, 10), Configuration{{0, 0}}); }) ==
        Errc::dimension_mismatch);
}

TEST_CASE("snap hits grid points, ties low, clamps") {
  const double half[] = {0.5};
  CHECK(snap(single(0, 200, 10), half).values[0] == 100);
  CHECK(snap(single(1, 4, 1), half).values[0] == 2);  // r = 2.5 resolves low
  const double over[] = {1.3};
  CHECK(snap(single(1, 56, 1), over).values[0] == 56);
  const double nan_u[] = {std::numeric_limits<double>::quiet_NaN()};
  CHECK(snap(single(1, 56, 1), nan_u).values[0] == 1);
}

TEST_CASE("snap(normalize) round-trips every grid point") {
  const SearchSpace space{{{"a", -6, 6, 3, Binding::command_arg},
                           {"b", 0, 200, 10, Binding::command_arg},
                           {"c", 1, 56, 1, Binding::command_arg}}};
  const std::int64_t total = grid_size(space);
  for (std::int64_t flat = 0; flat < total; ++flat) {
    const Configuration c = config_at(space, flat);
    CHECK(snap(space, normalize(space, c)) == c);
  }
}

TEST_CASE("random_config determinism and degenerate spaces") {
  const SearchSpace space{{{"a", 1, 4, 1, Binding::command_arg},
                           {"b", 0, 200, 10, Binding::command_arg}}};
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(random_config(space, a) == random_config(space, b));

  const SearchSpace unique_point{{{"a", 7, 7, 1, Binding::command_arg},
                                  {"b", 3, 3, 5, Binding::command_arg}}};
  Rng rng(0);
  CHECK(random_config(unique_point, rng) == Configuration{{7, 3}});
}

TEST_CASE("random_config is uniform over the grid") {
  const SearchSpace space = single(1, 4, 1);
  Rng rng(7);
  std::map<std::int64_t, int> counts;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) ++counts[random_config(space, rng).values[0]];
  for (std::int64_t v = 1; v <= 4; ++v) {
    const double freq = counts[v] / double(draws);
    CHECK(std::fabs(freq - 0.25) <= 0.02);
  }
}

TEST_CASE("config_at enumerates lexicographically") {
  const SearchSpace space{{{"a", 0, 2, 1, Binding::command_arg},
                           {"b", 10, 30, 10, Binding::command_arg}}};
  std::vector<Configuration> expected;
  for (std::int64_t a = 0; a <= 2; ++a)
    for (std::int64_t b = 10; b <= 30; b += 10) expected.push_back(Configuration{{a, b}});
  REQUIRE(grid_size(space) == static_cast<std::int64_t>(expected.size()));
  for (std::int64_t flat = 0; flat < grid_size(space); ++flat) {
    CHECK(config_at(space, flat) == expected[static_cast<std::size_t>(flat)]);
    if (flat > 0) CHECK(expected[flat - 1] < expected[flat]);
  }
}

#include <doctest.h>

#include <filesystem>

#include "gridtune/errors.hpp"
#include "gridtune/history.hpp"

using namespace gridtune;

namespace {

Evaluation make_ok(std::vector<std::int64_t> values, double value, std::int64_t iteration) {
  Evaluation e;
  e.config.values = std::move(values);
  e.value = value;
  e.repeats = {value};
  e.status = EvalStatus::ok;
  e.iteration = iteration;
  return e;
}

Evaluation make_failed(std::vector<std::int64_t> values, std::int64_t iteration) {
  Evaluation e;
  e.config.values = std::move(values);
  e.status = EvalStatus::failed;
  e.iteration = iteration;
  return e;
}

}  // namespace

TEST_CASE("record and lookup round-trip") {
  History h;
  const Evaluation e = make_ok({1, 2}, 12.5, 0);
  h.record(e);
  REQUIRE(h.lookup(e.config) != nullptr);
  CHECK(*h.lookup(e.config) == e);
  CHECK(h.lookup(Configuration{{9, 9}}) == nullptr);
}

TEST_CASE("lookup on empty history is absent") {
  const History h;
  CHECK(h.lookup(Configuration{{1}}) == nullptr);
  CHECK(h.best_ok() == nullptr);
}

TEST_CASE("duplicate ok entries are rejected") {
  History h;
  h.record(make_ok({1}, 10.0, 0));
  CHECK_THROWS_WITH_AS(h.record(make_ok({1}, 11.0, 1)), doctest::Contains("DuplicateOk"),
                       TuneError);
}

TEST_CASE("failed entries are not indexed and may be retried") {
  History h;
  h.record(make_failed({1}, 0));
  CHECK(h.lookup(Configuration{{1}}) == nullptr);
  CHECK(h.ok_count() == 0);
  h.record(make_ok({1}, 5.0, 1));  // retry after failure is fine
  CHECK(h.lookup(Configuration{{1}}) != nullptr);
}

TEST_CASE("iteration numbers must strictly increase") {
  History h;
  h.record(make_ok({1}, 1.0, 3));
  CHECK_THROWS_AS(h.record(make_ok({2}, 2.0, 3)), TuneError);
  CHECK_THROWS_AS(h.record(make_ok({3}, 2.0, 1)), TuneError);
}

TEST_CASE("best_ok takes the highest value, earliest on ties") {
  History h;
  h.record(make_ok({1}, 10.0, 0));
  h.record(make_ok({2}, 30.0, 1));
  h.record(make_ok({3}, 30.0, 2));
  h.record(make_failed({4}, 3));
  REQUIRE(h.best_ok() != nullptr);
  CHECK(h.best_ok()->config == Configuration{{2}});
}

TEST_CASE("json line has the fixed field order") {
  Evaluation e = make_ok({1, 28, 64}, 123.45, 7);
  e.repeats = {120.0, 123.45, 130.5};
  e.wall_time_s = 0.25;
  CHECK(to_json_line(e) ==
        R"({"iteration":7,"values":[1,28,64],"value":123.45,"repeats":[120.0,123.45,130.5],)"
        R"("wall_time_s":0.25,"status":"ok"})");

  const Evaluation failed = make_failed({2, 2, 2}, 8);
  CHECK(to_json_line(failed) ==
        R"({"iteration":8,"values":[2,2,2],"value":null,"repeats":[],)"
        R"("wall_time_s":0.0,"status":"failed"})");
}

TEST_CASE("json line round-trips") {
  Evaluation e = make_ok({-3, 0, 1024}, 90.0, 12);
  e.repeats = {90.0, 89.999999999999, 90.1};
  e.wall_time_s = 1.75;
  CHECK(evaluation_from_json_line(to_json_line(e)) == e);

  Evaluation t = make_failed({1}, 2);
  t.status = EvalStatus::timeout;
  t.wall_time_s = 3.5;
  CHECK(evaluation_from_json_line(to_json_line(t)) == t);

  CHECK_THROWS_AS(evaluation_from_json_line("{not json"), TuneError);
  CHECK_THROWS_AS(evaluation_from_json_line(R"({"iteration":0})"), TuneError);
}

TEST_CASE("history file round-trips exactly") {
  History h;
  h.record(make_ok({1, 64}, 10.5, 0));
  h.record(make_failed({2, 128}, 1));
  h.record(make_ok({3, 192}, 11.25, 2));

  const auto path = std::filesystem::temp_directory_path() / "gridtune_history_test.jsonl";
  write_history_jsonl(path, h);
  const History loaded = load_history_jsonl(path);
  CHECK(loaded == h);
  std::filesystem::remove(path);
}

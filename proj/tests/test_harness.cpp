#include <doctest.h>

#include <cmath>
#include <set>

#include "gridtune/errors.hpp"
#include "gridtune/harness.hpp"
#include "gridtune/session.hpp"

using namespace gridtune;
using namespace gridtune::harness;

namespace {

const SearchSpace kPresetSpace{{
    {"inter_op_parallelism_threads", 1, 4, 1, Binding::command_arg},
    {"intra_op_parallelism_threads", 1, 56, 1, Binding::command_arg},
    {"batch_size", 64, 1024, 64, Binding::command_arg},
    {"KMP_BLOCKTIME", 0, 200, 10, Binding::env_var},
    {"OMP_NUM_THREADS", 1, 56, 1, Binding::env_var},
}};

Configuration preset_config(std::int64_t inter, std::int64_t intra, std::int64_t batch,
                            std::int64_t kmp, std::int64_t omp) {
  return Configuration{{inter, intra, batch, kmp, omp}};
}

WorkloadSpec shell_workload(const std::string& script) {
  WorkloadSpec w;
  w.command = {"/bin/sh", "-c", script};
  w.metric_pattern = "Throughput: ([0-9.]+)";
  w.timeout_s = 10.0;
  return w;
}

SearchSpace trivial_space() {
  return SearchSpace{{{"n", 1, 4, 1, Binding::command_arg}}};
}

}  // namespace

TEST_CASE("aggregate") {
  CHECK(aggregate(Aggregation::median, {10.0, 50.0, 12.0}) == 12.0);
  CHECK(aggregate(Aggregation::median, {10.0, 20.0}) == 15.0);
  CHECK(aggregate(Aggregation::mean, {1.0, 2.0, 6.0}) == 3.0);
  CHECK(aggregate(Aggregation::max, {1.0, 9.0, 3.0}) == 9.0);
  CHECK_THROWS_AS(aggregate(Aggregation::median, {}), TuneError);
}

TEST_CASE("render substitutes placeholders") {
  WorkloadSpec w;
  w.command = {"run.sh", "--batch-size", "{batch_size}", "--threads={intra_op_parallelism_threads}",
               "--inter", "{inter_op_parallelism_threads}"};
  w.env = {{"OMP_NUM_THREADS", "{OMP_NUM_THREADS}"}, {"KMP_BLOCKTIME", "{KMP_BLOCKTIME}"}};
  w.metric_pattern = "ips=([0-9.]+)";
  const Configuration c = preset_config(2, 28, 64, 0, 28);
  const RenderedCommand r = render(w, kPresetSpace, c);
  CHECK(r.argv == std::vector<std::string>{"run.sh", "--batch-size", "64", "--threads=28",
                                           "--inter", "2"});
  CHECK(r.env.at("OMP_NUM_THREADS") == "28");
  CHECK(r.env.at("KMP_BLOCKTIME") == "0");
}

TEST_CASE("render rejects unknown placeholders and missing bindings") {
  WorkloadSpec w;
  w.command = {"run.sh", "{foo}"};
  w.metric_pattern = "x=([0-9]+)";
  const SearchSpace space = trivial_space();
  CHECK_THROWS_WITH_AS(render(w, space, Configuration{{1}}), doctest::Contains("UnknownPlaceholder"),
                       TuneError);

  WorkloadSpec missing;
  missing.command = {"run.sh"};  // parameter n binds to the command line but is absent
  missing.metric_pattern = "x=([0-9]+)";
  CHECK_THROWS_WITH_AS(render(missing, space, Configuration{{1}}),
                       doctest::Contains("MissingBinding"), TuneError);
}

TEST_CASE("metric_pattern must have exactly one capture group") {
  WorkloadSpec w;
  w.command = {"run.sh", "{n}"};
  w.metric_pattern = "no capture";
  CHECK_THROWS_WITH_AS(validate_workload(w, trivial_space()), doctest::Contains("BadPattern"),
                       TuneError);
  w.metric_pattern = "(a)(b)";
  CHECK_THROWS_AS(validate_workload(w, trivial_space()), TuneError);
  w.metric_pattern = "([0-9]+";
  CHECK_THROWS_AS(validate_workload(w, trivial_space()), TuneError);
}

TEST_CASE("run_evaluation parses the last metric match") {
  const WorkloadSpec w = shell_workload(
      "echo warmup; echo 'Throughput: 1.5'; echo 'Throughput: 123.45'; echo 'n={n}'");
  const Evaluation e = run_evaluation(w, trivial_space(), Configuration{{2}}, 0);
  CHECK(e.ok());
  CHECK(*e.value == 123.45);
  CHECK(e.repeats == std::vector<double>{123.45});
  CHECK(e.iteration == 0);
  CHECK(e.wall_time_s > 0.0);
}

TEST_CASE("run_evaluation aggregates repeats") {
  WorkloadSpec w = shell_workload("echo \"Throughput: $((10 * {n}))\"");
  w.repeats = 3;
  const Evaluation e = run_evaluation(w, trivial_space(), Configuration{{3}}, 1);
  REQUIRE(e.ok());
  CHECK(e.repeats == std::vector<double>{30.0, 30.0, 30.0});
  CHECK(*e.value == 30.0);
}

TEST_CASE("environment bindings reach the child process") {
  SearchSpace space{{{"OMP_NUM_THREADS", 1, 56, 1, Binding::env_var}}};
  WorkloadSpec w;
  w.command = {"/bin/sh", "-c", "echo \"Throughput: $OMP_NUM_THREADS\""};
  w.env = {{"OMP_NUM_THREADS", "{OMP_NUM_THREADS}"}};
  w.metric_pattern = "Throughput: ([0-9.]+)";
  w.timeout_s = 10.0;
  const Evaluation e = run_evaluation(w, space, Configuration{{28}}, 0);
  REQUIRE(e.ok());
  CHECK(*e.value == 28.0);
}

TEST_CASE("missing metric, nonzero exit, and timeout statuses") {
  const SearchSpace space = trivial_space();

  const Evaluation no_match =
      run_evaluation(shell_workload("echo 'no metric here {n}'"), space, Configuration{{1}}, 0);
  CHECK(no_match.status == EvalStatus::failed);
  CHECK(!no_match.value.has_value());

  const Evaluation bad_exit = run_evaluation(
      shell_workload("echo 'Throughput: 5 {n}'; exit 3"), space, Configuration{{1}}, 0);
  CHECK(bad_exit.status == EvalStatus::failed);

  WorkloadSpec slow = shell_workload("echo start {n}; sleep 30");
  slow.timeout_s = 0.3;
  const Evaluation timed_out = run_evaluation(slow, space, Configuration{{1}}, 0);
  CHECK(timed_out.status == EvalStatus::timeout);
  CHECK(timed_out.wall_time_s < 5.0);

  const Evaluation spawn_failed = run_evaluation(
      WorkloadSpec{{"/nonexistent/binary/path", "{n}"}, {}, "x=([0-9]+)", 1, Aggregation::median,
                   5.0, ""},
      space, Configuration{{1}}, 0);
  CHECK(spawn_failed.status == EvalStatus::failed);
}

TEST_CASE("resnet-like closed form") {
  SyntheticSpec spec;
  spec.surface = Surface::resnet_like;
  CHECK(synthetic_eval(spec, kPresetSpace, preset_config(1, 28, 1024, 0, 56), 0) == 90.0);
  CHECK(synthetic_eval(spec, kPresetSpace, preset_config(4, 28, 64, 200, 14), 0) ==
        doctest::Approx(36.6591796875).epsilon(1e-12));
}

TEST_CASE("resnet-like ignores intra-op parallelism") {
  SyntheticSpec spec;
  spec.surface = Surface::resnet_like;
  const double a = synthetic_eval(spec, kPresetSpace, preset_config(2, 1, 512, 50, 30), 0);
  const double b = synthetic_eval(spec, kPresetSpace, preset_config(2, 56, 512, 50, 30), 0);
  CHECK(a == b);
}

TEST_CASE("resnet-like monotonicity over the preset ranges") {
  SyntheticSpec spec;
  spec.surface = Surface::resnet_like;
  double prev = -1.0;
  for (std::int64_t omp = 1; omp <= 56; ++omp) {
    const double v = synthetic_eval(spec, kPresetSpace, preset_config(2, 28, 512, 100, omp), 0);
    CHECK(v > prev);
    prev = v;
  }
  prev = 1e300;
  for (std::int64_t kmp = 0; kmp <= 200; kmp += 10) {
    const double v = synthetic_eval(spec, kPresetSpace, preset_config(2, 28, 512, kmp, 40), 0);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("resnet-like maximizer over the preset grid") {
  SyntheticSpec spec;
  spec.surface = Surface::resnet_like;
  // exhaustive sweep restricted to one intra value
  const SearchSpace restricted{{
      {"inter_op_parallelism_threads", 1, 4, 1, Binding::command_arg},
      {"intra_op_parallelism_threads", 28, 28, 1, Binding::command_arg},
      {"batch_size", 64, 1024, 64, Binding::command_arg},
      {"KMP_BLOCKTIME", 0, 200, 10, Binding::env_var},
      {"OMP_NUM_THREADS", 1, 56, 1, Binding::env_var},
  }};
  Configuration best;
  double best_v = -1e300;
  for (std::int64_t flat = 0; flat < grid_size(restricted); ++flat) {
    const Configuration c = config_at(restricted, flat);
    const double v = synthetic_eval(spec, restricted, c, 0);
    if (v > best_v) {
      best_v = v;
      best = c;
    }
  }
  CHECK(best == preset_config(1, 28, 1024, 0, 56));
  CHECK(best_v == 90.0);
}

TEST_CASE("resnet-like requires its five parameters") {
  SyntheticSpec spec;
  spec.surface = Surface::resnet_like;
  const SearchSpace wrong{{{"x", 0, 5, 1, Binding::command_arg}}};
  CHECK_THROWS_WITH_AS(synthetic_eval(spec, wrong, Configuration{{3}}, 0),
                       doctest::Contains("UnboundParameter"), TuneError);
}

TEST_CASE("noise is deterministic in (seed, config, repeat)") {
  SyntheticSpec spec;
  spec.surface = Surface::separable_sum;
  spec.noise_std = 0.5;
  spec.noise_seed = 99;
  const SearchSpace space{{{"x", 0, 9, 1, Binding::command_arg}}};
  const Configuration c{{4}};
  const double a = synthetic_eval(spec, space, c, 0);
  CHECK(a == synthetic_eval(spec, space, c, 0));
  CHECK(a != synthetic_eval(spec, space, c, 1));
  spec.noise_seed = 100;
  CHECK(a != synthetic_eval(spec, space, c, 0));
}

TEST_CASE("quadratic and separable-sum surfaces") {
  SyntheticSpec quad;
  quad.surface = Surface::quadratic;
  quad.target = Configuration{{3, 7}};
  const SearchSpace space{{{"x", 0, 9, 1, Binding::command_arg},
                           {"y", 0, 9, 1, Binding::command_arg}}};
  CHECK(synthetic_eval(quad, space, Configuration{{3, 7}}, 0) == 0.0);
  CHECK(synthetic_eval(quad, space, Configuration{{0, 0}}, 0) == -58.0);

  SyntheticSpec sum;
  sum.surface = Surface::separable_sum;
  CHECK(synthetic_eval(sum, space, Configuration{{4, 5}}, 0) == 9.0);
}

TEST_CASE("plateau has a single strict maximum cell") {
  SyntheticSpec spec;
  spec.surface = Surface::plateau;
  const SearchSpace space{{{"x", 0, 15, 1, Binding::command_arg},
                           {"y", 0, 15, 1, Binding::command_arg}}};
  const Configuration target = default_target(Surface::plateau, space);
  CHECK(target == Configuration{{15, 15}});
  const double top = synthetic_eval(spec, space, target, 0);
  int strictly_below = 0;
  for (std::int64_t flat = 0; flat < grid_size(space); ++flat) {
    const Configuration c = config_at(space, flat);
    if (c == target) continue;
    CHECK(synthetic_eval(spec, space, c, 0) < top);
    ++strictly_below;
  }
  CHECK(strictly_below == 255);
}

TEST_CASE("synthetic evaluator aggregates noisy repeats deterministically") {
  SyntheticSpec spec;
  spec.surface = Surface::separable_sum;
  spec.noise_std = 1.0;
  spec.repeats = 5;
  const SearchSpace space{{{"x", 0, 9, 1, Binding::command_arg}}};
  SyntheticEvaluator a(spec, space), b(spec, space);
  const Evaluation ea = a.evaluate(Configuration{{4}}, 0);
  const Evaluation eb = b.evaluate(Configuration{{4}}, 0);
  CHECK(ea == eb);
  CHECK(ea.repeats.size() == 5);
  CHECK(*ea.value == aggregate(Aggregation::median, ea.repeats));
  CHECK(ea.wall_time_s == 0.0);
}

TEST_CASE("evaluate_with_cache serves prior ok results and retries failures") {
  struct CountingEvaluator final : Evaluator {
    int calls = 0;
    bool fail_first = false;
    Evaluation evaluate(const Configuration& config, std::int64_t iteration) override {
      ++calls;
      Evaluation e;
      e.config = config;
      e.iteration = iteration;
      if (fail_first && calls == 1) {
        e.status = EvalStatus::failed;
      } else {
        e.status = EvalStatus::ok;
        e.value = 7.0;
        e.repeats = {7.0};
      }
      return e;
    }
  };

  SUBCASE("second request is served from cache") {
    CountingEvaluator ev;
    History h;
    const Configuration c{{1}};
    bool hit = true;
    evaluate_with_cache(h, c, ev, &hit);
    CHECK(!hit);
    CHECK(ev.calls == 1);
    evaluate_with_cache(h, c, ev, &hit);
    CHECK(hit);
    CHECK(ev.calls == 1);
    CHECK(h.size() == 1);
  }

  SUBCASE("failures are not cached") {
    CountingEvaluator ev;
    ev.fail_first = true;
    History h;
    const Configuration c{{1}};
    evaluate_with_cache(h, c, ev);
    CHECK(h.ok_count() == 0);
    evaluate_with_cache(h, c, ev);
    CHECK(ev.calls == 2);
    CHECK(h.ok_count() == 1);
  }
}

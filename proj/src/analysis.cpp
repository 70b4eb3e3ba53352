#include "gridtune/analysis.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <set>

#include <json.hpp>

#include "gridtune/errors.hpp"

namespace gridtune::analysis {

namespace {

std::string fmt_double(double v) {
  char buf[32];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

void require_ok_entries(const History& history) {
  if (history.ok_count() == 0) fail(Errc::empty_history, "history has no ok evaluation");
}

}  // namespace

std::vector<CoverageRow> coverage(const History& history, const SearchSpace& space) {
  require_ok_entries(history);
  std::vector<CoverageRow> rows;
  rows.reserve(space.dim());
  for (std::size_t i = 0; i < space.dim(); ++i) {
    const ParameterSpec& p = space.params[i];
    CoverageRow row;
    row.param = p.name;
    row.tunable_min = p.min;
    row.tunable_max = p.max;
    bool first = true;
    std::set<std::int64_t> distinct;
    for (const Evaluation& e : history.entries()) {
      if (!e.ok()) continue;
      const std::int64_t v = e.config.values[i];
      if (first || v < row.sampled_min) row.sampled_min = v;
      if (first || v > row.sampled_max) row.sampled_max = v;
      first = false;
      distinct.insert(v);
    }
    const std::int64_t tunable_span = p.max - p.min;
    row.span_pct = tunable_span > 0
                       ? static_cast<int>(100 * (row.sampled_max - row.sampled_min) / tunable_span)
                       : 100;
    row.point_pct =
        static_cast<int>(100 * static_cast<std::int64_t>(distinct.size()) / p.point_count());
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::pair<std::int64_t, double>> best_so_far(const History& history) {
  require_ok_entries(history);
  std::vector<std::pair<std::int64_t, double>> trajectory;
  double best = 0.0;
  bool first = true;
  for (const Evaluation& e : history.entries()) {
    if (!e.ok()) continue;
    if (first || *e.value > best) best = *e.value;
    first = false;
    trajectory.emplace_back(e.iteration, best);
  }
  return trajectory;
}

std::vector<PairplotRow> pairplot_export(const History& history, const SearchSpace& space) {
  require_ok_entries(history);
  std::vector<PairplotRow> rows;
  for (const Evaluation& e : history.entries()) {
    if (!e.ok()) continue;
    for (std::size_t a = 0; a < space.dim(); ++a) {
      for (std::size_t b = a + 1; b < space.dim(); ++b) {
        rows.push_back(PairplotRow{space.params[a].name, e.config.values[a],
                                   space.params[b].name, e.config.values[b], *e.value});
      }
    }
  }
  return rows;
}

SweepResult exhaustive_sweep(const SearchSpace& space, Evaluator& evaluator, std::int64_t limit) {
  validate_space(space);
  const std::int64_t total = grid_size(space);
  if (total > limit)
    fail(Errc::grid_too_large, "grid of " + std::to_string(total) + " points exceeds limit " +
                                   std::to_string(limit));
  SweepResult result;
  double best_value = 0.0;
  for (std::int64_t flat = 0; flat < total; ++flat) {
    const Configuration config = config_at(space, flat);
    Evaluation ev = evaluator.evaluate(config, flat);
    const bool better = ev.ok() && (!result.best || *ev.value > best_value);
    if (better) {
      result.best = config;
      best_value = *ev.value;
    }
    result.history.record(std::move(ev));
  }
  return result;
}

TuningReport make_report(const History& history, const SearchSpace& space, std::string engine,
                         std::uint64_t seed) {
  require_ok_entries(history);
  TuningReport report;
  report.engine = std::move(engine);
  report.seed = seed;
  report.trajectory = best_so_far(history);
  report.coverage = coverage(history, space);
  report.best_value = report.trajectory.back().second;
  report.best_config = history.best_ok()->config;
  report.total_evaluations = static_cast<std::int64_t>(history.size());
  for (const Evaluation& e : history.entries()) report.total_wall_time_s += e.wall_time_s;
  return report;
}

std::vector<CompareRow> compare(const std::vector<std::pair<std::string, const History*>>& runs,
                                const SearchSpace& space) {
  std::vector<CompareRow> rows;
  rows.reserve(runs.size());
  for (const auto& [name, history] : runs) {
    require_ok_entries(*history);
    CompareRow row;
    row.name = name;
    row.best_value = *history->best_ok()->value;
    const double threshold = row.best_value - 0.01 * std::fabs(row.best_value);
    for (const Evaluation& e : history->entries()) {
      if (!e.ok() || *e.value < threshold) continue;
      row.iterations_to_best = e.iteration + 1;
      break;
    }
    double span_sum = 0.0;
    const std::vector<CoverageRow> cov = coverage(*history, space);
    for (const CoverageRow& c : cov) span_sum += c.span_pct;
    row.mean_span_pct = span_sum / static_cast<double>(cov.size());
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_coverage_csv(std::ostream& out, const std::vector<CoverageRow>& rows) {
  out << "param,sampled_min,sampled_max,tunable_min,tunable_max,span_pct,point_pct\n";
  for (const CoverageRow& r : rows)
    out << r.param << ',' << r.sampled_min << ',' << r.sampled_max << ',' << r.tunable_min << ','
        << r.tunable_max << ',' << r.span_pct << ',' << r.point_pct << '\n';
}

void write_trajectory_csv(std::ostream& out,
                          const std::vector<std::pair<std::int64_t, double>>& trajectory) {
  out << "iteration,best_so_far\n";
  for (const auto& [iteration, best] : trajectory)
    out << iteration << ',' << fmt_double(best) << '\n';
}

void write_pairplot_csv(std::ostream& out, const std::vector<PairplotRow>& rows) {
  out << "param_a,value_a,param_b,value_b,metric\n";
  for (const PairplotRow& r : rows)
    out << r.param_a << ',' << r.value_a << ',' << r.param_b << ',' << r.value_b << ','
        << fmt_double(r.metric) << '\n';
}

void write_compare_csv(std::ostream& out, const std::vector<CompareRow>& rows) {
  out << "engine,best_value,iterations_to_best,mean_span_pct\n";
  for (const CompareRow& r : rows)
    out << r.name << ',' << fmt_double(r.best_value) << ',' << r.iterations_to_best << ','
        << fmt_double(r.mean_span_pct) << '\n';
}

std::string report_to_json(const TuningReport& report) {
  nlohmann::ordered_json j;
  j["engine"] = report.engine;
  j["seed"] = report.seed;
  j["best_config"] = report.best_config.values;
  j["best_value"] = report.best_value;
  j["total_evaluations"] = report.total_evaluations;
  j["total_wall_time_s"] = report.total_wall_time_s;
  nlohmann::ordered_json trajectory = nlohmann::ordered_json::array();
  for (const auto& [iteration, best] : report.trajectory)
    trajectory.push_back(nlohmann::ordered_json::array({iteration, best}));
  j["trajectory"] = std::move(trajectory);
  nlohmann::ordered_json cov = nlohmann::ordered_json::array();
  for (const CoverageRow& r : report.coverage) {
    nlohmann::ordered_json row;
    row["param"] = r.param;
    row["sampled_min"] = r.sampled_min;
    row["sampled_max"] = r.sampled_max;
    row["tunable_min"] = r.tunable_min;
    row["tunable_max"] = r.tunable_max;
    row["span_pct"] = r.span_pct;
    row["point_pct"] = r.point_pct;
    cov.push_back(std::move(row));
  }
  j["coverage"] = std::move(cov);
  return j.dump(2) + "\n";
}

}  // namespace gridtune::analysis

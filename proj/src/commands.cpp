#include "gridtune/commands.hpp"

#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "gridtune/analysis.hpp"
#include "gridtune/errors.hpp"

namespace gridtune::cli {

namespace {

namespace fs = std::filesystem;

void write_file_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) fail(Errc::io_error, "cannot write '" + tmp.string() + "'");
    out << content;
  }
  fs::rename(tmp, path);
}

template <typename WriteFn>
std::string render_csv(WriteFn&& write) {
  std::ostringstream buffer;
  write(buffer);
  return buffer.str();
}

void print_summary(std::ostream& out, const analysis::TuningReport& report,
                   const SearchSpace& space) {
  out << "engine " << report.engine << ", seed " << report.seed << ", evaluations "
      << report.total_evaluations << "\n";
  out << "best value " << report.best_value << " at";
  for (std::size_t i = 0; i < space.dim(); ++i)
    out << ' ' << space.params[i].name << '=' << report.best_config.values[i];
  out << "\n";
  out << "coverage (span%):";
  for (const analysis::CoverageRow& r : report.coverage)
    out << ' ' << r.param << '=' << r.span_pct;
  out << "\n";
}

void write_report_artifacts(const fs::path& dir, const analysis::TuningReport& report,
                            const History& history, const SearchSpace& space,
                            bool with_pairplot) {
  write_file_atomic(dir / "report.json", analysis::report_to_json(report));
  write_file_atomic(dir / "coverage.csv",
                    render_csv([&](std::ostream& o) { analysis::write_coverage_csv(o, report.coverage); }));
  write_file_atomic(dir / "trajectory.csv", render_csv([&](std::ostream& o) {
                      analysis::write_trajectory_csv(o, report.trajectory);
                    }));
  if (with_pairplot)
    write_file_atomic(dir / "pairplot.csv", render_csv([&](std::ostream& o) {
                        analysis::write_pairplot_csv(o, analysis::pairplot_export(history, space));
                      }));
}

}  // namespace

int cmd_tune(const StudyConfig& study, const TuneOverrides& overrides, std::ostream& out) {
  if (study.engine.kind == EngineKind::exhaustive)
    fail(Errc::validation_error, "engine 'exhaustive' runs through the sweep command");

  const std::uint64_t seed = overrides.seed.value_or(study.seed);
  const fs::path dir = overrides.output_dir.value_or(study.output_dir);
  fs::create_directories(dir);

  const std::unique_ptr<Engine> engine = make_engine(study.engine);
  const std::unique_ptr<Evaluator> evaluator = make_evaluator(study);
  Rng rng(seed);
  TuningSession session(*engine, study.space, *evaluator, rng, study.max_iterations);

  // Streamed so a crashed run still leaves its evaluations behind.
  std::ofstream history_stream(dir / "history.jsonl", std::ios::trunc);
  if (!history_stream)
    fail(Errc::io_error, "cannot write '" + (dir / "history.jsonl").string() + "'");
  session.run([&](const Evaluation& ev) {
    history_stream << to_json_line(ev) << '\n';
    history_stream.flush();
  });

  const History& history = session.history();
  if (history.ok_count() == 0) {
    out << "no successful evaluation in " << history.size() << " attempts\n";
    return kExitNoOkEvaluations;
  }

  const analysis::TuningReport report =
      analysis::make_report(history, study.space, std::string(engine->name()), seed);
  write_report_artifacts(dir, report, history, study.space, /*with_pairplot=*/true);
  print_summary(out, report, study.space);
  out << "artifacts in " << dir.string() << "\n";
  return kExitOk;
}

int cmd_sweep(const StudyConfig& study, std::int64_t limit, const TuneOverrides& overrides,
              std::ostream& out) {
  if (study.engine.kind != EngineKind::exhaustive)
    fail(Errc::validation_error, "sweep requires engine 'exhaustive'");

  const fs::path dir = overrides.output_dir.value_or(study.output_dir);
  fs::create_directories(dir);

  const std::unique_ptr<Evaluator> evaluator = make_evaluator(study);
  const analysis::SweepResult result = analysis::exhaustive_sweep(study.space, *evaluator, limit);

  write_history_jsonl(dir / "history.jsonl", result.history);
  if (!result.best) {
    out << "no successful evaluation across the grid\n";
    return kExitNoOkEvaluations;
  }
  const analysis::TuningReport report =
      analysis::make_report(result.history, study.space, "exhaustive", study.seed);
  write_file_atomic(dir / "report.json", analysis::report_to_json(report));
  print_summary(out, report, study.space);
  out << "artifacts in " << dir.string() << "\n";
  return kExitOk;
}

int cmd_report(const SearchSpace& space, const std::vector<std::filesystem::path>& history_files,
               const std::filesystem::path& output_dir, std::ostream& out) {
  if (history_files.empty()) fail(Errc::validation_error, "report needs at least one history");
  fs::create_directories(output_dir);

  std::vector<History> histories;
  std::vector<std::pair<std::string, const History*>> runs;
  histories.reserve(history_files.size());
  for (const fs::path& file : history_files) histories.push_back(load_history_jsonl(file));
  std::set<std::string> used_names;
  for (std::size_t i = 0; i < histories.size(); ++i) {
    std::string name = history_files[i].stem().string();
    for (int suffix = 2; !used_names.insert(name).second; ++suffix)
      name = history_files[i].stem().string() + "_" + std::to_string(suffix);
    runs.emplace_back(std::move(name), &histories[i]);
  }

  const std::vector<analysis::CompareRow> table = analysis::compare(runs, space);
  const std::string compare_csv =
      render_csv([&](std::ostream& o) { analysis::write_compare_csv(o, table); });
  out << compare_csv;
  write_file_atomic(output_dir / "compare.csv", compare_csv);

  for (const auto& [name, history] : runs) {
    const std::string csv = render_csv(
        [&](std::ostream& o) { analysis::write_coverage_csv(o, analysis::coverage(*history, space)); });
    out << "\ncoverage " << name << "\n" << csv;
    write_file_atomic(output_dir / (name + "_coverage.csv"), csv);
  }
  return kExitOk;
}

int cmd_demo(const std::string& surface, const std::string& engine, std::uint64_t seed,
             std::ostream& out) {
  StudyConfig study;
  study.name = "demo-" + surface;
  harness::SyntheticSpec synthetic;
  synthetic.surface = harness::surface_from_string(surface);

  switch (synthetic.surface) {
    case harness::Surface::resnet_like:
      study.space.params = {
          {"inter_op_parallelism_threads", 1, 4, 1, Binding::command_arg},
          {"intra_op_parallelism_threads", 1, 56, 1, Binding::command_arg},
          {"batch_size", 64, 1024, 64, Binding::command_arg},
          {"KMP_BLOCKTIME", 0, 200, 10, Binding::env_var},
          {"OMP_NUM_THREADS", 1, 56, 1, Binding::env_var},
      };
      break;
    case harness::Surface::quadratic:
      study.space.params = {{"x", 0, 20, 1, Binding::command_arg},
                            {"y", 0, 20, 1, Binding::command_arg}};
      synthetic.target = Configuration{{14, 6}};
      break;
    case harness::Surface::separable_sum:
      study.space.params = {{"a", 0, 9, 1, Binding::command_arg},
                            {"b", 0, 9, 1, Binding::command_arg},
                            {"c", 0, 9, 1, Binding::command_arg}};
      break;
    case harness::Surface::plateau:
      study.space.params = {{"x", 0, 15, 1, Binding::command_arg},
                            {"y", 0, 15, 1, Binding::command_arg}};
      break;
  }
  study.synthetic = synthetic;
  study.engine.kind = engine_kind_from_string(engine);
  study.seed = seed;

  const std::unique_ptr<Engine> eng = make_engine(study.engine);
  const std::unique_ptr<Evaluator> evaluator = make_evaluator(study);
  Rng rng(seed);
  TuningSession session(*eng, study.space, *evaluator, rng, study.max_iterations);
  session.run();

  const analysis::TuningReport report =
      analysis::make_report(session.history(), study.space, std::string(eng->name()), seed);
  out << "demo surface " << surface << "\n";
  print_summary(out, report, study.space);
  return kExitOk;
}

}  // namespace gridtune::cli

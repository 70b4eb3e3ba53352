#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gridtune/commands.hpp"
#include "gridtune/errors.hpp"

int main(int argc, char** argv) {
  using namespace gridtune;

  CLI::App app{"Gradient-free black-box autotuner over integer parameter grids"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;

  CLI::App* tune = app.add_subcommand("tune", "Run a tuning session from a study file");
  tune->add_option("--config", config_path, "Study file (JSON)")->required();
  CLI::Option* tune_out = tune->add_option("--out", out_dir, "Output directory override");
  CLI::Option* tune_seed = tune->add_option("--seed", seed, "Seed override");

  std::int64_t limit = 100000;
  CLI::App* sweep = app.add_subcommand("sweep", "Evaluate every grid point of a study");
  sweep->add_option("--config", config_path, "Study file (JSON, engine 'exhaustive')")->required();
  sweep->add_option("--limit", limit, "Largest grid the sweep will accept");
  CLI::Option* sweep_out = sweep->add_option("--out", out_dir, "Output directory override");

  std::string space_path;
  std::vector<std::string> history_paths;
  std::string report_out = ".";
  CLI::App* report = app.add_subcommand("report", "Compare saved tuning histories");
  report->add_option("--space", space_path, "Space file or study file")->required();
  report->add_option("--history", history_paths, "History files (JSON lines)")
      ->required()
      ->expected(-1);
  report->add_option("--out", report_out, "Directory for the CSV exports");

  std::string surface = "resnet-like";
  std::string engine = "bo";
  CLI::App* demo = app.add_subcommand("demo", "Tune a built-in synthetic surface");
  demo->add_option("--surface", surface, "resnet-like, quadratic, separable-sum, plateau");
  demo->add_option("--engine", engine, "bo, ga, nms, random");
  demo->add_option("--seed", seed, "Seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (tune->parsed()) {
      cli::TuneOverrides overrides;
      if (*tune_out) overrides.output_dir = out_dir;
      if (*tune_seed) overrides.seed = seed;
      return cli::cmd_tune(cli::parse_study(config_path), overrides, std::cout);
    }
    if (sweep->parsed()) {
      cli::TuneOverrides overrides;
      if (*sweep_out) overrides.output_dir = out_dir;
      return cli::cmd_sweep(cli::parse_study(config_path), limit, overrides, std::cout);
    }
    if (report->parsed()) {
      std::vector<std::filesystem::path> files(history_paths.begin(), history_paths.end());
      return cli::cmd_report(cli::parse_space_file(space_path), files, report_out, std::cout);
    }
    if (demo->parsed()) return cli::cmd_demo(surface, engine, seed, std::cout);
  } catch (const TuneError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitConfigError;
  }
  return cli::kExitConfigError;
}

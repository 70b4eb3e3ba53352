#include "gridtune/study.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gridtune/errors.hpp"

namespace gridtune::cli {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key))
      fail(Errc::validation_error, "unknown key '" + key + "' in " + where);
}

const json& require_key(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(Errc::validation_error, "missing '" + std::string(key) + "' in " + where);
  return *it;
}

std::int64_t get_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(Errc::validation_error, where + " must be an integer");
  return j.get<std::int64_t>();
}

double get_real(const json& j, const std::string& where) {
  if (!j.is_number()) fail(Errc::validation_error, where + " must be a number");
  return j.get<double>();
}

std::string get_string(const json& j, const std::string& where) {
  if (!j.is_string()) fail(Errc::validation_error, where + " must be a string");
  return j.get<std::string>();
}

Binding binding_from_string(const std::string& text, const std::string& where) {
  if (text == "env-var") return Binding::env_var;
  if (text == "command-arg") return Binding::command_arg;
  if (text == "both") return Binding::both;
  fail(Errc::validation_error, where + ": unknown binding '" + text + "'");
}

std::string binding_to_string(Binding b) {
  switch (b) {
    case Binding::env_var: return "env-var";
    case Binding::command_arg: return "command-arg";
    case Binding::both: return "both";
  }
  return "command-arg";
}

SearchSpace parse_space(const json& j) {
  if (!j.is_array() || j.empty())
    fail(Errc::validation_error, "'space' must be a nonempty array of parameters");
  SearchSpace space;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const json& pj = j[i];
    const std::string where = "space[" + std::to_string(i) + "]";
    if (!pj.is_object()) fail(Errc::validation_error, where + " must be an object");
    reject_unknown_keys(pj, {"name", "min", "max", "step", "binding"}, where);
    ParameterSpec p;
    p.name = get_string(require_key(pj, "name", where), where + ".name");
    p.min = get_int(require_key(pj, "min", where), where + ".min");
    p.max = get_int(require_key(pj, "max", where), where + ".max");
    p.step = get_int(require_key(pj, "step", where), where + ".step");
    if (pj.contains("binding"))
      p.binding = binding_from_string(get_string(pj["binding"], where + ".binding"),
                                      where + ".binding");
    space.params.push_back(std::move(p));
  }
  validate_space(space);
  return space;
}

harness::WorkloadSpec parse_workload(const json& j) {
  if (!j.is_object()) fail(Errc::validation_error, "'workload' must be an object");
  reject_unknown_keys(
      j, {"command", "env", "metric_pattern", "repeats", "aggregation", "timeout_s", "working_dir"},
      "workload");
  harness::WorkloadSpec w;
  const json& cmd = require_key(j, "command", "workload");
  if (!cmd.is_array() || cmd.empty())
    fail(Errc::validation_error, "workload.command must be a nonempty array of strings");
  for (const json& t : cmd) w.command.push_back(get_string(t, "workload.command entry"));
  if (j.contains("env")) {
    if (!j["env"].is_object()) fail(Errc::validation_error, "workload.env must be an object");
    for (const auto& [key, value] : j["env"].items())
      w.env[key] = get_string(value, "workload.env." + key);
  }
  w.metric_pattern = get_string(require_key(j, "metric_pattern", "workload"),
                                "workload.metric_pattern");
  if (j.contains("repeats")) w.repeats = get_int(j["repeats"], "workload.repeats");
  if (j.contains("aggregation"))
    w.aggregation = harness::aggregation_from_string(
        get_string(j["aggregation"], "workload.aggregation"));
  if (j.contains("timeout_s")) w.timeout_s = get_real(j["timeout_s"], "workload.timeout_s");
  if (j.contains("working_dir")) w.working_dir = get_string(j["working_dir"], "workload.working_dir");
  return w;
}

harness::SyntheticSpec parse_synthetic(const json& j) {
  if (!j.is_object()) fail(Errc::validation_error, "'synthetic' must be an object");
  reject_unknown_keys(j, {"surface", "noise_std", "noise_seed", "repeats", "aggregation", "target"},
                      "synthetic");
  harness::SyntheticSpec s;
  s.surface = harness::surface_from_string(
      get_string(require_key(j, "surface", "synthetic"), "synthetic.surface"));
  if (j.contains("noise_std")) s.noise_std = get_real(j["noise_std"], "synthetic.noise_std");
  if (j.contains("noise_seed"))
    s.noise_seed = static_cast<std::uint64_t>(get_int(j["noise_seed"], "synthetic.noise_seed"));
  if (j.contains("repeats")) s.repeats = get_int(j["repeats"], "synthetic.repeats");
  if (j.contains("aggregation"))
    s.aggregation = harness::aggregation_from_string(
        get_string(j["aggregation"], "synthetic.aggregation"));
  if (j.contains("target")) {
    if (!j["target"].is_array()) fail(Errc::validation_error, "synthetic.target must be an array");
    Configuration t;
    for (const json& v : j["target"]) t.values.push_back(get_int(v, "synthetic.target entry"));
    s.target = std::move(t);
  }
  return s;
}

EngineConfig parse_engine(const json& j) {
  EngineConfig engine;
  if (j.is_string()) {
    engine.kind = engine_kind_from_string(j.get<std::string>());
    return engine;
  }
  if (!j.is_object()) fail(Errc::validation_error, "'engine' must be a string or an object");
  engine.kind = engine_kind_from_string(
      get_string(require_key(j, "name", "engine"), "engine.name"));
  switch (engine.kind) {
    case EngineKind::bo:
      reject_unknown_keys(
          j, {"name", "alpha", "epsilon", "init_budget", "candidate_budget", "refit_period"},
          "engine");
      if (j.contains("alpha")) engine.bo.alpha = get_real(j["alpha"], "engine.alpha");
      if (j.contains("epsilon")) engine.bo.epsilon = get_real(j["epsilon"], "engine.epsilon");
      if (j.contains("init_budget"))
        engine.bo.init_budget = get_int(j["init_budget"], "engine.init_budget");
      if (j.contains("candidate_budget"))
        engine.bo.candidate_budget = get_int(j["candidate_budget"], "engine.candidate_budget");
      if (j.contains("refit_period"))
        engine.bo.refit_period = get_int(j["refit_period"], "engine.refit_period");
      break;
    case EngineKind::ga:
      reject_unknown_keys(j, {"name", "mutation_rate", "seed_pool", "max_retries"}, "engine");
      if (j.contains("mutation_rate"))
        engine.ga.mutation_rate = get_real(j["mutation_rate"], "engine.mutation_rate");
      if (j.contains("seed_pool")) engine.ga.seed_pool = get_int(j["seed_pool"], "engine.seed_pool");
      if (j.contains("max_retries"))
        engine.ga.max_retries = get_int(j["max_retries"], "engine.max_retries");
      break;
    case EngineKind::nms:
      reject_unknown_keys(j, {"name", "reflect", "expand", "contract", "shrink", "restart_on_stall"},
                          "engine");
      if (j.contains("reflect")) engine.nms.coeffs.reflect = get_real(j["reflect"], "engine.reflect");
      if (j.contains("expand")) engine.nms.coeffs.expand = get_real(j["expand"], "engine.expand");
      if (j.contains("contract"))
        engine.nms.coeffs.contract = get_real(j["contract"], "engine.contract");
      if (j.contains("shrink")) engine.nms.coeffs.shrink = get_real(j["shrink"], "engine.shrink");
      if (j.contains("restart_on_stall")) {
        if (!j["restart_on_stall"].is_boolean())
          fail(Errc::validation_error, "engine.restart_on_stall must be a boolean");
        engine.nms.restart_on_stall = j["restart_on_stall"].get<bool>();
      }
      break;
    case EngineKind::random_search:
    case EngineKind::exhaustive:
      reject_unknown_keys(j, {"name"}, "engine");
      break;
  }
  return engine;
}

StudyConfig parse_study_value(const json& j) {
  if (!j.is_object()) fail(Errc::validation_error, "study must be a JSON object");
  reject_unknown_keys(j,
                      {"name", "space", "workload", "synthetic", "engine", "max_iterations",
                       "seed", "output_dir"},
                      "study");
  StudyConfig config;
  if (j.contains("name")) config.name = get_string(j["name"], "name");
  config.space = parse_space(require_key(j, "space", "study"));

  const bool has_workload = j.contains("workload");
  const bool has_synthetic = j.contains("synthetic");
  if (has_workload == has_synthetic)
    fail(Errc::validation_error, "study needs exactly one of 'workload' and 'synthetic'");
  if (has_workload) {
    config.workload = parse_workload(j["workload"]);
    harness::validate_workload(*config.workload, config.space);
  } else {
    config.synthetic = parse_synthetic(j["synthetic"]);
    if (config.synthetic->target) check_config(config.space, *config.synthetic->target);
  }

  config.engine = parse_engine(require_key(j, "engine", "study"));
  if (j.contains("max_iterations"))
    config.max_iterations = get_int(j["max_iterations"], "max_iterations");
  if (config.max_iterations < 1) fail(Errc::validation_error, "max_iterations must be >= 1");
  if (j.contains("seed")) config.seed = static_cast<std::uint64_t>(get_int(j["seed"], "seed"));
  if (j.contains("output_dir")) config.output_dir = get_string(j["output_dir"], "output_dir");

  // Construction validates the engine parameter block.
  if (config.engine.kind != EngineKind::exhaustive) make_engine(config.engine);
  return config;
}

}  // namespace

std::string_view to_string(EngineKind kind) {
  switch (kind) {
    case EngineKind::bo: return "bo";
    case EngineKind::ga: return "ga";
    case EngineKind::nms: return "nms";
    case EngineKind::random_search: return "random";
    case EngineKind::exhaustive: return "exhaustive";
  }
  return "bo";
}

EngineKind engine_kind_from_string(std::string_view text) {
  if (text == "bo") return EngineKind::bo;
  if (text == "ga") return EngineKind::ga;
  if (text == "nms") return EngineKind::nms;
  if (text == "random") return EngineKind::random_search;
  if (text == "exhaustive") return EngineKind::exhaustive;
  fail(Errc::validation_error, "unknown engine '" + std::string(text) + "'");
}

StudyConfig parse_study(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) fail(Errc::io_error, "cannot open study file '" + file.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_study_text(buffer.str());
}

StudyConfig parse_study_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(Errc::parse_error, e.what());
  }
  return parse_study_value(j);
}

std::string study_to_json(const StudyConfig& config) {
  ordered_json j;
  if (!config.name.empty()) j["name"] = config.name;
  ordered_json space = ordered_json::array();
  for (const ParameterSpec& p : config.space.params) {
    ordered_json pj;
    pj["name"] = p.name;
    pj["min"] = p.min;
    pj["max"] = p.max;
    pj["step"] = p.step;
    pj["binding"] = binding_to_string(p.binding);
    space.push_back(std::move(pj));
  }
  j["space"] = std::move(space);

  if (config.workload) {
    ordered_json w;
    w["command"] = config.workload->command;
    w["env"] = config.workload->env;
    w["metric_pattern"] = config.workload->metric_pattern;
    w["repeats"] = config.workload->repeats;
    w["aggregation"] = std::string(harness::to_string(config.workload->aggregation));
    w["timeout_s"] = config.workload->timeout_s;
    w["working_dir"] = config.workload->working_dir;
    j["workload"] = std::move(w);
  }
  if (config.synthetic) {
    ordered_json s;
    s["surface"] = std::string(harness::to_string(config.synthetic->surface));
    s["noise_std"] = config.synthetic->noise_std;
    s["noise_seed"] = config.synthetic->noise_seed;
    s["repeats"] = config.synthetic->repeats;
    s["aggregation"] = std::string(harness::to_string(config.synthetic->aggregation));
    if (config.synthetic->target) s["target"] = config.synthetic->target->values;
    j["synthetic"] = std::move(s);
  }

  ordered_json e;
  e["name"] = std::string(to_string(config.engine.kind));
  switch (config.engine.kind) {
    case EngineKind::bo:
      e["alpha"] = config.engine.bo.alpha;
      e["epsilon"] = config.engine.bo.epsilon;
      if (config.engine.bo.init_budget) e["init_budget"] = *config.engine.bo.init_budget;
      e["candidate_budget"] = config.engine.bo.candidate_budget;
      e["refit_period"] = config.engine.bo.refit_period;
      break;
    case EngineKind::ga:
      e["mutation_rate"] = config.engine.ga.mutation_rate;
      if (config.engine.ga.seed_pool) e["seed_pool"] = *config.engine.ga.seed_pool;
      e["max_retries"] = config.engine.ga.max_retries;
      break;
    case EngineKind::nms:
      e["reflect"] = config.engine.nms.coeffs.reflect;
      e["expand"] = config.engine.nms.coeffs.expand;
      e["contract"] = config.engine.nms.coeffs.contract;
      e["shrink"] = config.engine.nms.coeffs.shrink;
      e["restart_on_stall"] = config.engine.nms.restart_on_stall;
      break;
    case EngineKind::random_search:
    case EngineKind::exhaustive: break;
  }
  j["engine"] = std::move(e);
  j["max_iterations"] = config.max_iterations;
  j["seed"] = config.seed;
  j["output_dir"] = config.output_dir;
  return j.dump(2) + "\n";
}

SearchSpace parse_space_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) fail(Errc::io_error, "cannot open space file '" + file.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(Errc::parse_error, e.what());
  }
  if (j.is_array()) return parse_space(j);
  if (j.is_object() && j.contains("space")) return parse_space(j["space"]);
  fail(Errc::validation_error,
       "space file must be a parameter array or a study with a 'space' key");
}

std::unique_ptr<Engine> make_engine(const EngineConfig& engine) {
  switch (engine.kind) {
    case EngineKind::bo: return std::make_unique<bayes::BayesEngine>(engine.bo);
    case EngineKind::ga: return std::make_unique<genetic::GeneticEngine>(engine.ga);
    case EngineKind::nms: return std::make_unique<neldermead::NelderMeadEngine>(engine.nms);
    case EngineKind::random_search: return std::make_unique<RandomEngine>();
    case EngineKind::exhaustive:
      fail(Errc::validation_error, "engine 'exhaustive' runs through the sweep command");
  }
  fail(Errc::validation_error, "unknown engine kind");
}

std::unique_ptr<Evaluator> make_evaluator(const StudyConfig& config) {
  if (config.workload)
    return std::make_unique<harness::SubprocessEvaluator>(*config.workload, config.space);
  if (config.synthetic)
    return std::make_unique<harness::SyntheticEvaluator>(*config.synthetic, config.space);
  fail(Errc::validation_error, "study has neither a workload nor a synthetic surface");
}

}  // namespace gridtune::cli

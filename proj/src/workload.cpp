#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <regex>
#include <set>
#include <string>

#include "gridtune/errors.hpp"
#include "gridtune/harness.hpp"

extern char** environ;

namespace gridtune::harness {

namespace {

// Replaces every {name} with its value; names must be declared parameters.
std::string substitute(const std::string& text, const SearchSpace& space,
                       const Configuration& config) {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t open = text.find('{', pos);
    if (open == std::string::npos) {
      out.append(text, pos, std::string::npos);
      break;
    }
    const std::size_t close = text.find('}', open + 1);
    if (close == std::string::npos)
      fail(Errc::unknown_placeholder, "unterminated placeholder in '" + text + "'");
    out.append(text, pos, open - pos);
    const std::string name = text.substr(open + 1, close - open - 1);
    bool found = false;
    for (std::size_t i = 0; i < space.dim(); ++i) {
      if (space.params[i].name != name) continue;
      out += std::to_string(config.values[i]);
      found = true;
      break;
    }
    if (!found)
      fail(Errc::unknown_placeholder, "placeholder '{" + name + "}' is not a declared parameter");
    pos = close + 1;
  }
  return out;
}

bool references(const std::string& text, const std::string& name) {
  return text.find("{" + name + "}") != std::string::npos;
}

std::regex compile_pattern(const std::string& pattern) {
  std::regex re;
  try {
    re = std::regex(pattern, std::regex::extended);
  } catch (const std::regex_error& e) {
    fail(Errc::bad_pattern, "metric_pattern does not compile: " + std::string(e.what()));
  }
  if (re.mark_count() != 1)
    fail(Errc::bad_pattern, "metric_pattern must have exactly one capture group, has " +
                                std::to_string(re.mark_count()));
  return re;
}

std::optional<double> last_metric_match(const std::string& output, const std::regex& re) {
  std::optional<std::string> captured;
  for (auto it = std::sregex_iterator(output.begin(), output.end(), re);
       it != std::sregex_iterator(); ++it)
    captured = (*it)[1].str();
  if (!captured) return std::nullopt;
  const char* begin = captured->c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end == begin) return std::nullopt;
  return value;
}

struct RunOutput {
  std::string text;
  int exit_code = -1;
  bool timed_out = false;
  bool spawn_failed = false;
};

// Runs one process with combined stdout/stderr capture and a hard deadline.
// The child gets its own process group so a timeout kill reaps any
// grandchildren too.
RunOutput run_once(const std::vector<std::string>& argv,
                   const std::map<std::string, std::string>& env, const std::string& working_dir,
                   double timeout_s) {
  int out_pipe[2];
  int exec_pipe[2];
  if (pipe(out_pipe) != 0) fail(Errc::spawn_error, std::strerror(errno));
  if (pipe2(exec_pipe, O_CLOEXEC) != 0) {
    close(out_pipe[0]);
    close(out_pipe[1]);
    fail(Errc::spawn_error, std::strerror(errno));
  }

  const pid_t pid = fork();
  if (pid < 0) {
    close(out_pipe[0]);
    close(out_pipe[1]);
    close(exec_pipe[0]);
    close(exec_pipe[1]);
    fail(Errc::spawn_error, std::strerror(errno));
  }

  if (pid == 0) {
    setpgid(0, 0);
    dup2(out_pipe[1], STDOUT_FILENO);
    dup2(out_pipe[1], STDERR_FILENO);
    close(out_pipe[0]);
    close(out_pipe[1]);
    close(exec_pipe[0]);
    if (!working_dir.empty() && chdir(working_dir.c_str()) != 0) {
      const int err = errno;
      (void)!write(exec_pipe[1], &err, sizeof err);
      _exit(127);
    }

    // Parent environment plus the rendered overrides.
    std::map<std::string, std::string> merged;
    for (char** e = environ; *e; ++e) {
      const char* eq = std::strchr(*e, '=');
      if (eq) merged[std::string(*e, static_cast<std::size_t>(eq - *e))] = eq + 1;
    }
    for (const auto& [k, v] : env) merged[k] = v;
    std::vector<std::string> env_strings;
    env_strings.reserve(merged.size());
    for (const auto& [k, v] : merged) env_strings.push_back(k + "=" + v);
    std::vector<char*> envp;
    envp.reserve(env_strings.size() + 1);
    for (std::string& s : env_strings) envp.push_back(s.data());
    envp.push_back(nullptr);

    std::vector<char*> args;
    args.reserve(argv.size() + 1);
    for (const std::string& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);

    execvpe(args[0], args.data(), envp.data());
    const int err = errno;
    (void)!write(exec_pipe[1], &err, sizeof err);
    _exit(127);
  }

  close(out_pipe[1]);
  close(exec_pipe[1]);

  RunOutput result;
  const auto deadline =
      std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_s);
  constexpr std::size_t kMaxCapture = std::size_t(16) << 20;

  bool pipe_open = true;
  char buf[4096];
  while (pipe_open) {
    const auto remaining = deadline - std::chrono::steady_clock::now();
    const auto remaining_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(remaining).count();
    if (remaining_ms <= 0) {
      result.timed_out = true;
      break;
    }
    pollfd pfd{out_pipe[0], POLLIN, 0};
    const int rc = poll(&pfd, 1, static_cast<int>(std::min<long long>(remaining_ms, 1000)));
    if (rc < 0 && errno != EINTR) break;
    if (rc <= 0) continue;
    const ssize_t n = read(out_pipe[0], buf, sizeof buf);
    if (n <= 0) {
      pipe_open = false;
    } else if (result.text.size() < kMaxCapture) {
      result.text.append(buf, static_cast<std::size_t>(n));
    }
  }

  if (result.timed_out) {
    kill(-pid, SIGKILL);
    kill(pid, SIGKILL);
  } else {
    // Pipe closed; wait out the child up to the deadline, then kill.
    for (;;) {
      int status = 0;
      const pid_t done = waitpid(pid, &status, WNOHANG);
      if (done == pid) {
        if (WIFEXITED(status))
          result.exit_code = WEXITSTATUS(status);
        else if (WIFSIGNALED(status))
          result.exit_code = 128 + WTERMSIG(status);
        break;
      }
      if (std::chrono::steady_clock::now() >= deadline) {
        result.timed_out = true;
        kill(-pid, SIGKILL);
        kill(pid, SIGKILL);
        break;
      }
      usleep(2000);
    }
  }

  if (result.timed_out) {
    int status = 0;
    waitpid(pid, &status, 0);
  }
  close(out_pipe[0]);

  int exec_errno = 0;
  if (read(exec_pipe[0], &exec_errno, sizeof exec_errno) == sizeof exec_errno)
    result.spawn_failed = true;
  close(exec_pipe[0]);
  return result;
}

}  // namespace

void validate_workload(const WorkloadSpec& workload, const SearchSpace& space) {
  validate_space(space);
  if (workload.command.empty()) fail(Errc::validation_error, "workload command is empty");
  if (workload.repeats < 1) fail(Errc::validation_error, "repeats must be >= 1");
  if (!(workload.timeout_s > 0.0)) fail(Errc::validation_error, "timeout_s must be positive");
  compile_pattern(workload.metric_pattern);

  // Placeholders must name declared parameters.
  Configuration probe;
  for (const ParameterSpec& p : space.params) probe.values.push_back(p.min);
  for (const std::string& token : workload.command) substitute(token, space, probe);
  for (const auto& [key, value] : workload.env) substitute(value, space, probe);

  for (const ParameterSpec& p : space.params) {
    if (p.binds_arg()) {
      bool found = false;
      for (const std::string& token : workload.command) found = found || references(token, p.name);
      if (!found)
        fail(Errc::missing_binding,
             "parameter '" + p.name + "' binds to the command line but no argument names it");
    }
    if (p.binds_env()) {
      bool found = false;
      for (const auto& [key, value] : workload.env) found = found || references(value, p.name);
      if (!found)
        fail(Errc::missing_binding,
             "parameter '" + p.name + "' binds to the environment but no variable names it");
    }
  }
}

RenderedCommand render(const WorkloadSpec& workload, const SearchSpace& space,
                       const Configuration& config) {
  check_config(space, config);
  validate_workload(workload, space);
  RenderedCommand out;
  out.argv.reserve(workload.command.size());
  for (const std::string& token : workload.command)
    out.argv.push_back(substitute(token, space, config));
  for (const auto& [key, value] : workload.env) out.env[key] = substitute(value, space, config);
  return out;
}

Evaluation run_evaluation(const WorkloadSpec& workload, const SearchSpace& space,
                          const Configuration& config, std::int64_t iteration) {
  const RenderedCommand rendered = render(workload, space, config);
  const std::regex re = compile_pattern(workload.metric_pattern);

  Evaluation ev;
  ev.config = config;
  ev.iteration = iteration;
  ev.status = EvalStatus::ok;

  const auto started = std::chrono::steady_clock::now();
  for (std::int64_t r = 0; r < workload.repeats; ++r) {
    const RunOutput run = run_once(rendered.argv, rendered.env, workload.working_dir,
                                   workload.timeout_s);
    if (run.timed_out) {
      ev.status = EvalStatus::timeout;
      break;
    }
    if (run.spawn_failed || run.exit_code != 0) {
      ev.status = EvalStatus::failed;
      break;
    }
    const std::optional<double> metric = last_metric_match(run.text, re);
    if (!metric) {
      ev.status = EvalStatus::failed;
      break;
    }
    ev.repeats.push_back(*metric);
  }
  ev.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  if (ev.ok()) ev.value = aggregate(workload.aggregation, ev.repeats);
  return ev;
}

SubprocessEvaluator::SubprocessEvaluator(WorkloadSpec workload, SearchSpace space)
    : workload_(std::move(workload)), space_(std::move(space)) {
  validate_workload(workload_, space_);
}

Evaluation SubprocessEvaluator::evaluate(const Configuration& config, std::int64_t iteration) {
  return run_evaluation(workload_, space_, config, iteration);
}

}  // namespace gridtune::harness

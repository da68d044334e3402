#include "hfaid/iqa/external_scorer.hpp"

#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <set>
#include <thread>

#include "hfaid/common/error.hpp"
#include "hfaid/common/json_util.hpp"
#include "hfaid/corpus/manifest.hpp"

extern char** environ;

namespace hfaid::iqa {
namespace {

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
  for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size()) {
    s.replace(pos, from.size(), to);
  }
  return s;
}

std::string tail_of(const std::filesystem::path& log, std::size_t max_bytes = 2000) {
  std::string text;
  try {
    text = read_text_file(log);
  } catch (const Error&) {
    return {};
  }
  if (text.size() > max_bytes) text = "..." + text.substr(text.size() - max_bytes);
  return text;
}

}  // namespace

std::filesystem::path run_external_scorer(const std::filesystem::path& manifest, const ExternalScorerSpec& spec,
                                          const std::filesystem::path& out) {
  if (spec.command.empty()) throw InvalidArgument("external scorer '" + spec.metric + "': empty command");
  if (!std::filesystem::exists(manifest)) throw IoError("manifest not found: " + manifest.string());
  const auto m = corpus::read_manifest(manifest);
  std::set<std::string> known;
  for (const auto& e : m.entries) known.insert(e.id);

  std::vector<std::string> argv;
  bool substituted = false;
  for (const auto& a : spec.command) {
    if (a.find("{manifest}") != std::string::npos || a.find("{out}") != std::string::npos) substituted = true;
    argv.push_back(replace_all(replace_all(a, "{manifest}", manifest.string()), "{out}", out.string()));
  }
  if (!substituted) {
    argv.insert(argv.end(), {"--manifest", manifest.string(), "--out", out.string()});
  }
  std::filesystem::remove(out);
  const auto log = std::filesystem::path(out.string() + ".log");

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, STDOUT_FILENO, log.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  posix_spawn_file_actions_adddup2(&actions, STDOUT_FILENO, STDERR_FILENO);
  std::vector<char*> cargv;
  for (auto& a : argv) cargv.push_back(a.data());
  cargv.push_back(nullptr);
  pid_t pid = 0;
  const int rc = posix_spawnp(&pid, cargv[0], &actions, nullptr, cargv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) {
    throw IoError("external scorer '" + spec.metric + "': cannot start " + argv[0] + ": " + std::strerror(rc));
  }

  const auto deadline = std::chrono::steady_clock::now() + spec.timeout;
  int status = 0;
  for (;;) {
    const pid_t r = waitpid(pid, &status, WNOHANG);
    if (r == pid) break;
    if (r < 0 && errno != EINTR) throw IoError("external scorer: waitpid failed");
    if (std::chrono::steady_clock::now() >= deadline) {
      kill(pid, SIGKILL);
      waitpid(pid, &status, 0);
      throw Error("external scorer '" + spec.metric + "' timed out after " + std::to_string(spec.timeout.count()) +
                  "s\n" + tail_of(log));
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    const std::string how = WIFEXITED(status) ? "exited with status " + std::to_string(WEXITSTATUS(status))
                                              : "was killed by signal " + std::to_string(WTERMSIG(status));
    throw Error("external scorer '" + spec.metric + "' " + how + "\n" + tail_of(log));
  }
  if (!std::filesystem::exists(out)) {
    throw FormatError("external scorer '" + spec.metric + "' did not write " + out.string());
  }

  std::vector<std::string> problems;
  for_each_json_line(
      out,
      [&](std::size_t line, const Json& j) {
        const auto where = out.filename().string() + ":" + std::to_string(line) + ": ";
        if (!j.is_object() || !j.contains("id") || !j["id"].is_string()) {
          problems.push_back(where + "missing id");
          return;
        }
        const auto id = j["id"].get<std::string>();
        if (!known.contains(id)) problems.push_back(where + "unknown id " + id);
        if (!j.contains("metric") || j["metric"] != spec.metric) problems.push_back(where + "metric is not " + spec.metric);
        if (!j.contains("score") || !j["score"].is_number() || !std::isfinite(j["score"].get<double>())) {
          problems.push_back(where + "score is not a finite number");
        }
      },
      [&](std::size_t line, const std::string& msg) {
        problems.push_back(out.filename().string() + ":" + std::to_string(line) + ": " + msg);
      });
  if (!problems.empty()) {
    std::string msg = "external scorer '" + spec.metric + "' wrote invalid scores:";
    for (std::size_t i = 0; i < problems.size() && i < 20; ++i) msg += "\n  " + problems[i];
    if (problems.size() > 20) msg += "\n  (" + std::to_string(problems.size() - 20) + " more)";
    throw FormatError(msg);
  }
  return out;
}

}  // namespace hfaid::iqa

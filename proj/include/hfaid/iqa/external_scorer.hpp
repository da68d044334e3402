#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

namespace hfaid::iqa {

struct ExternalScorerSpec {
  // argv template. "{manifest}" and "{out}" are substituted; if neither
  // appears, "--manifest <path> --out <path>" is appended.
  std::vector<std::string> command;
  std::string metric;
  std::chrono::seconds timeout{600};
};

// Runs an out-of-process scorer over a corpus manifest and validates the
// External Scores file it writes: every line parses, names `metric`, carries
// a finite score and an id present in the manifest. Child stdout/stderr go to
// `<out>.log`; a failure message includes its tail. Returns `out`.
std::filesystem::path run_external_scorer(const std::filesystem::path& manifest, const ExternalScorerSpec& spec,
                                          const std::filesystem::path& out);

}  // namespace hfaid::iqa

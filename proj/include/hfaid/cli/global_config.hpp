#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hfaid/common/json_util.hpp"
#include "hfaid/degrade/config.hpp"
#include "hfaid/diffmath/schedule.hpp"
#include "hfaid/pipeline/config.hpp"
#include "hfaid/review/service.hpp"
#include "hfaid/ropo/config.hpp"

namespace hfaid::cli {

struct ScorerEntry {
  std::vector<std::string> command;
  int timeout_s = 600;
};

// Everything a run can be configured with. Relative paths in the file are
// resolved against the file's directory.
struct GlobalConfig {
  std::optional<std::filesystem::path> store;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  pipeline::PipelineConfig pipeline;
  degrade::DegradationConfig degradation;
  ropo::RopoConfig ropo;
  diffmath::ScheduleProfile schedule = diffmath::ScheduleProfile::standard();
  std::optional<std::filesystem::path> niqe_model;
  std::optional<std::filesystem::path> brisque_weights;
  std::map<std::string, ScorerEntry> scorers;  // metric -> external command
  review::ServiceConfig review;

  static GlobalConfig from_json(const Json& j, const std::filesystem::path& base_dir);
  static GlobalConfig load(const std::filesystem::path& path);
  Json to_json() const;
  // Digest of everything that can change an output (not workers).
  std::string digest() const;
};

}  // namespace hfaid::cli

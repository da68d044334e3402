#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "hfaid/common/json_util.hpp"
#include "hfaid/corpus/store.hpp"
#include "hfaid/pipeline/config.hpp"

namespace hfaid::pipeline {

struct StageCounts {
  std::size_t input = 0;
  std::size_t output = 0;
};

struct PipelineReport {
  std::vector<corpus::Stage> ran;
  // Funnel recomputed from the stored verdicts after the run, indexed by
  // stage. output[k] == input[k + 1].
  std::array<StageCounts, 4> funnel{};
  std::map<std::string, std::size_t> reject_reasons;  // "stage/reason" -> count
  std::vector<std::string> selected;                  // ascending id
  std::size_t review_pending = 0;
  std::vector<std::string> errors;
  std::string config_digest;
  double wall_seconds = 0.0;

  // Without wall time the JSON is a pure function of store and config.
  Json to_json(bool include_wall_time = true) const;
};

// Funnel counts and reject histogram of the verdicts currently stored.
void summarize_funnel(const corpus::Store& store, PipelineReport& report);

// Runs the requested stages in stage order. Per-record failures (for
// example undecodable images) become rejects listed in `errors`; missing
// prerequisite scores and store failures throw.
PipelineReport run_pipeline(corpus::Store& store, const PipelineConfig& cfg, const std::set<corpus::Stage>& stages);

}  // namespace hfaid::pipeline

#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "hfaid/corpus/record.hpp"
#include "hfaid/corpus/store.hpp"
#include "hfaid/imgproc/image.hpp"
#include "hfaid/pipeline/config.hpp"

namespace hfaid::pipeline {

namespace reason {
inline constexpr const char* grayscale = "grayscale";
inline constexpr const char* too_small = "too_small";
inline constexpr const char* bad_aspect = "bad_aspect";
inline constexpr const char* low_sharpness = "low_sharpness";
inline constexpr const char* decode_failed = "decode_failed";
inline constexpr const char* low_aesthetic = "low_aesthetic";
inline constexpr const char* human_rejected = "human_rejected";
inline constexpr const char* over_quota = "over_quota";
}  // namespace reason

// Reason code for failing a stage-2 metric channel.
std::string low_metric_reason(const std::string& metric);

// Cleaning checks in order: grayscale, size, aspect ratio, sharpness. The
// first failing check decides the reject reason.
corpus::Verdict stage1_clean(const imgproc::ImagePlane& img, const PipelineConfig& cfg);

struct StageResult {
  std::size_t input = 0;
  std::size_t passed = 0;
  std::map<std::string, std::size_t> rejects;  // reason -> count
  std::vector<std::string> errors;              // per-record problems, "id: message"
};

// Running a stage (re)writes its verdict for every record that passed the
// previous stage, removes this stage's verdict from all other records and
// drops every later-stage verdict, which depended on the old result. Stored
// verdicts therefore always form a monotone funnel.

// Loads and checks every record image on cfg.workers threads.
StageResult stage1_run(corpus::Store& store, const PipelineConfig& cfg);

// Score that the `keep`% best of `scores` reach: the ceil(n * keep / 100)-th
// best value. Records at the cutoff are kept.
double percentile_cutoff(std::vector<double> scores, Direction direction, double keep);
inline bool clears(double score, double cutoff, Direction d) {
  return d == Direction::higher_better ? score >= cutoff : score <= cutoff;
}

// Intersection of the per-channel percentile keeps over stage-1
// survivors. Throws Error naming the record and metric if a survivor lacks
// a score.
StageResult stage2_quality(corpus::Store& store, const PipelineConfig& cfg);

// Pass iff aesthetic score >= min_score. Throws Error naming an unscored
// survivor.
StageResult stage3_aesthetic(corpus::Store& store, const PipelineConfig& cfg);

// Stage-3 survivors, best aesthetic score first, ties by ascending id.
std::vector<std::string> review_queue(const corpus::Store& store, const PipelineConfig& cfg);

struct FinalizeResult : StageResult {
  std::vector<std::string> selected;  // review-queue order
  std::size_t pending = 0;            // pending or conflicted, no verdict written
};

// Approved records in review-queue order up to target_k pass; the rest of
// the approved ones are rejected as over_quota, rejected ones as
// human_rejected.
FinalizeResult stage4_finalize(corpus::Store& store, const PipelineConfig& cfg);

}  // namespace hfaid::pipeline

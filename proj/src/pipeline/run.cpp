#include "hfaid/pipeline/run.hpp"

#include <chrono>

#include <spdlog/spdlog.h>

#include "hfaid/pipeline/stages.hpp"

namespace hfaid::pipeline {

using corpus::Stage;

Json PipelineReport::to_json(bool include_wall_time) const {
  Json j;
  Json ran_j = Json::array();
  for (auto s : ran) ran_j.push_back(std::string(corpus::stage_name(s)));
  j["stages_run"] = ran_j;
  Json f = Json::array();
  for (int s = 0; s < 4; ++s) {
    f.push_back({{"stage", std::string(corpus::stage_name(static_cast<Stage>(s)))},
                 {"input", funnel[static_cast<std::size_t>(s)].input},
                 {"output", funnel[static_cast<std::size_t>(s)].output}});
  }
  j["funnel"] = f;
  j["reject_reasons"] = reject_reasons;
  j["selected"] = selected;
  j["review_pending"] = review_pending;
  j["errors"] = errors;
  j["config_digest"] = config_digest;
  if (include_wall_time) j["wall_seconds"] = wall_seconds;
  return j;
}

void summarize_funnel(const corpus::Store& store, PipelineReport& report) {
  report.funnel = {};
  report.reject_reasons.clear();
  report.selected.clear();
  for (const auto& r : store.records()) {
    bool alive = true;
    for (int s = 0; s < 4 && alive; ++s) {
      const auto stage = static_cast<Stage>(s);
      auto& counts = report.funnel[static_cast<std::size_t>(s)];
      ++counts.input;
      auto it = r.stage_verdicts.find(stage);
      if (it != r.stage_verdicts.end() && it->second.passed()) {
        ++counts.output;
      } else {
        alive = false;
        if (it != r.stage_verdicts.end()) {
          ++report.reject_reasons[std::string(corpus::stage_name(stage)) + "/" + it->second.reason];
        }
      }
    }
    if (alive) report.selected.push_back(r.id);
  }
}

PipelineReport run_pipeline(corpus::Store& store, const PipelineConfig& cfg, const std::set<Stage>& stages) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  PipelineReport report;
  report.config_digest = cfg.digest();
  spdlog::info("pipeline: {} records, config {}", store.size(), report.config_digest);
  for (Stage s : stages) {  // std::set iterates in stage order
    report.ran.push_back(s);
    StageResult res;
    switch (s) {
      case Stage::clean: res = stage1_run(store, cfg); break;
      case Stage::quality: res = stage2_quality(store, cfg); break;
      case Stage::aesthetic: res = stage3_aesthetic(store, cfg); break;
      case Stage::human: {
        auto fin = stage4_finalize(store, cfg);
        report.review_pending = fin.pending;
        res = fin;
        break;
      }
    }
    spdlog::info("stage {}: {} in, {} passed", corpus::stage_name(s), res.input, res.passed);
    report.errors.insert(report.errors.end(), res.errors.begin(), res.errors.end());
  }
  summarize_funnel(store, report);
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace hfaid::pipeline

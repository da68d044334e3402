#include "hfaid/pipeline/native_scores.hpp"

#include <map>

#include <spdlog/spdlog.h>

#include "hfaid/common/error.hpp"
#include "hfaid/common/parallel.hpp"
#include "hfaid/corpus/ingest.hpp"
#include "hfaid/corpus/manifest.hpp"
#include "hfaid/imgproc/codec.hpp"
#include "hfaid/imgproc/filter.hpp"

namespace hfaid::pipeline {
namespace {

std::vector<corpus::ImageRecord> scoreable(const corpus::Store& store) {
  std::vector<corpus::ImageRecord> out;
  for (auto& r : store.records()) {
    auto it = r.stage_verdicts.find(corpus::Stage::clean);
    if (it != r.stage_verdicts.end() && !it->second.passed()) continue;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

bool is_native_metric(const std::string& metric) {
  return metric == "niqe" || metric == "brisque" || metric == "laplacian_var";
}

ScoreRunReport score_native(corpus::Store& store, const std::string& metric, const NativeScorers& scorers,
                            std::size_t workers) {
  if (!is_native_metric(metric)) throw InvalidArgument("'" + metric + "' is not a native metric");
  if (metric == "niqe" && !scorers.niqe) throw InvalidArgument("niqe scoring needs a fitted model (fit-niqe)");
  if (metric == "brisque" && !scorers.brisque) throw InvalidArgument("brisque scoring needs a weights file");
  const auto records = scoreable(store);
  std::vector<double> scores(records.size());
  std::vector<std::string> errors(records.size());
  parallel_for(records.size(), workers, [&](std::size_t i) {
    try {
      const auto img = imgproc::load_image(store.resolve(records[i].path));
      if (metric == "niqe") {
        scores[i] = iqa::niqe_score(img, *scorers.niqe);
      } else if (metric == "brisque") {
        scores[i] = scorers.brisque->score(iqa::brisque_features(img));
      } else {
        scores[i] = imgproc::laplacian_variance(imgproc::to_luma(img));
      }
    } catch (const Error& e) {
      errors[i] = records[i].id + ": " + e.what();
    }
  });
  ScoreRunReport rep;
  std::map<std::string, double> by_id;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (errors[i].empty()) {
      by_id[records[i].id] = scores[i];
    } else {
      rep.failed.push_back(errors[i]);
    }
  }
  store.update_all([&](corpus::ImageRecord& r) {
    auto it = by_id.find(r.id);
    if (it == by_id.end()) return false;
    auto cur = r.scores.find(metric);
    if (cur != r.scores.end() && cur->second == it->second) return false;
    r.scores[metric] = it->second;
    return true;
  });
  rep.updated = by_id.size();
  return rep;
}

ScoreRunReport score_external(corpus::Store& store, const iqa::ExternalScorerSpec& spec,
                              const std::filesystem::path& work_dir) {
  std::filesystem::create_directories(work_dir);
  corpus::Manifest m;
  for (const auto& r : scoreable(store)) {
    auto e = corpus::entry_from_record(r);
    e.path = std::filesystem::absolute(store.resolve(r.path)).string();
    m.entries.push_back(std::move(e));
  }
  const auto manifest = work_dir / (spec.metric + ".manifest.json");
  corpus::write_manifest(m, manifest);
  const auto out = iqa::run_external_scorer(manifest, spec, work_dir / (spec.metric + ".scores.jsonl"));
  const auto merged = corpus::merge_scores(store, out, spec.metric);
  ScoreRunReport rep;
  rep.updated = merged.updated;
  for (const auto& issue : merged.rejected) rep.failed.push_back("line " + std::to_string(issue.line) + ": " + issue.message);
  return rep;
}

double calibrate_laplacian_min(std::span<const imgproc::ImagePlane> clean, double pct) {
  if (clean.empty()) throw InvalidArgument("calibration needs at least one clean image");
  std::vector<double> v;
  for (const auto& img : clean) v.push_back(imgproc::laplacian_variance(imgproc::to_luma(img)));
  return iqa::percentile(std::move(v), pct);
}

}  // namespace hfaid::pipeline

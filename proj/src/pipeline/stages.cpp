#include "hfaid/pipeline/stages.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "hfaid/common/error.hpp"
#include "hfaid/common/parallel.hpp"
#include "hfaid/imgproc/codec.hpp"
#include "hfaid/imgproc/filter.hpp"
#include "hfaid/review/protocol.hpp"

namespace hfaid::pipeline {
namespace {

using corpus::ImageRecord;
using corpus::Stage;
using corpus::Verdict;

constexpr std::size_t kBatch = 256;

bool eligible(const ImageRecord& r, Stage s) {
  return s == Stage::clean || r.passed(static_cast<Stage>(static_cast<int>(s) - 1));
}

// Drops verdicts at `from` and every later stage. Returns true if any existed.
bool clear_from(ImageRecord& r, Stage from) {
  bool changed = false;
  for (int s = static_cast<int>(from); s <= static_cast<int>(Stage::human); ++s) {
    changed |= r.stage_verdicts.erase(static_cast<Stage>(s)) > 0;
  }
  return changed;
}

// Writes `verdicts` (id -> verdict, or nullopt for "no verdict") at stage s
// and keeps the funnel monotone for everyone else.
void apply(corpus::Store& store, Stage s, const std::map<std::string, std::optional<Verdict>>& verdicts,
           bool clear_others) {
  const auto next = static_cast<Stage>(std::min(static_cast<int>(s) + 1, static_cast<int>(Stage::human)));
  store.update_all([&](ImageRecord& r) {
    auto it = verdicts.find(r.id);
    if (it == verdicts.end()) return clear_others && clear_from(r, s);
    bool changed = false;
    if (s != Stage::human) changed |= clear_from(r, next);
    if (!it->second) return clear_from(r, s) || changed;
    auto cur = r.stage_verdicts.find(s);
    if (cur != r.stage_verdicts.end() && cur->second == *it->second) return changed;
    r.stage_verdicts[s] = *it->second;
    return true;
  });
}

void tally(StageResult& res, const Verdict& v) {
  if (v.passed()) {
    ++res.passed;
  } else {
    ++res.rejects[v.reason];
  }
}

std::vector<ImageRecord> eligible_records(const corpus::Store& store, Stage s) {
  std::vector<ImageRecord> out;
  for (auto& r : store.records()) {
    if (eligible(r, s)) out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

std::string low_metric_reason(const std::string& metric) { return "low_" + metric; }

Verdict stage1_clean(const imgproc::ImagePlane& img, const PipelineConfig& cfg) {
  if (imgproc::is_grayscale(img, cfg.grayscale_tol)) return Verdict::reject(Stage::clean, reason::grayscale);
  const int short_side = std::min(img.width, img.height);
  const int long_side = std::max(img.width, img.height);
  if (short_side < cfg.min_short_side) return Verdict::reject(Stage::clean, reason::too_small);
  if (static_cast<double>(long_side) / short_side > cfg.max_aspect_ratio) {
    return Verdict::reject(Stage::clean, reason::bad_aspect);
  }
  if (img.width < 3 || img.height < 3 || imgproc::laplacian_variance(imgproc::to_luma(img)) < cfg.laplacian_min) {
    return Verdict::reject(Stage::clean, reason::low_sharpness);
  }
  return Verdict::pass(Stage::clean);
}

StageResult stage1_run(corpus::Store& store, const PipelineConfig& cfg) {
  cfg.validate();
  const auto records = store.records();
  StageResult res;
  res.input = records.size();
  std::map<std::string, std::optional<Verdict>> all;
  for (std::size_t start = 0; start < records.size(); start += kBatch) {
    const std::size_t n = std::min(kBatch, records.size() - start);
    std::vector<Verdict> verdicts(n);
    std::vector<std::string> errors(n);
    parallel_for(n, cfg.workers, [&](std::size_t i) {
      const auto& r = records[start + i];
      try {
        verdicts[i] = stage1_clean(imgproc::load_image(store.resolve(r.path)), cfg);
      } catch (const Error& e) {
        verdicts[i] = Verdict::reject(Stage::clean, reason::decode_failed);
        errors[i] = r.id + ": " + e.what();
      }
    });
    std::map<std::string, std::optional<Verdict>> batch;
    for (std::size_t i = 0; i < n; ++i) {
      batch[records[start + i].id] = verdicts[i];
      tally(res, verdicts[i]);
      if (!errors[i].empty()) res.errors.push_back(errors[i]);
    }
    // Persist each batch so an interrupted run keeps its progress.
    apply(store, Stage::clean, batch, false);
  }
  return res;
}

double percentile_cutoff(std::vector<double> scores, Direction direction, double keep) {
  if (scores.empty()) throw InvalidArgument("percentile_cutoff of an empty set");
  if (!(keep > 0.0 && keep <= 100.0)) throw InvalidArgument("percentile_keep must be in (0, 100]");
  if (direction == Direction::higher_better) {
    std::sort(scores.begin(), scores.end(), std::greater<double>());
  } else {
    std::sort(scores.begin(), scores.end());
  }
  const double exact = static_cast<double>(scores.size()) * keep / 100.0;
  // Guard against 50 * 100 / 100 landing a hair above an integer.
  auto n_keep = static_cast<std::size_t>(std::ceil(exact - 1e-9));
  n_keep = std::clamp<std::size_t>(n_keep, 1, scores.size());
  return scores[n_keep - 1];
}

StageResult stage2_quality(corpus::Store& store, const PipelineConfig& cfg) {
  cfg.validate();
  const auto records = eligible_records(store, Stage::quality);
  StageResult res;
  res.input = records.size();
  for (const auto& r : records) {
    for (const auto& ch : cfg.metric_channels) {
      const auto s = r.score(ch.metric);
      if (!s) throw Error("record " + r.id + " has no '" + ch.metric + "' score; run `score` for that metric first");
    }
  }
  std::map<std::string, std::optional<Verdict>> verdicts;
  if (!records.empty()) {
    std::vector<double> cutoffs;
    for (const auto& ch : cfg.metric_channels) {
      std::vector<double> scores;
      scores.reserve(records.size());
      for (const auto& r : records) scores.push_back(*r.score(ch.metric));
      cutoffs.push_back(percentile_cutoff(std::move(scores), ch.direction, ch.percentile_keep));
    }
    for (const auto& r : records) {
      Verdict v = Verdict::pass(Stage::quality);
      for (std::size_t c = 0; c < cfg.metric_channels.size(); ++c) {
        const auto& ch = cfg.metric_channels[c];
        if (!clears(*r.score(ch.metric), cutoffs[c], ch.direction)) {
          v = Verdict::reject(Stage::quality, low_metric_reason(ch.metric));
          break;
        }
      }
      tally(res, v);
      verdicts[r.id] = v;
    }
  }
  apply(store, Stage::quality, verdicts, true);
  return res;
}

StageResult stage3_aesthetic(corpus::Store& store, const PipelineConfig& cfg) {
  cfg.validate();
  const auto records = eligible_records(store, Stage::aesthetic);
  const auto& metric = cfg.aesthetic_channel.metric;
  for (const auto& r : records) {
    if (!r.score(metric)) throw Error("record " + r.id + " has no '" + metric + "' score; run the aesthetic scorer first");
  }
  StageResult res;
  res.input = records.size();
  std::map<std::string, std::optional<Verdict>> verdicts;
  for (const auto& r : records) {
    const Verdict v = *r.score(metric) >= cfg.aesthetic_channel.min_score
                          ? Verdict::pass(Stage::aesthetic)
                          : Verdict::reject(Stage::aesthetic, reason::low_aesthetic);
    tally(res, v);
    verdicts[r.id] = v;
  }
  apply(store, Stage::aesthetic, verdicts, true);
  return res;
}

std::vector<std::string> review_queue(const corpus::Store& store, const PipelineConfig& cfg) {
  std::vector<std::pair<double, std::string>> q;
  for (const auto& r : store.records()) {
    if (!r.passed(Stage::aesthetic)) continue;
    q.emplace_back(r.score(cfg.aesthetic_channel.metric).value_or(-HUGE_VAL), r.id);
  }
  std::sort(q.begin(), q.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<std::string> ids;
  for (auto& [s, id] : q) ids.push_back(std::move(id));
  return ids;
}

FinalizeResult stage4_finalize(corpus::Store& store, const PipelineConfig& cfg) {
  cfg.validate();
  const auto queue = review_queue(store, cfg);
  FinalizeResult res;
  res.input = queue.size();
  std::map<std::string, std::optional<Verdict>> verdicts;
  for (const auto& id : queue) {
    const auto r = store.get(id);
    const auto status = review::review_status(r->review);
    std::optional<Verdict> v;
    if (status == review::ReviewStatus::approved) {
      if (res.selected.size() < cfg.target_k) {
        v = Verdict::pass(Stage::human);
        res.selected.push_back(id);
      } else {
        v = Verdict::reject(Stage::human, reason::over_quota);
      }
    } else if (status == review::ReviewStatus::rejected) {
      v = Verdict::reject(Stage::human, reason::human_rejected);
    } else {
      ++res.pending;
    }
    if (v) tally(res, *v);
    verdicts[id] = v;
  }
  apply(store, Stage::human, verdicts, true);
  return res;
}

}  // namespace hfaid::pipeline

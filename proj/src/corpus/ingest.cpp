#include "hfaid/corpus/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

#include <spdlog/spdlog.h>

#include "hfaid/common/error.hpp"
#include "hfaid/common/hashing.hpp"
#include "hfaid/common/json_util.hpp"
#include "hfaid/common/parallel.hpp"
#include "hfaid/imgproc/codec.hpp"

namespace fs = std::filesystem;

namespace hfaid::corpus {

IngestReport ingest_directory(Store& store, const fs::path& dir, std::size_t workers, bool dry_run) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IoError(dir.string() + ": not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  struct Probe {
    std::optional<ImageRecord> record;
  };
  std::vector<Probe> probes(files.size());
  parallel_for(files.size(), workers, [&](std::size_t i) {
    const auto bytes = imgproc::read_file_bytes(files[i]);
    if (imgproc::sniff_format(bytes) == imgproc::ImageFormat::unknown) return;
    try {
      const auto img = imgproc::decode_image(bytes);
      ImageRecord r;
      r.id = content_id(bytes);
      r.path = store.relativize(files[i]);
      r.width = img.width;
      r.height = img.height;
      probes[i].record = std::move(r);
    } catch (const FormatError&) {
    }
  });

  IngestReport report;
  report.scanned = files.size();
  std::map<std::string, std::string> batch_paths;
  std::vector<ImageRecord> fresh;
  for (std::size_t i = 0; i < files.size(); ++i) {
    auto& probe = probes[i];
    if (!probe.record) {
      if (imgproc::sniff_format(imgproc::read_file_bytes(files[i])) != imgproc::ImageFormat::unknown) {
        report.undecodable.push_back(files[i].string());
        spdlog::warn("ingest: cannot decode {}", files[i].string());
      }
      continue;
    }
    ImageRecord& r = *probe.record;
    std::string first_path;
    if (auto existing = store.get(r.id)) {
      first_path = existing->path;
    } else if (auto it = batch_paths.find(r.id); it != batch_paths.end()) {
      first_path = it->second;
    }
    if (!first_path.empty()) {
      if (first_path == r.path) {
        ++report.already_present;
      } else {
        spdlog::info("ingest: {} duplicates {} (record {}), keeping the first path", r.path, first_path, r.id);
        report.duplicates.push_back(r.path);
      }
      continue;
    }
    batch_paths.emplace(r.id, r.path);
    fresh.push_back(std::move(r));
  }
  report.added = fresh.size();
  if (!dry_run && !fresh.empty()) store.upsert_many(std::move(fresh));
  return report;
}

CaptionImportReport import_captions(Store& store, const fs::path& sidecar) {
  std::map<std::string, std::string> captions;
  CaptionImportReport report;
  for_each_json_line(
      sidecar,
      [&](std::size_t line, const Json& j) {
        if (!j.is_object() || !j.contains("id") || !j["id"].is_string() || !j.contains("caption") ||
            !j["caption"].is_string()) {
          throw FormatError(sidecar.string() + ": line " + std::to_string(line) +
                            ": expected {\"id\": string, \"caption\": string}");
        }
        const auto id = j["id"].get<std::string>();
        if (captions.count(id)) {
          std::string w = "duplicate caption for " + id + " at line " + std::to_string(line) + " (last wins)";
          spdlog::warn("{}", w);
          report.warnings.push_back(std::move(w));
        }
        captions[id] = j["caption"].get<std::string>();
      },
      [&](std::size_t line, const std::string& msg) {
        throw FormatError(sidecar.string() + ": line " + std::to_string(line) + ": " + msg);
      });

  for (const auto& [id, caption] : captions) {
    const bool found = store.update(id, [&](ImageRecord& r) { r.caption = caption; });
    if (found) {
      ++report.updated;
    } else {
      report.unmatched.push_back(id);
    }
  }
  return report;
}

ScoreMergeReport merge_scores(Store& store, const fs::path& scores_file, const std::string& metric) {
  ScoreMergeReport report;
  std::map<std::string, double> accepted;
  for_each_json_line(
      scores_file,
      [&](std::size_t line, const Json& j) {
        if (!j.is_object() || !j.contains("id") || !j["id"].is_string()) {
          report.rejected.push_back({line, "missing string id"});
          return;
        }
        if (!j.contains("metric") || !j["metric"].is_string() || j["metric"].get<std::string>() != metric) {
          report.rejected.push_back({line, "metric is not '" + metric + "'"});
          return;
        }
        if (!j.contains("score") || !j["score"].is_number()) {
          report.rejected.push_back({line, "score is not a number"});
          return;
        }
        const double score = j["score"].get<double>();
        if (!std::isfinite(score)) {
          report.rejected.push_back({line, "score is not finite"});
          return;
        }
        accepted[j["id"].get<std::string>()] = score;
      },
      [&](std::size_t line, const std::string& msg) { report.rejected.push_back({line, msg}); });

  for (const auto& issue : report.rejected) {
    spdlog::warn("{}: line {} skipped: {}", scores_file.string(), issue.line, issue.message);
  }
  for (const auto& [id, score] : accepted) {
    if (store.update(id, [&](ImageRecord& r) { r.scores[metric] = score; })) {
      ++report.updated;
    } else {
      report.unmatched.push_back(id);
    }
  }
  return report;
}

}  // namespace hfaid::corpus

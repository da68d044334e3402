#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "hfaid/corpus/store.hpp"

namespace hfaid::corpus {

struct LineIssue {
  std::size_t line = 0;
  std::string message;
};

struct IngestReport {
  std::size_t scanned = 0;
  std::size_t added = 0;
  std::size_t already_present = 0;
  // Same bytes under a different path; the first path seen is kept.
  std::vector<std::string> duplicates;
  std::vector<std::string> undecodable;
};

// Adds every decodable image under `dir` (recursive, lexicographic order).
// Ids are content digests, so re-ingesting is a no-op.
IngestReport ingest_directory(Store& store, const std::filesystem::path& dir, std::size_t workers = 1,
                              bool dry_run = false);

struct CaptionImportReport {
  std::size_t updated = 0;
  std::vector<std::string> unmatched;
  std::vector<std::string> warnings;
};

// Caption sidecar: JSON Lines of {"id": "<hex>", "caption": "<text>"}.
// A malformed line aborts the import before anything is written, with the
// line number in the message. Duplicate ids: last wins, with a warning.
CaptionImportReport import_captions(Store& store, const std::filesystem::path& sidecar);

struct ScoreMergeReport {
  std::size_t updated = 0;
  std::vector<LineIssue> rejected;
  std::vector<std::string> unmatched;
};

// External scores: JSON Lines of {"id", "metric", "score"}. Lines with a
// non-finite or non-numeric score, a different metric name, or bad JSON are
// skipped and reported; the rest are merged (overwriting earlier values).
ScoreMergeReport merge_scores(Store& store, const std::filesystem::path& scores_file, const std::string& metric);

}  // namespace hfaid::corpus

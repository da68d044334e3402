#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hfaid/corpus/record.hpp"
#include "hfaid/corpus/store.hpp"

namespace hfaid::corpus {

inline constexpr const char* kManifestVersion = "hfaid-manifest/1";
inline constexpr const char* kToolVersion = "hfaid 0.1.0";

struct Provenance {
  std::string config_digest;
  std::string tool_version = kToolVersion;
  std::optional<std::uint64_t> seed;
  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct ManifestEntry {
  std::string id;
  std::string path;
  std::optional<std::string> caption;
  std::map<std::string, double> scores;
  std::map<Stage, Verdict> verdicts;
  // Synthetic-corpus ground truth.
  std::optional<std::string> label;  // "clean" | "degraded"
  std::optional<std::string> twin_id;
  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct Manifest {
  std::string version = kManifestVersion;
  Provenance provenance;
  std::vector<ManifestEntry> entries;  // ascending by id
  // Extra top-level members carried through unchanged (e.g. a funnel report).
  Json extra = Json::object();
};

using RecordFilter = std::function<bool(const ImageRecord&)>;

RecordFilter all_records();
// Records whose verdict at `stage` is pass.
RecordFilter passed_stage(Stage stage);

ManifestEntry entry_from_record(const ImageRecord& r);

// Builds the manifest in memory; entries sorted by id.
Manifest make_manifest(const Store& store, const RecordFilter& filter, Provenance provenance);

// make_manifest + write_manifest. Same store contents, filter and provenance
// always produce a byte-identical file.
Manifest export_manifest(const Store& store, const RecordFilter& filter, const std::filesystem::path& path,
                         Provenance provenance = {});

std::string serialize_manifest(const Manifest& m);
void write_manifest(const Manifest& m, const std::filesystem::path& path);
Manifest parse_manifest(const Json& j);
Manifest read_manifest(const std::filesystem::path& path);

}  // namespace hfaid::corpus

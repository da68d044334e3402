#include "hfaid/corpus/manifest.hpp"

#include <algorithm>

#include "hfaid/common/error.hpp"

namespace hfaid::corpus {

RecordFilter all_records() {
  return [](const ImageRecord&) { return true; };
}

RecordFilter passed_stage(Stage stage) {
  return [stage](const ImageRecord& r) { return r.passed(stage); };
}

ManifestEntry entry_from_record(const ImageRecord& r) {
  ManifestEntry e;
  e.id = r.id;
  e.path = r.path;
  e.caption = r.caption;
  e.scores = r.scores;
  e.verdicts = r.stage_verdicts;
  return e;
}

Manifest make_manifest(const Store& store, const RecordFilter& filter, Provenance provenance) {
  Manifest m;
  m.provenance = std::move(provenance);
  for (const auto& r : store.records()) {
    if (filter(r)) m.entries.push_back(entry_from_record(r));
  }
  return m;
}

Manifest export_manifest(const Store& store, const RecordFilter& filter, const std::filesystem::path& path,
                         Provenance provenance) {
  Manifest m = make_manifest(store, filter, std::move(provenance));
  write_manifest(m, path);
  return m;
}

namespace {

Json entry_to_json(const ManifestEntry& e) {
  Json j{{"id", e.id}, {"path", e.path}};
  j["caption"] = e.caption ? Json(*e.caption) : Json(nullptr);
  j["scores"] = Json::object();
  for (const auto& [k, v] : e.scores) j["scores"][k] = v;
  j["verdicts"] = Json::object();
  for (const auto& [stage, v] : e.verdicts) j["verdicts"][std::string(stage_name(stage))] = to_json(v);
  if (e.label) j["label"] = *e.label;
  if (e.twin_id) j["twin_id"] = *e.twin_id;
  return j;
}

ManifestEntry entry_from_json(const Json& j) {
  ManifestEntry e;
  e.id = j.at("id").get<std::string>();
  e.path = j.at("path").get<std::string>();
  if (j.contains("caption") && !j["caption"].is_null()) e.caption = j["caption"].get<std::string>();
  if (j.contains("scores")) {
    for (const auto& [k, v] : j["scores"].items()) e.scores[k] = v.get<double>();
  }
  if (j.contains("verdicts")) {
    for (const auto& [k, v] : j["verdicts"].items()) e.verdicts[parse_stage(k)] = verdict_from_json(v);
  }
  if (j.contains("label")) e.label = j["label"].get<std::string>();
  if (j.contains("twin_id")) e.twin_id = j["twin_id"].get<std::string>();
  return e;
}

}  // namespace

std::string serialize_manifest(const Manifest& m) {
  std::vector<const ManifestEntry*> sorted;
  sorted.reserve(m.entries.size());
  for (const auto& e : m.entries) sorted.push_back(&e);
  std::sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) { return a->id < b->id; });

  Json j = m.extra.is_object() ? m.extra : Json::object();
  j["version"] = m.version;
  Json prov{{"config_digest", m.provenance.config_digest}, {"tool_version", m.provenance.tool_version}};
  if (m.provenance.seed) prov["seed"] = *m.provenance.seed;
  j["provenance"] = prov;
  j["entries"] = Json::array();
  for (const auto* e : sorted) j["entries"].push_back(entry_to_json(*e));
  return j.dump(2) + "\n";
}

void write_manifest(const Manifest& m, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_manifest(m));
}

Manifest parse_manifest(const Json& j) {
  if (!j.is_object() || !j.contains("version") || !j.contains("entries")) {
    throw FormatError("manifest: missing version or entries");
  }
  Manifest m;
  m.version = j["version"].get<std::string>();
  if (m.version != kManifestVersion) throw FormatError("manifest: unsupported version '" + m.version + "'");
  if (j.contains("provenance")) {
    const auto& p = j["provenance"];
    m.provenance.config_digest = p.value("config_digest", std::string{});
    m.provenance.tool_version = p.value("tool_version", std::string{});
    if (p.contains("seed")) m.provenance.seed = p["seed"].get<std::uint64_t>();
  }
  for (const auto& e : j["entries"]) m.entries.push_back(entry_from_json(e));
  for (const auto& [k, v] : j.items()) {
    if (k != "version" && k != "provenance" && k != "entries") m.extra[k] = v;
  }
  return m;
}

Manifest read_manifest(const std::filesystem::path& path) {
  try {
    return parse_manifest(read_json_file(path));
  } catch (const Json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace hfaid::corpus

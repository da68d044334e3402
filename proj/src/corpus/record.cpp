#include "hfaid/corpus/record.hpp"

#include <cmath>

#include "hfaid/common/error.hpp"
#include "hfaid/common/hashing.hpp"

namespace hfaid::corpus {

std::string_view stage_name(Stage s) {
  switch (s) {
    case Stage::clean: return "clean";
    case Stage::quality: return "quality";
    case Stage::aesthetic: return "aesthetic";
    case Stage::human: return "human";
  }
  return "?";
}

Stage parse_stage(std::string_view name) {
  if (name == "clean") return Stage::clean;
  if (name == "quality") return Stage::quality;
  if (name == "aesthetic") return Stage::aesthetic;
  if (name == "human") return Stage::human;
  throw FormatError("unknown stage '" + std::string(name) + "'");
}

std::string_view decision_name(Decision d) {
  return d == Decision::approve ? "approve" : "reject";
}

Decision parse_decision(std::string_view name) {
  if (name == "approve") return Decision::approve;
  if (name == "reject") return Decision::reject;
  throw FormatError("unknown decision '" + std::string(name) + "'");
}

void validate(const ImageRecord& r) {
  if (!is_content_id(r.id)) throw InvalidArgument("record id '" + r.id + "' is not a 32-char hex digest");
  if (r.width < 1 || r.height < 1) {
    throw InvalidArgument("record " + r.id + ": dimensions must be >= 1, got " +
                          std::to_string(r.width) + "x" + std::to_string(r.height));
  }
  for (const auto& [stage, v] : r.stage_verdicts) {
    if (v.stage != stage) throw InvalidArgument("record " + r.id + ": verdict stage mismatch");
    if (v.status == VerdictStatus::reject && v.reason.empty()) {
      throw InvalidArgument("record " + r.id + ": reject verdict without reason");
    }
  }
  for (const auto& [metric, value] : r.scores) {
    if (!std::isfinite(value)) throw InvalidArgument("record " + r.id + ": non-finite score " + metric);
  }
}

Json to_json(const Verdict& v) {
  Json j{{"status", v.passed() ? "pass" : "reject"}, {"stage", stage_name(v.stage)}};
  if (!v.reason.empty()) j["reason"] = v.reason;
  return j;
}

Verdict verdict_from_json(const Json& j) {
  Verdict v;
  const auto status = j.at("status").get<std::string>();
  if (status == "pass") {
    v.status = VerdictStatus::pass;
  } else if (status == "reject") {
    v.status = VerdictStatus::reject;
  } else {
    throw FormatError("unknown verdict status '" + status + "'");
  }
  v.stage = parse_stage(j.at("stage").get<std::string>());
  v.reason = j.value("reason", std::string{});
  return v;
}

Json to_json(const ReviewVerdict& v) {
  Json j{{"record_id", v.record_id},
         {"reviewer_id", v.reviewer_id},
         {"decision", decision_name(v.decision)},
         {"submitted_at", v.submitted_at}};
  if (v.note) j["note"] = *v.note;
  return j;
}

ReviewVerdict review_verdict_from_json(const Json& j) {
  ReviewVerdict v;
  v.record_id = j.at("record_id").get<std::string>();
  v.reviewer_id = j.at("reviewer_id").get<std::string>();
  v.decision = parse_decision(j.at("decision").get<std::string>());
  v.submitted_at = j.value("submitted_at", std::string{});
  if (j.contains("note") && !j["note"].is_null()) v.note = j["note"].get<std::string>();
  return v;
}

Json to_json(const ImageRecord& r) {
  Json j{{"id", r.id}, {"path", r.path}, {"width", r.width}, {"height", r.height}};
  j["caption"] = r.caption ? Json(*r.caption) : Json(nullptr);
  j["scores"] = Json::object();
  for (const auto& [k, v] : r.scores) j["scores"][k] = v;
  j["verdicts"] = Json::object();
  for (const auto& [stage, v] : r.stage_verdicts) j["verdicts"][std::string(stage_name(stage))] = to_json(v);
  j["review"] = Json::array();
  for (const auto& v : r.review) j["review"].push_back(to_json(v));
  return j;
}

ImageRecord record_from_json(const Json& j) {
  ImageRecord r;
  r.id = j.at("id").get<std::string>();
  r.path = j.at("path").get<std::string>();
  r.width = j.at("width").get<int>();
  r.height = j.at("height").get<int>();
  if (j.contains("caption") && !j["caption"].is_null()) r.caption = j["caption"].get<std::string>();
  if (j.contains("scores")) {
    for (const auto& [k, v] : j["scores"].items()) r.scores[k] = v.get<double>();
  }
  if (j.contains("verdicts")) {
    for (const auto& [k, v] : j["verdicts"].items()) r.stage_verdicts[parse_stage(k)] = verdict_from_json(v);
  }
  if (j.contains("review")) {
    for (const auto& v : j["review"]) r.review.push_back(review_verdict_from_json(v));
  }
  return r;
}

}  // namespace hfaid::corpus

#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hfaid/common/json_util.hpp"

namespace hfaid::corpus {

enum class Stage { clean, quality, aesthetic, human };

std::string_view stage_name(Stage s);
Stage parse_stage(std::string_view name);

enum class VerdictStatus { pass, reject };

struct Verdict {
  VerdictStatus status = VerdictStatus::pass;
  std::string reason;  // non-empty when rejected
  Stage stage = Stage::clean;

  static Verdict pass(Stage s) { return {VerdictStatus::pass, {}, s}; }
  static Verdict reject(Stage s, std::string reason) {
    return {VerdictStatus::reject, std::move(reason), s};
  }
  bool passed() const { return status == VerdictStatus::pass; }
  friend bool operator==(const Verdict&, const Verdict&) = default;
};

enum class Decision { approve, reject };

std::string_view decision_name(Decision d);
Decision parse_decision(std::string_view name);

struct ReviewVerdict {
  std::string record_id;
  std::string reviewer_id;
  Decision decision = Decision::approve;
  std::optional<std::string> note;
  std::string submitted_at;  // ISO-8601 UTC
  friend bool operator==(const ReviewVerdict&, const ReviewVerdict&) = default;
};

struct ImageRecord {
  std::string id;
  std::string path;  // relative to the store directory
  int width = 0;
  int height = 0;
  std::optional<std::string> caption;
  std::map<std::string, double> scores;
  std::map<Stage, Verdict> stage_verdicts;
  std::vector<ReviewVerdict> review;

  bool passed(Stage s) const {
    auto it = stage_verdicts.find(s);
    return it != stage_verdicts.end() && it->second.passed();
  }
  std::optional<double> score(const std::string& metric) const {
    auto it = scores.find(metric);
    if (it == scores.end()) return std::nullopt;
    return it->second;
  }

  friend bool operator==(const ImageRecord&, const ImageRecord&) = default;
};

// Throws InvalidArgument naming the violated invariant.
void validate(const ImageRecord& r);

Json to_json(const Verdict& v);
Verdict verdict_from_json(const Json& j);
Json to_json(const ReviewVerdict& v);
ReviewVerdict review_verdict_from_json(const Json& j);
Json to_json(const ImageRecord& r);
ImageRecord record_from_json(const Json& j);

}  // namespace hfaid::corpus

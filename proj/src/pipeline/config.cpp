#include "hfaid/pipeline/config.hpp"

#include <cmath>
#include <set>

#include "hfaid/common/error.hpp"

namespace hfaid::pipeline {

std::string_view direction_name(Direction d) {
  return d == Direction::higher_better ? "higher_better" : "lower_better";
}

Direction parse_direction(std::string_view name) {
  if (name == "higher_better" || name == "higher") return Direction::higher_better;
  if (name == "lower_better" || name == "lower") return Direction::lower_better;
  throw InvalidArgument("unknown metric direction '" + std::string(name) + "'");
}

void PipelineConfig::validate() const {
  auto bad = [](const std::string& m) { throw InvalidArgument("pipeline config: " + m); };
  if (min_short_side < 1) bad("min_short_side must be >= 1");
  if (!(max_aspect_ratio >= 1.0)) bad("max_aspect_ratio must be >= 1");
  if (!(grayscale_tol >= 0.0)) bad("grayscale_tol must be >= 0");
  if (!(laplacian_min >= 0.0) || !std::isfinite(laplacian_min)) bad("laplacian_min must be finite and >= 0");
  std::set<std::string> seen;
  for (const auto& ch : metric_channels) {
    if (ch.metric.empty()) bad("metric channel with empty name");
    if (!seen.insert(ch.metric).second) bad("duplicate metric channel " + ch.metric);
    if (!(ch.percentile_keep > 0.0 && ch.percentile_keep <= 100.0)) {
      bad("percentile_keep for " + ch.metric + " must be in (0, 100]");
    }
  }
  if (aesthetic_channel.metric.empty()) bad("aesthetic metric name is empty");
  if (!std::isfinite(aesthetic_channel.min_score)) bad("aesthetic min_score must be finite");
  if (target_k < 1) bad("target_k must be >= 1");
  if (workers < 1) bad("workers must be >= 1");
}

Json PipelineConfig::to_json() const {
  Json channels = Json::array();
  for (const auto& ch : metric_channels) {
    channels.push_back({{"metric", ch.metric},
                        {"direction", std::string(direction_name(ch.direction))},
                        {"percentile_keep", ch.percentile_keep}});
  }
  return Json{{"min_short_side", min_short_side},
              {"max_aspect_ratio", max_aspect_ratio},
              {"grayscale_tol", grayscale_tol},
              {"laplacian_min", laplacian_min},
              {"metric_channels", channels},
              {"aesthetic_channel", {{"metric", aesthetic_channel.metric}, {"min_score", aesthetic_channel.min_score}}},
              {"target_k", target_k},
              {"workers", workers}};
}

PipelineConfig PipelineConfig::from_json(const Json& j) {
  static const std::set<std::string> known{"min_short_side", "max_aspect_ratio", "grayscale_tol",
                                           "laplacian_min",  "metric_channels",  "aesthetic_channel",
                                           "target_k",       "workers"};
  if (!j.is_object()) throw InvalidArgument("pipeline config must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    if (!known.contains(k)) throw InvalidArgument("pipeline config: unknown key " + k);
  }
  PipelineConfig c;
  try {
    c.min_short_side = j.value("min_short_side", c.min_short_side);
    c.max_aspect_ratio = j.value("max_aspect_ratio", c.max_aspect_ratio);
    c.grayscale_tol = j.value("grayscale_tol", c.grayscale_tol);
    c.laplacian_min = j.value("laplacian_min", c.laplacian_min);
    if (j.contains("metric_channels")) {
      c.metric_channels.clear();
      for (const auto& ch : j.at("metric_channels")) {
        c.metric_channels.push_back({ch.at("metric").get<std::string>(),
                                     parse_direction(ch.value("direction", std::string("higher_better"))),
                                     ch.value("percentile_keep", 50.0)});
      }
    }
    if (j.contains("aesthetic_channel")) {
      const auto& a = j.at("aesthetic_channel");
      c.aesthetic_channel.metric = a.value("metric", c.aesthetic_channel.metric);
      c.aesthetic_channel.min_score = a.value("min_score", c.aesthetic_channel.min_score);
    }
    c.target_k = j.value("target_k", c.target_k);
    c.workers = j.value("workers", c.workers);
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("pipeline config: ") + e.what());
  }
  c.validate();
  return c;
}

std::string PipelineConfig::digest() const {
  Json j = to_json();
  j.erase("workers");
  return json_digest(j);
}

}  // namespace hfaid::pipeline

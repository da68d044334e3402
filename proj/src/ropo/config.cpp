#include "hfaid/ropo/config.hpp"

#include <cmath>
#include <set>

#include "hfaid/common/error.hpp"

namespace hfaid::ropo {

void RopoConfig::validate() const {
  auto bad = [](const std::string& m) { throw InvalidArgument("ropo config: " + m); };
  if (positive_identifier.empty() || negative_identifier.empty()) bad("identifiers must be non-empty");
  if (positive_identifier == negative_identifier) bad("identifiers must differ");
  if (!(ratio_r >= 0.0 && ratio_r <= 1.0)) bad("ratio_r must be in [0, 1]");
  if (!(empty_caption_prob >= 0.0 && empty_caption_prob <= 1.0)) bad("empty_caption_prob must be in [0, 1]");
  if (resize_long_side < 1) bad("resize_long_side must be >= 1");
  degradation.validate();
}

Json RopoConfig::to_json() const {
  return Json{{"positive_identifier", positive_identifier},
              {"negative_identifier", negative_identifier},
              {"ratio_r", ratio_r},
              {"empty_caption_prob", empty_caption_prob},
              {"degradation", degradation.to_json()},
              {"resize_long_side", resize_long_side},
              {"materialize", materialize}};
}

RopoConfig RopoConfig::from_json(const Json& j) {
  static const std::set<std::string> known{"positive_identifier", "negative_identifier", "ratio_r",
                                           "empty_caption_prob",  "degradation",         "resize_long_side",
                                           "materialize"};
  if (!j.is_object()) throw InvalidArgument("ropo config must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    if (!known.contains(k)) throw InvalidArgument("ropo config: unknown key " + k);
  }
  RopoConfig c;
  try {
    c.positive_identifier = j.value("positive_identifier", c.positive_identifier);
    c.negative_identifier = j.value("negative_identifier", c.negative_identifier);
    c.ratio_r = j.value("ratio_r", c.ratio_r);
    c.empty_caption_prob = j.value("empty_caption_prob", c.empty_caption_prob);
    if (j.contains("degradation")) c.degradation = degrade::DegradationConfig::from_json(j["degradation"]);
    c.resize_long_side = j.value("resize_long_side", c.resize_long_side);
    c.materialize = j.value("materialize", c.materialize);
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("ropo config: ") + e.what());
  }
  c.validate();
  return c;
}

std::string RopoConfig::digest() const { return json_digest(to_json()); }

}  // namespace hfaid::ropo

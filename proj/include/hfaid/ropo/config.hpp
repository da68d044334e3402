#pragma once

#include <string>

#include "hfaid/common/json_util.hpp"
#include "hfaid/degrade/config.hpp"

namespace hfaid::ropo {

struct RopoConfig {
  std::string positive_identifier = "[X]";
  std::string negative_identifier = "[V]";
  double ratio_r = 0.8;
  double empty_caption_prob = 0.05;
  degrade::DegradationConfig degradation;
  int resize_long_side = 512;
  // When false, negatives are drawn and named but no derivative image is
  // decoded, degraded or written (manifest-only runs).
  bool materialize = true;

  void validate() const;
  Json to_json() const;
  static RopoConfig from_json(const Json& j);
  std::string digest() const;
};

}  // namespace hfaid::ropo

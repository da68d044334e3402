#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "hfaid/common/json_util.hpp"

namespace hfaid::pipeline {

enum class Direction { higher_better, lower_better };

std::string_view direction_name(Direction d);
Direction parse_direction(std::string_view name);

struct MetricChannel {
  std::string metric;
  Direction direction = Direction::higher_better;
  double percentile_keep = 50.0;  // (0, 100]
};

struct AestheticChannel {
  std::string metric = "aesthetic";
  double min_score = 0.0;
};

// Classic 8-bit blur threshold (variance 100 on the 0..255 scale),
// expressed on the [0, 1] sample scale. Recalibrate with
// calibrate_laplacian_min for a given clean set.
inline constexpr double kDefaultLaplacianMin = 100.0 / (255.0 * 255.0);

struct PipelineConfig {
  int min_short_side = 512;
  double max_aspect_ratio = 3.0;
  double grayscale_tol = 2.0 / 255.0;
  double laplacian_min = kDefaultLaplacianMin;
  std::vector<MetricChannel> metric_channels{
      {"maniqa", Direction::higher_better, 50.0},
      {"clipiqa", Direction::higher_better, 50.0},
      {"niqe", Direction::lower_better, 50.0},
  };
  AestheticChannel aesthetic_channel;
  std::size_t target_k = 5000;
  std::size_t workers = 1;

  void validate() const;
  Json to_json() const;
  static PipelineConfig from_json(const Json& j);

  // SHA-256 of the canonical JSON without `workers`, which cannot change
  // any result.
  std::string digest() const;
};

}  // namespace hfaid::pipeline

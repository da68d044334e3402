#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include "hfaid/imgproc/image.hpp"

namespace hfaid::iqa {

inline constexpr int kFeaturesPerScale = 18;
inline constexpr int kNssFeatureDim = 2 * kFeaturesPerScale;

using ScaleFeatures = std::array<double, kFeaturesPerScale>;

struct Rect {
  int x = 0, y = 0, width = 0, height = 0;
};

// Natural-scene-statistics features of one MSCN region:
//   [ggd shape, ggd variance,
//    then for each neighbour orientation H, V, D1, D2 of the pairwise
//    products: aggd shape, aggd mean, left variance, right variance].
// Products are formed over the part of the region where the neighbour also
// lies inside the region.
ScaleFeatures nss_features(const imgproc::ImagePlane& mscn, Rect region);

// 36 features: nss_features of the full image and of its x0.5 bilinear
// downsample. Accepts luma or RGB; both sides must be >= 14.
std::vector<double> brisque_features(const imgproc::ImagePlane& img);

// Optional linear scoring head (weights supplied externally):
// score = bias + sum(weights[i] * features[i]).
struct BrisqueLinearHead {
  std::vector<double> weights;
  double bias = 0.0;

  double score(const std::vector<double>& features) const;
  static BrisqueLinearHead load(const std::filesystem::path& path);
};

}  // namespace hfaid::iqa

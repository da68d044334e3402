#pragma once

#include "hfaid/imgproc/image.hpp"

namespace hfaid::iqa {

// Stabilizing constant of the divisive normalization, in [0,1] sample
// space (C = 1 on the 0..255 scale).
inline constexpr double kMscnC = 1.0 / 255.0;
inline constexpr int kMscnWindow = 7;
inline constexpr double kMscnSigma = 7.0 / 6.0;

struct MscnResult {
  imgproc::ImagePlane mscn;
  imgproc::ImagePlane sigma;  // local standard deviation field
};

// Mean-subtracted contrast-normalized coefficients
// (I - mu) / (sigma + C), with mu and sigma from a normalized 7x7 Gaussian
// window (sigma_w = 7/6) under reflect borders. Requires a 1-channel plane
// with both sides >= 7.
MscnResult mscn_with_sigma(const imgproc::ImagePlane& luma);
imgproc::ImagePlane compute_mscn(const imgproc::ImagePlane& luma);

}  // namespace hfaid::iqa

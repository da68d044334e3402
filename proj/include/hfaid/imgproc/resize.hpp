#pragma once

#include <string_view>

#include "hfaid/imgproc/image.hpp"

namespace hfaid::imgproc {

enum class Interp { nearest, bilinear, bicubic };

std::string_view interp_name(Interp i);
Interp parse_interp(std::string_view name);

// Resamples to exactly (w, h) using pixel-centre alignment
// (src = (dst + 0.5) * scale - 0.5) and replicated borders. No
// anti-aliasing prefilter is applied when shrinking. Bicubic uses the Keys
// kernel with a = -0.5 and clamps its output to [0, 1].
ImagePlane resize(const ImagePlane& img, int w, int h, Interp interp);

// Scales so the longer side equals `long_side`, then centre-crops to a
// square of the resulting shorter side.
ImagePlane resize_long_side_center_crop(const ImagePlane& img, int long_side);

}  // namespace hfaid::imgproc

#pragma once

#include <cstdint>

#include "hfaid/common/rng.hpp"
#include "hfaid/degrade/config.hpp"
#include "hfaid/imgproc/image.hpp"

namespace hfaid::degrade {

// One order of the chain: blur -> random resize -> noise -> JPEG
// round-trip, clamped to [0, 1]. The resize scale is applied to
// (ref_width, ref_height), the size of the image the whole chain started
// from, so a second order does not compound the first one's scale.
// Throws InvalidArgument when the image is smaller than the drawn kernel.
imgproc::ImagePlane degrade_once(const imgproc::ImagePlane& img, Rng& rng, const DegradationConfig& cfg,
                                 int ref_width, int ref_height);
inline imgproc::ImagePlane degrade_once(const imgproc::ImagePlane& img, Rng& rng, const DegradationConfig& cfg) {
  return degrade_once(img, rng, cfg, img.width, img.height);
}

// Output size for an input of (width, height).
void final_dimensions(const DegradationConfig& cfg, int width, int height, int& out_w, int& out_h);

// Bicubic resize to (w, h); with prob final.sinc_prob a sinc low-pass is
// applied first.
imgproc::ImagePlane final_resize(const imgproc::ImagePlane& img, Rng& rng, const DegradationConfig& cfg, int w,
                                 int h);

// The full degradation model: `orders` applications of degrade_once then final_resize, all
// drawing from Rng(seed). Pure in (img, seed, cfg). The input must fit the
// first kernel; a later order on an intermediate smaller than its kernel
// skips that blur.
imgproc::ImagePlane degrade(const imgproc::ImagePlane& img, std::uint64_t seed, const DegradationConfig& cfg);

// Zero-mean noise with per-sample sigma = scale * sqrt(x * 255) / 255,
// the Gaussian approximation of Poisson shot noise on 8-bit counts.
double shot_noise_sigma(double x, double scale);

}  // namespace hfaid::degrade

#include "hfaid/degrade/degrade.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hfaid/common/error.hpp"
#include "hfaid/degrade/kernels.hpp"
#include "hfaid/imgproc/codec.hpp"
#include "hfaid/imgproc/filter.hpp"
#include "hfaid/imgproc/resize.hpp"

namespace hfaid::degrade {
namespace {

using imgproc::ImagePlane;

imgproc::Interp pick_mode(Rng& rng, const std::array<double, 3>& weights) {
  const double total = weights[0] + weights[1] + weights[2];
  const double u = rng.uniform() * total;
  if (u < weights[0]) return imgproc::Interp::nearest;
  if (u < weights[0] + weights[1]) return imgproc::Interp::bilinear;
  return imgproc::Interp::bicubic;
}

int scaled(int n, double s) { return std::max(1, static_cast<int>(std::lround(n * s))); }

void add_noise(ImagePlane& img, Rng& rng, const NoiseConfig& cfg) {
  if (!rng.bernoulli(cfg.apply_prob)) return;
  const bool gaussian = rng.bernoulli(cfg.gaussian_prob);
  const bool gray = rng.bernoulli(cfg.gray_noise_prob);
  const double level = gaussian ? rng.uniform(cfg.gaussian_sigma_min, cfg.gaussian_sigma_max)
                                : rng.uniform(cfg.poisson_scale_min, cfg.poisson_scale_max);
  const int nc = img.channels;
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      double shared = gray ? rng.normal() : 0.0;
      if (gray && !gaussian) {
        // Gray shot noise follows the pixel's luma.
        double luma = img.at(x, y, 0);
        if (nc == 3) luma = 0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) + 0.114 * img.at(x, y, 2);
        shared *= shot_noise_sigma(luma, level);
      }
      for (int c = 0; c < nc; ++c) {
        float& v = img.at(x, y, c);
        double n;
        if (gray) {
          n = gaussian ? shared * level : shared;
        } else {
          n = rng.normal() * (gaussian ? level : shot_noise_sigma(v, level));
        }
        v = static_cast<float>(v + n);
      }
    }
  }
}

}  // namespace

double shot_noise_sigma(double x, double scale) { return scale * std::sqrt(std::max(0.0, x) * 255.0) / 255.0; }

namespace {

// strict: a too-small image is an error; otherwise the blur is skipped
// (the kernel is still drawn, so the stream stays aligned).
ImagePlane degrade_step(const ImagePlane& img, Rng& rng, const DegradationConfig& cfg, int ref_width, int ref_height,
                        bool strict) {
  if (img.channels != 3) throw InvalidArgument("degrade expects a 3-channel image");
  const auto kernel = sample_kernel(rng, cfg);
  const bool fits = img.width >= kernel.width && img.height >= kernel.height;
  if (!fits && strict) {
    throw InvalidArgument("image " + std::to_string(img.width) + "x" + std::to_string(img.height) +
                          " is smaller than the " + std::to_string(kernel.width) + "x" +
                          std::to_string(kernel.height) + " blur kernel");
  }
  ImagePlane out = fits ? imgproc::convolve2d(img, kernel, imgproc::BorderMode::reflect) : img;

  const double s = rng.uniform(cfg.resize.scale_min, cfg.resize.scale_max);
  const auto mode = pick_mode(rng, cfg.resize.mode_weights);
  out = imgproc::resize(out, scaled(ref_width, s), scaled(ref_height, s), mode);

  add_noise(out, rng, cfg.noise);
  imgproc::clamp01(out);

  const int quality = static_cast<int>(rng.uniform_int(cfg.jpeg.quality_min, cfg.jpeg.quality_max));
  out = imgproc::jpeg_roundtrip(out, quality);
  imgproc::clamp01(out);
  return out;
}

}  // namespace

ImagePlane degrade_once(const ImagePlane& img, Rng& rng, const DegradationConfig& cfg, int ref_width, int ref_height) {
  return degrade_step(img, rng, cfg, ref_width, ref_height, true);
}

void final_dimensions(const DegradationConfig& cfg, int width, int height, int& out_w, int& out_h) {
  if (cfg.final_size.width > 0) {
    out_w = cfg.final_size.width;
    out_h = cfg.final_size.height;
  } else {
    out_w = scaled(width, cfg.final_size.scale);
    out_h = scaled(height, cfg.final_size.scale);
  }
}

ImagePlane final_resize(const ImagePlane& img, Rng& rng, const DegradationConfig& cfg, int w, int h) {
  ImagePlane out = img;
  if (rng.bernoulli(cfg.final_size.sinc_prob)) {
    const int steps = (cfg.blur.kernel_size_max - cfg.blur.kernel_size_min) / 2;
    const int size = cfg.blur.kernel_size_min + 2 * static_cast<int>(rng.uniform_int(0, steps));
    const double omega = rng.uniform(std::numbers::pi / 3.0, std::numbers::pi);
    // Too-small intermediates skip the low-pass rather than fail.
    if (out.width >= size && out.height >= size) {
      out = imgproc::convolve2d(out, sinc_kernel(size, omega), imgproc::BorderMode::reflect);
    }
  }
  out = imgproc::resize(out, w, h, imgproc::Interp::bicubic);
  imgproc::clamp01(out);
  return out;
}

ImagePlane degrade(const ImagePlane& img, std::uint64_t seed, const DegradationConfig& cfg) {
  cfg.validate();
  Rng rng(seed);
  ImagePlane cur = img;
  // Only the input has to fit the kernel; a downscaled intermediate may not.
  for (int o = 0; o < cfg.orders; ++o) cur = degrade_step(cur, rng, cfg, img.width, img.height, o == 0);
  int w = 0, h = 0;
  final_dimensions(cfg, img.width, img.height, w, h);
  return final_resize(cur, rng, cfg, w, h);
}

}  // namespace hfaid::degrade

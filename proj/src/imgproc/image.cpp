#include "hfaid/imgproc/image.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hfaid/common/error.hpp"

namespace hfaid::imgproc {

ImagePlane::ImagePlane(int w, int h, int c, float fill) : width(w), height(h), channels(c) {
  if (w < 1 || h < 1) throw InvalidArgument("image dimensions must be positive");
  if (c != 1 && c != 3) throw InvalidArgument("image must have 1 or 3 channels, got " + std::to_string(c));
  data.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * static_cast<std::size_t>(c), fill);
}

void clamp01(ImagePlane& img) {
  for (auto& v : img.data) v = std::clamp(v, 0.0f, 1.0f);
}

ImagePlane extract_channel(const ImagePlane& img, int c) {
  if (c < 0 || c >= img.channels) throw InvalidArgument("channel index out of range");
  ImagePlane out(img.width, img.height, 1);
  const std::size_t n = img.pixel_count();
  for (std::size_t i = 0; i < n; ++i) out.data[i] = img.data[i * static_cast<std::size_t>(img.channels) + static_cast<std::size_t>(c)];
  return out;
}

ImagePlane crop(const ImagePlane& img, int x0, int y0, int w, int h) {
  if (x0 < 0 || y0 < 0 || w < 1 || h < 1 || x0 + w > img.width || y0 + h > img.height) {
    throw InvalidArgument("crop rectangle outside image");
  }
  ImagePlane out(w, h, img.channels);
  const std::size_t row = static_cast<std::size_t>(w) * static_cast<std::size_t>(img.channels);
  for (int y = 0; y < h; ++y) {
    const float* src = &img.data[img.index(x0, y0 + y)];
    std::copy(src, src + row, &out.data[out.index(0, y)]);
  }
  return out;
}

double mse(const ImagePlane& a, const ImagePlane& b) {
  if (a.width != b.width || a.height != b.height || a.channels != b.channels) {
    throw InvalidArgument("mse: shape mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double d = static_cast<double>(a.data[i]) - static_cast<double>(b.data[i]);
    acc += d * d;
  }
  return acc / static_cast<double>(a.data.size());
}

double psnr(const ImagePlane& a, const ImagePlane& b) {
  const double m = mse(a, b);
  if (m == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / m);
}

}  // namespace hfaid::imgproc

#pragma once

#include <cstddef>
#include <vector>

namespace hfaid::imgproc {

// Row-major float image, channel-interleaved. Samples are nominally in
// [0, 1]; operations may leave the range transiently but clamp on output.
struct ImagePlane {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<float> data;

  ImagePlane() = default;
  ImagePlane(int w, int h, int c, float fill = 0.0f);

  std::size_t index(int x, int y, int c = 0) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)) *
               static_cast<std::size_t>(channels) +
           static_cast<std::size_t>(c);
  }
  float& at(int x, int y, int c = 0) { return data[index(x, y, c)]; }
  float at(int x, int y, int c = 0) const { return data[index(x, y, c)]; }

  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }
  bool empty() const { return data.empty(); }

  friend bool operator==(const ImagePlane&, const ImagePlane&) = default;
};

void clamp01(ImagePlane& img);

// One channel of a multi-channel plane.
ImagePlane extract_channel(const ImagePlane& img, int c);

ImagePlane crop(const ImagePlane& img, int x0, int y0, int w, int h);

// Mean squared error and PSNR (peak 1.0) over all samples. Identical
// inputs give +inf PSNR.
double mse(const ImagePlane& a, const ImagePlane& b);
double psnr(const ImagePlane& a, const ImagePlane& b);

}  // namespace hfaid::imgproc

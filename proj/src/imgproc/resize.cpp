#include "hfaid/imgproc/resize.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "hfaid/common/error.hpp"

namespace hfaid::imgproc {
namespace {

// Per-output-coordinate source taps for one axis.
struct AxisTaps {
  int count = 0;  // taps per output sample
  std::vector<int> index;
  std::vector<float> weight;
};

double keys_cubic(double x) {
  constexpr double a = -0.5;
  x = std::abs(x);
  if (x <= 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
  if (x < 2.0) return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a;
  return 0.0;
}

AxisTaps make_taps(int src, int dst, Interp interp) {
  AxisTaps t;
  const double scale = static_cast<double>(src) / static_cast<double>(dst);
  t.count = interp == Interp::nearest ? 1 : (interp == Interp::bilinear ? 2 : 4);
  t.index.resize(static_cast<std::size_t>(dst) * static_cast<std::size_t>(t.count));
  t.weight.resize(t.index.size());
  for (int d = 0; d < dst; ++d) {
    const std::size_t base = static_cast<std::size_t>(d) * static_cast<std::size_t>(t.count);
    const double s = (d + 0.5) * scale - 0.5;
    if (interp == Interp::nearest) {
      const int i = static_cast<int>(std::floor((d + 0.5) * scale));
      t.index[base] = std::clamp(i, 0, src - 1);
      t.weight[base] = 1.0f;
    } else if (interp == Interp::bilinear) {
      const double sc = std::clamp(s, 0.0, static_cast<double>(src - 1));
      const int i0 = static_cast<int>(std::floor(sc));
      const int i1 = std::min(i0 + 1, src - 1);
      const double f = sc - i0;
      t.index[base] = i0;
      t.index[base + 1] = i1;
      t.weight[base] = static_cast<float>(1.0 - f);
      t.weight[base + 1] = static_cast<float>(f);
    } else {
      const int i0 = static_cast<int>(std::floor(s));
      const double f = s - i0;
      double total = 0.0;
      std::array<double, 4> w{};
      for (int k = 0; k < 4; ++k) {
        w[static_cast<std::size_t>(k)] = keys_cubic(f - (k - 1));
        total += w[static_cast<std::size_t>(k)];
      }
      for (int k = 0; k < 4; ++k) {
        t.index[base + static_cast<std::size_t>(k)] = std::clamp(i0 - 1 + k, 0, src - 1);
        t.weight[base + static_cast<std::size_t>(k)] = static_cast<float>(w[static_cast<std::size_t>(k)] / total);
      }
    }
  }
  return t;
}

}  // namespace

std::string_view interp_name(Interp i) {
  switch (i) {
    case Interp::nearest: return "nearest";
    case Interp::bilinear: return "bilinear";
    case Interp::bicubic: return "bicubic";
  }
  return "?";
}

Interp parse_interp(std::string_view name) {
  if (name == "nearest") return Interp::nearest;
  if (name == "bilinear") return Interp::bilinear;
  if (name == "bicubic") return Interp::bicubic;
  throw InvalidArgument("unknown interpolation '" + std::string(name) + "'");
}

ImagePlane resize(const ImagePlane& img, int w, int h, Interp interp) {
  if (w < 1 || h < 1) throw InvalidArgument("resize: target dimensions must be >= 1");
  if (w == img.width && h == img.height && interp == Interp::nearest) return img;
  const AxisTaps tx = make_taps(img.width, w, interp);
  const AxisTaps ty = make_taps(img.height, h, interp);
  const int nc = img.channels;

  // Horizontal pass into (w x src_h), then vertical.
  ImagePlane mid(w, img.height, nc);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t base = static_cast<std::size_t>(x) * static_cast<std::size_t>(tx.count);
      for (int c = 0; c < nc; ++c) {
        float acc = 0.0f;
        for (int k = 0; k < tx.count; ++k) {
          acc += tx.weight[base + static_cast<std::size_t>(k)] * img.at(tx.index[base + static_cast<std::size_t>(k)], y, c);
        }
        mid.at(x, y, c) = acc;
      }
    }
  }
  ImagePlane out(w, h, nc);
  const std::size_t row = static_cast<std::size_t>(w) * static_cast<std::size_t>(nc);
  for (int y = 0; y < h; ++y) {
    const std::size_t base = static_cast<std::size_t>(y) * static_cast<std::size_t>(ty.count);
    float* dst = &out.data[out.index(0, y)];
    for (int k = 0; k < ty.count; ++k) {
      const float wgt = ty.weight[base + static_cast<std::size_t>(k)];
      const float* src = &mid.data[mid.index(0, ty.index[base + static_cast<std::size_t>(k)])];
      for (std::size_t i = 0; i < row; ++i) dst[i] += wgt * src[i];
    }
  }
  if (interp == Interp::bicubic) clamp01(out);
  return out;
}

ImagePlane resize_long_side_center_crop(const ImagePlane& img, int long_side) {
  if (long_side < 1) throw InvalidArgument("long side must be >= 1");
  const double scale = static_cast<double>(long_side) / std::max(img.width, img.height);
  const int w = std::max(1, static_cast<int>(std::lround(img.width * scale)));
  const int h = std::max(1, static_cast<int>(std::lround(img.height * scale)));
  const ImagePlane scaled = (w == img.width && h == img.height) ? img : resize(img, w, h, Interp::bicubic);
  const int side = std::min(w, h);
  return crop(scaled, (w - side) / 2, (h - side) / 2, side, side);
}

}  // namespace hfaid::imgproc

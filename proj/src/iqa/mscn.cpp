#include "hfaid/iqa/mscn.hpp"

#include <array>
#include <cmath>
#include <vector>

#include "hfaid/common/error.hpp"
#include "hfaid/imgproc/filter.hpp"

namespace hfaid::iqa {
namespace {

std::array<double, kMscnWindow> window_1d() {
  std::array<double, kMscnWindow> w{};
  double total = 0.0;
  for (int i = 0; i < kMscnWindow; ++i) {
    const double d = i - kMscnWindow / 2;
    w[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * kMscnSigma * kMscnSigma));
    total += w[static_cast<std::size_t>(i)];
  }
  for (auto& v : w) v /= total;
  return w;
}

// Separable Gaussian smoothing in double precision with reflect borders.
std::vector<double> smooth(const std::vector<double>& src, int width, int height) {
  static const auto w = window_1d();
  constexpr int r = kMscnWindow / 2;
  std::vector<double> tmp(src.size()), out(src.size());
  for (int y = 0; y < height; ++y) {
    const double* row = &src[static_cast<std::size_t>(y) * static_cast<std::size_t>(width)];
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (int k = -r; k <= r; ++k) {
        acc += w[static_cast<std::size_t>(k + r)] * row[imgproc::border_index(x + k, width, imgproc::BorderMode::reflect)];
      }
      tmp[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)] = acc;
    }
  }
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (int k = -r; k <= r; ++k) {
        const int sy = imgproc::border_index(y + k, height, imgproc::BorderMode::reflect);
        acc += w[static_cast<std::size_t>(k + r)] * tmp[static_cast<std::size_t>(sy) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)];
      }
      out[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)] = acc;
    }
  }
  return out;
}

}  // namespace

MscnResult mscn_with_sigma(const imgproc::ImagePlane& luma) {
  if (luma.channels != 1) throw InvalidArgument("MSCN expects a 1-channel plane");
  if (luma.width < kMscnWindow || luma.height < kMscnWindow) {
    throw InvalidArgument("MSCN: image smaller than 7x7 (" + std::to_string(luma.width) + "x" +
                          std::to_string(luma.height) + ")");
  }
  const std::size_t n = luma.data.size();
  std::vector<double> img(n), sq(n);
  for (std::size_t i = 0; i < n; ++i) {
    img[i] = luma.data[i];
    sq[i] = img[i] * img[i];
  }
  const auto mu = smooth(img, luma.width, luma.height);
  const auto mu_sq = smooth(sq, luma.width, luma.height);
  MscnResult out{imgproc::ImagePlane(luma.width, luma.height, 1), imgproc::ImagePlane(luma.width, luma.height, 1)};
  for (std::size_t i = 0; i < n; ++i) {
    const double sigma = std::sqrt(std::abs(mu_sq[i] - mu[i] * mu[i]));
    out.sigma.data[i] = static_cast<float>(sigma);
    out.mscn.data[i] = static_cast<float>((img[i] - mu[i]) / (sigma + kMscnC));
  }
  return out;
}

imgproc::ImagePlane compute_mscn(const imgproc::ImagePlane& luma) { return mscn_with_sigma(luma).mscn; }

}  // namespace hfaid::iqa

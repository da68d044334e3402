#include "hfaid/imgproc/filter.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hfaid/common/error.hpp"

namespace hfaid::imgproc {

Kernel2D::Kernel2D(int w, int h, std::vector<double> t) : width(w), height(h), taps(std::move(t)) {
  if (w < 1 || h < 1 || w % 2 == 0 || h % 2 == 0) {
    throw InvalidArgument("kernel must be odd-sized in both dimensions, got " + std::to_string(w) + "x" +
                          std::to_string(h));
  }
  if (taps.size() != static_cast<std::size_t>(w) * static_cast<std::size_t>(h)) {
    throw InvalidArgument("kernel tap count does not match its dimensions");
  }
}

double Kernel2D::sum() const { return std::accumulate(taps.begin(), taps.end(), 0.0); }

int border_index(int i, int n, BorderMode mode) {
  if (i >= 0 && i < n) return i;
  if (mode == BorderMode::replicate || n == 1) return std::clamp(i, 0, n - 1);
  const int period = 2 * (n - 1);
  int m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - m;
}

ImagePlane convolve2d(const ImagePlane& img, const Kernel2D& kernel, BorderMode border) {
  if (kernel.width % 2 == 0 || kernel.height % 2 == 0 ||
      kernel.taps.size() != static_cast<std::size_t>(kernel.width) * static_cast<std::size_t>(kernel.height)) {
    throw InvalidArgument("convolve2d: kernel must be odd-sized");
  }
  const int rx = kernel.width / 2;
  const int ry = kernel.height / 2;
  const int pw = img.width + 2 * rx;
  const int ph = img.height + 2 * ry;
  const int nc = img.channels;

  // Flipped taps turn the loop below (a correlation) into a convolution.
  std::vector<float> flipped(kernel.taps.size());
  for (int ky = 0; ky < kernel.height; ++ky) {
    for (int kx = 0; kx < kernel.width; ++kx) {
      flipped[static_cast<std::size_t>(ky * kernel.width + kx)] =
          static_cast<float>(kernel.at(kernel.width - 1 - kx, kernel.height - 1 - ky));
    }
  }

  ImagePlane out(img.width, img.height, nc);
  std::vector<float> padded(static_cast<std::size_t>(pw) * static_cast<std::size_t>(ph));
  std::vector<int> col_map(static_cast<std::size_t>(pw));
  for (int x = 0; x < pw; ++x) col_map[static_cast<std::size_t>(x)] = border_index(x - rx, img.width, border);
  std::vector<float> acc(static_cast<std::size_t>(img.width));

  for (int c = 0; c < nc; ++c) {
    for (int y = 0; y < ph; ++y) {
      const int sy = border_index(y - ry, img.height, border);
      float* dst = &padded[static_cast<std::size_t>(y) * static_cast<std::size_t>(pw)];
      for (int x = 0; x < pw; ++x) dst[x] = img.at(col_map[static_cast<std::size_t>(x)], sy, c);
    }
    for (int y = 0; y < img.height; ++y) {
      std::fill(acc.begin(), acc.end(), 0.0f);
      for (int ky = 0; ky < kernel.height; ++ky) {
        const float* src_row = &padded[static_cast<std::size_t>(y + ky) * static_cast<std::size_t>(pw)];
        for (int kx = 0; kx < kernel.width; ++kx) {
          const float k = flipped[static_cast<std::size_t>(ky * kernel.width + kx)];
          if (k == 0.0f) continue;
          const float* s = src_row + kx;
          float* a = acc.data();
          for (int x = 0; x < img.width; ++x) a[x] += k * s[x];
        }
      }
      for (int x = 0; x < img.width; ++x) out.at(x, y, c) = acc[static_cast<std::size_t>(x)];
    }
  }
  return out;
}

Kernel2D gaussian_kernel(int size, double sigma) {
  if (size < 1 || size % 2 == 0) throw InvalidArgument("gaussian_kernel: size must be odd");
  if (!(sigma > 0.0)) throw InvalidArgument("gaussian_kernel: sigma must be positive");
  const int r = size / 2;
  std::vector<double> taps(static_cast<std::size_t>(size) * static_cast<std::size_t>(size));
  double total = 0.0;
  for (int y = -r; y <= r; ++y) {
    for (int x = -r; x <= r; ++x) {
      const double v = std::exp(-(x * x + y * y) / (2.0 * sigma * sigma));
      taps[static_cast<std::size_t>((y + r) * size + (x + r))] = v;
      total += v;
    }
  }
  for (auto& t : taps) t /= total;
  return Kernel2D(size, size, std::move(taps));
}

ImagePlane to_luma(const ImagePlane& img) {
  if (img.channels == 1) return img;
  ImagePlane out(img.width, img.height, 1);
  const std::size_t n = img.pixel_count();
  for (std::size_t i = 0; i < n; ++i) {
    const float* p = &img.data[3 * i];
    out.data[i] = 0.299f * p[0] + 0.587f * p[1] + 0.114f * p[2];
  }
  return out;
}

bool is_grayscale(const ImagePlane& img, double tol) {
  if (tol < 0.0) throw InvalidArgument("is_grayscale: tol must be >= 0");
  if (img.channels == 1) return true;
  const std::size_t n = img.pixel_count();
  for (std::size_t i = 0; i < n; ++i) {
    const double r = img.data[3 * i], g = img.data[3 * i + 1], b = img.data[3 * i + 2];
    const double spread = std::max({std::abs(r - g), std::abs(g - b), std::abs(r - b)});
    if (spread > tol) return false;
  }
  return true;
}

double laplacian_variance(const ImagePlane& luma) {
  if (luma.channels != 1) throw InvalidArgument("laplacian_variance: expects a 1-channel plane");
  if (luma.width < 3 || luma.height < 3) throw InvalidArgument("laplacian_variance: image smaller than 3x3");
  double sum = 0.0, sum_sq = 0.0;
  std::size_t n = 0;
  for (int y = 1; y + 1 < luma.height; ++y) {
    for (int x = 1; x + 1 < luma.width; ++x) {
      const double v = static_cast<double>(luma.at(x, y - 1)) + luma.at(x - 1, y) + luma.at(x + 1, y) +
                       luma.at(x, y + 1) - 4.0 * luma.at(x, y);
      sum += v;
      sum_sq += v * v;
      ++n;
    }
  }
  const double mean = sum / static_cast<double>(n);
  return std::max(0.0, sum_sq / static_cast<double>(n) - mean * mean);
}

}  // namespace hfaid::imgproc

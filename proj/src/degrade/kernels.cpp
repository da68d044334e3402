#include "hfaid/degrade/kernels.hpp"

#include <cmath>
#include <numbers>

#include "hfaid/common/error.hpp"

namespace hfaid::degrade {
namespace {

imgproc::Kernel2D normalized(int size, std::vector<double> taps) {
  double s = 0.0;
  for (double t : taps) s += t;
  if (!(s > 0.0)) throw InvalidArgument("kernel has non-positive sum");
  for (double& t : taps) t /= s;
  return imgproc::Kernel2D(size, size, std::move(taps));
}

}  // namespace

imgproc::Kernel2D anisotropic_gaussian_kernel(int size, double sigma_x, double sigma_y, double theta) {
  if (size < 1 || size % 2 == 0) throw InvalidArgument("kernel size must be odd");
  if (!(sigma_x > 0.0) || !(sigma_y > 0.0)) throw InvalidArgument("gaussian sigma must be positive");
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  // Inverse covariance R diag(1/sx^2, 1/sy^2) R^T.
  const double ix = 1.0 / (sigma_x * sigma_x);
  const double iy = 1.0 / (sigma_y * sigma_y);
  const double a = c * c * ix + s * s * iy;
  const double b = c * s * (ix - iy);
  const double d = s * s * ix + c * c * iy;
  const int r = size / 2;
  std::vector<double> taps;
  taps.reserve(static_cast<std::size_t>(size) * static_cast<std::size_t>(size));
  for (int y = -r; y <= r; ++y) {
    for (int x = -r; x <= r; ++x) {
      taps.push_back(std::exp(-0.5 * (a * x * x + 2.0 * b * x * y + d * y * y)));
    }
  }
  return normalized(size, std::move(taps));
}

imgproc::Kernel2D sinc_kernel(int size, double omega) {
  if (size < 1 || size % 2 == 0) throw InvalidArgument("kernel size must be odd");
  if (!(omega > 0.0) || omega > std::numbers::pi) throw InvalidArgument("sinc cutoff must be in (0, pi]");
  const int r = size / 2;
  std::vector<double> taps;
  taps.reserve(static_cast<std::size_t>(size) * static_cast<std::size_t>(size));
  for (int y = -r; y <= r; ++y) {
    for (int x = -r; x <= r; ++x) {
      const double d = std::hypot(static_cast<double>(x), static_cast<double>(y));
      if (d == 0.0) {
        taps.push_back(omega * omega / (4.0 * std::numbers::pi));
      } else {
        taps.push_back(omega * std::cyl_bessel_j(1.0, omega * d) / (2.0 * std::numbers::pi * d));
      }
    }
  }
  return normalized(size, std::move(taps));
}

imgproc::Kernel2D sample_kernel(Rng& rng, const DegradationConfig& cfg) {
  const auto& b = cfg.blur;
  const int steps = (b.kernel_size_max - b.kernel_size_min) / 2;
  const int size = b.kernel_size_min + 2 * static_cast<int>(rng.uniform_int(0, steps));
  if (rng.bernoulli(b.sinc_prob)) {
    return sinc_kernel(size, rng.uniform(std::numbers::pi / 3.0, std::numbers::pi));
  }
  const double sx = rng.uniform(b.sigma_min, b.sigma_max);
  if (rng.bernoulli(b.anisotropic_prob)) {
    const double sy = rng.uniform(b.sigma_min, b.sigma_max);
    const double theta = rng.uniform(-std::numbers::pi, std::numbers::pi);
    return anisotropic_gaussian_kernel(size, sx, sy, theta);
  }
  return anisotropic_gaussian_kernel(size, sx, sx, 0.0);
}

}  // namespace hfaid::degrade

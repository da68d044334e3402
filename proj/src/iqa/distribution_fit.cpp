#include "hfaid/iqa/distribution_fit.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hfaid/common/error.hpp"

namespace hfaid::iqa {
namespace {

constexpr double kGridStep = 1e-3;
constexpr std::size_t kMinSamples = 100;

struct RatioTable {
  std::vector<double> shape;
  std::vector<double> ratio;  // decreasing
};

const RatioTable& ratio_table() {
  static const RatioTable table = [] {
    RatioTable t;
    const auto n = static_cast<std::size_t>(std::lround((kMaxShape - kMinShape) / kGridStep)) + 1;
    t.shape.reserve(n);
    t.ratio.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double a = kMinShape + static_cast<double>(i) * kGridStep;
      t.shape.push_back(a);
      t.ratio.push_back(ggd_moment_ratio(a));
    }
    return t;
  }();
  return table;
}

}  // namespace

double ggd_moment_ratio(double shape) {
  // Log-gamma keeps small shapes (large arguments) from overflowing.
  return std::exp(std::lgamma(1.0 / shape) + std::lgamma(3.0 / shape) - 2.0 * std::lgamma(2.0 / shape));
}

double invert_moment_ratio(double rho) {
  const auto& t = ratio_table();
  if (!(rho < t.ratio.front())) return t.shape.front();
  if (!(rho > t.ratio.back())) return t.shape.back();
  // First grid point whose ratio drops to rho or below.
  const auto it = std::lower_bound(t.ratio.begin(), t.ratio.end(), rho, std::greater<double>());
  const auto hi_idx = static_cast<std::size_t>(it - t.ratio.begin());
  double lo = t.shape[hi_idx - 1];
  double hi = t.shape[hi_idx];
  for (int iter = 0; iter < 40; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (ggd_moment_ratio(mid) > rho) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

GgdFit fit_ggd(std::span<const double> samples) {
  if (samples.size() < kMinSamples) {
    throw InvalidArgument("fit_ggd: need at least 100 samples, got " + std::to_string(samples.size()));
  }
  const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
  if (*mn == *mx) throw InvalidArgument("fit_ggd: degenerate samples (all equal)");
  double abs_sum = 0.0, sq_sum = 0.0;
  for (double x : samples) {
    abs_sum += std::abs(x);
    sq_sum += x * x;
  }
  const double n = static_cast<double>(samples.size());
  const double mean_abs = abs_sum / n;
  const double mean_sq = sq_sum / n;
  const double rho = mean_sq / (mean_abs * mean_abs);
  return {invert_moment_ratio(rho), std::sqrt(mean_sq)};
}

AggdFit fit_aggd(std::span<const double> samples) {
  if (samples.size() < kMinSamples) {
    throw InvalidArgument("fit_aggd: need at least 100 samples, got " + std::to_string(samples.size()));
  }
  double left_sq = 0.0, right_sq = 0.0, abs_sum = 0.0;
  std::size_t left_n = 0, right_n = 0;
  for (double x : samples) {
    if (x < 0.0) {
      left_sq += x * x;
      ++left_n;
    } else if (x > 0.0) {
      right_sq += x * x;
      ++right_n;
    }
    abs_sum += std::abs(x);
  }
  if (left_n == 0 || right_n == 0) throw InvalidArgument("fit_aggd: samples must contain both signs");
  const double n = static_cast<double>(samples.size());
  const double sigma_l = std::sqrt(left_sq / static_cast<double>(left_n));
  const double sigma_r = std::sqrt(right_sq / static_cast<double>(right_n));
  const double gamma_hat = sigma_l / sigma_r;
  const double mean_abs = abs_sum / n;
  const double r_hat = mean_abs * mean_abs / ((left_sq + right_sq) / n);
  const double g2 = gamma_hat * gamma_hat;
  const double r_norm = r_hat * (g2 * gamma_hat + 1.0) * (gamma_hat + 1.0) / ((g2 + 1.0) * (g2 + 1.0));
  // r_norm estimates G(2/a)^2 / (G(1/a) G(3/a)), the reciprocal ratio.
  const double shape = invert_moment_ratio(1.0 / r_norm);
  const double mean = (sigma_r - sigma_l) * std::exp(std::lgamma(2.0 / shape) - std::lgamma(1.0 / shape)) *
                      std::sqrt(std::exp(std::lgamma(1.0 / shape) - std::lgamma(3.0 / shape)));
  return {shape, sigma_l, sigma_r, mean};
}

}  // namespace hfaid::iqa

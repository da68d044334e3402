#pragma once

#include <span>

namespace hfaid::iqa {

// Zero-mean generalized Gaussian: shape alpha, scale = standard deviation.
struct GgdFit {
  double shape = 0.0;
  double scale = 0.0;
};

// Asymmetric generalized Gaussian with separate left/right standard
// deviations and the implied mean.
struct AggdFit {
  double shape = 0.0;
  double scale_left = 0.0;
  double scale_right = 0.0;
  double mean = 0.0;
};

inline constexpr double kMinShape = 0.2;
inline constexpr double kMaxShape = 10.0;

// Gamma-function moment ratio r(a) = G(1/a) G(3/a) / G(2/a)^2; equals
// E[x^2] / E[|x|]^2 for a GGD of shape a. Strictly decreasing in a.
double ggd_moment_ratio(double shape);

// Solves ggd_moment_ratio(a) = rho on [0.2, 10]: 1e-3 grid lookup followed
// by bisection between the bracketing grid points. Out-of-range rho clamps
// to the nearest end of the interval.
double invert_moment_ratio(double rho);

// Moment-matching fits. Both require >= 100 samples; fit_ggd rejects
// all-equal samples, fit_aggd rejects single-signed samples. Failures throw
// InvalidArgument.
GgdFit fit_ggd(std::span<const double> samples);
AggdFit fit_aggd(std::span<const double> samples);

}  // namespace hfaid::iqa

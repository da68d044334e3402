#pragma once

#include "hfaid/common/rng.hpp"
#include "hfaid/degrade/config.hpp"
#include "hfaid/imgproc/filter.hpp"

namespace hfaid::degrade {

// Normalized Gaussian exp(-0.5 p^T S^-1 p) with S = R diag(sx^2, sy^2) R^T,
// R a rotation by theta radians.
imgproc::Kernel2D anisotropic_gaussian_kernel(int size, double sigma_x, double sigma_y, double theta);

// Circular low-pass kernel with cutoff omega (radians per sample):
// omega J1(omega r) / (2 pi r), truncated to size x size and normalized.
imgproc::Kernel2D sinc_kernel(int size, double omega);

// Random blur kernel. With prob sinc_prob a sinc kernel with cutoff drawn
// from [pi/3, pi]; otherwise a Gaussian, anisotropic with prob
// anisotropic_prob. The size is an odd value drawn from the configured
// range. Sums to 1.
imgproc::Kernel2D sample_kernel(Rng& rng, const DegradationConfig& cfg);

}  // namespace hfaid::degrade

#pragma once

#include <vector>

#include "hfaid/imgproc/image.hpp"

namespace hfaid::imgproc {

// Dense 2-D kernel, row-major, odd width and height.
struct Kernel2D {
  int width = 0;
  int height = 0;
  std::vector<double> taps;

  Kernel2D() = default;
  Kernel2D(int w, int h, std::vector<double> t);

  double at(int x, int y) const { return taps[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)]; }
  double sum() const;
  static Kernel2D identity() { return Kernel2D(1, 1, {1.0}); }
};

// reflect mirrors about the edge sample without repeating it
// (... c b | a b c ...); replicate repeats the edge sample.
enum class BorderMode { reflect, replicate };

// Maps an out-of-range coordinate into [0, n).
int border_index(int i, int n, BorderMode mode);

// True 2-D convolution (kernel flipped), output has the input dimensions;
// each channel is filtered independently. Throws InvalidArgument for
// even-sized kernels.
ImagePlane convolve2d(const ImagePlane& img, const Kernel2D& kernel, BorderMode border);

// Normalized isotropic Gaussian of odd `size`.
Kernel2D gaussian_kernel(int size, double sigma);

// Rec.601 luma. A 1-channel input is returned as a copy.
ImagePlane to_luma(const ImagePlane& img);

// true iff max over pixels of max(|R-G|, |G-B|, |R-B|) <= tol. 1-channel
// inputs are grayscale by construction.
bool is_grayscale(const ImagePlane& img, double tol);

// Variance of the 4-neighbour Laplacian response over the valid region.
// Requires a 1-channel plane with both sides >= 3.
double laplacian_variance(const ImagePlane& luma);

}  // namespace hfaid::imgproc

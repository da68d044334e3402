#pragma once

#include <array>

#include "hfaid/common/json_util.hpp"

namespace hfaid::degrade {

struct BlurConfig {
  int kernel_size_min = 7;  // odd; each draw picks an odd size in range
  int kernel_size_max = 21;
  double sigma_min = 0.2;
  double sigma_max = 3.0;
  double anisotropic_prob = 0.5;
  double sinc_prob = 0.1;
};

struct ResizeConfig {
  // Relative to the dimensions of the image handed to degrade().
  double scale_min = 0.15;
  double scale_max = 1.5;
  std::array<double, 3> mode_weights{1.0, 1.0, 1.0};  // nearest, bilinear, bicubic
};

struct NoiseConfig {
  double apply_prob = 1.0;
  double gaussian_prob = 0.5;  // otherwise shot noise
  double gaussian_sigma_min = 1.0 / 255.0;
  double gaussian_sigma_max = 30.0 / 255.0;
  double poisson_scale_min = 0.05;
  double poisson_scale_max = 3.0;
  double gray_noise_prob = 0.4;  // same noise field on every channel
};

struct JpegConfig {
  int quality_min = 30;
  int quality_max = 95;
};

struct FinalConfig {
  // Explicit output size when both are > 0, otherwise `scale` times the
  // input size.
  int width = 0;
  int height = 0;
  double scale = 1.0;
  double sinc_prob = 0.8;
};

struct DegradationConfig {
  int orders = 2;
  BlurConfig blur;
  ResizeConfig resize;
  NoiseConfig noise;
  JpegConfig jpeg;
  FinalConfig final_size;

  // Throws InvalidArgument naming the first bad field.
  void validate() const;

  Json to_json() const;
  // Missing keys keep their defaults; unknown keys are rejected.
  static DegradationConfig from_json(const Json& j);

  // A chain that leaves images nearly untouched: near-delta blur, unit
  // scale, no noise, JPEG quality 100, single order.
  static DegradationConfig near_identity();
};

}  // namespace hfaid::degrade

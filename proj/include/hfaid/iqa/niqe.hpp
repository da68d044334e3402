#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hfaid/common/json_util.hpp"
#include "hfaid/imgproc/image.hpp"

namespace hfaid::iqa {

inline constexpr int kNiqePatchSize = 96;
inline constexpr double kNiqeSharpnessPercentile = 75.0;
inline constexpr std::size_t kNiqeMinPatches = 50;

// Multivariate Gaussian over patch NSS features of a pristine image set.
struct NiqeModel {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  int patch_size = kNiqePatchSize;
  int feature_dim = 0;

  Json to_json() const;
  static NiqeModel from_json(const Json& j);
  void save(const std::filesystem::path& path) const;
  static NiqeModel load(const std::filesystem::path& path);
};

struct PatchFeatures {
  std::vector<double> features;  // 36 values: two scales of nss_features
  double sharpness = 0.0;        // mean local sigma over the patch
};

// Features of every full patch_size x patch_size tile of the luma plane
// (scale 1) paired with the co-located half-size tile of the x0.5 bilinear
// downsample (scale 2). Tiles whose statistics are degenerate (flat
// patches) are omitted.
std::vector<PatchFeatures> niqe_patch_features(const imgproc::ImagePlane& img, int patch_size = kNiqePatchSize);

// Fits the pristine model. Per image, only patches at or above that image's
// 75th-percentile sharpness are kept. Needs >= 10 images of at least
// patch_size on each side and >= 50 kept patches overall. The covariance
// is the maximum-likelihood (1/n) estimate.
NiqeModel fit_niqe_model(std::span<const imgproc::ImagePlane> pristine, int patch_size = kNiqePatchSize);

// sqrt((m1 - m2)^T pinv((S1 + S2) / 2) (m1 - m2)) between the model and the
// Gaussian fitted to all of the image's patches. Lower is better.
double niqe_score(const imgproc::ImagePlane& img, const NiqeModel& model);

// Linear-interpolated percentile (0..100) of unsorted values.
double percentile(std::vector<double> values, double pct);

}  // namespace hfaid::iqa

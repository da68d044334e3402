#include "hfaid/iqa/brisque.hpp"

#include <string>

#include "hfaid/common/error.hpp"
#include "hfaid/common/json_util.hpp"
#include "hfaid/imgproc/filter.hpp"
#include "hfaid/imgproc/resize.hpp"
#include "hfaid/iqa/distribution_fit.hpp"
#include "hfaid/iqa/mscn.hpp"

namespace hfaid::iqa {
namespace {

constexpr int kShifts[4][2] = {{1, 0}, {0, 1}, {1, 1}, {-1, 1}};  // (dx, dy): H, V, D1, D2

}  // namespace

ScaleFeatures nss_features(const imgproc::ImagePlane& mscn, Rect r) {
  if (mscn.channels != 1) throw InvalidArgument("nss_features expects a 1-channel MSCN plane");
  if (r.x < 0 || r.y < 0 || r.width < 2 || r.height < 2 || r.x + r.width > mscn.width ||
      r.y + r.height > mscn.height) {
    throw InvalidArgument("nss_features: region outside image");
  }
  ScaleFeatures f{};
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(r.width) * static_cast<std::size_t>(r.height));
  for (int y = r.y; y < r.y + r.height; ++y) {
    for (int x = r.x; x < r.x + r.width; ++x) values.push_back(mscn.at(x, y));
  }
  const GgdFit g = fit_ggd(values);
  f[0] = g.shape;
  f[1] = g.scale * g.scale;

  for (int o = 0; o < 4; ++o) {
    const int dx = kShifts[o][0];
    const int dy = kShifts[o][1];
    values.clear();
    for (int y = r.y; y < r.y + r.height; ++y) {
      const int ny = y + dy;
      if (ny < r.y || ny >= r.y + r.height) continue;
      for (int x = r.x; x < r.x + r.width; ++x) {
        const int nx = x + dx;
        if (nx < r.x || nx >= r.x + r.width) continue;
        values.push_back(static_cast<double>(mscn.at(x, y)) * static_cast<double>(mscn.at(nx, ny)));
      }
    }
    const AggdFit a = fit_aggd(values);
    const std::size_t base = 2 + 4 * static_cast<std::size_t>(o);
    f[base] = a.shape;
    f[base + 1] = a.mean;
    f[base + 2] = a.scale_left * a.scale_left;
    f[base + 3] = a.scale_right * a.scale_right;
  }
  return f;
}

std::vector<double> brisque_features(const imgproc::ImagePlane& img) {
  if (img.width < 14 || img.height < 14) {
    throw InvalidArgument("brisque_features: image must be at least 14x14");
  }
  const imgproc::ImagePlane luma = imgproc::to_luma(img);
  std::vector<double> out;
  out.reserve(kNssFeatureDim);
  const auto m1 = compute_mscn(luma);
  for (double v : nss_features(m1, {0, 0, m1.width, m1.height})) out.push_back(v);
  const auto half = imgproc::resize(luma, luma.width / 2, luma.height / 2, imgproc::Interp::bilinear);
  const auto m2 = compute_mscn(half);
  for (double v : nss_features(m2, {0, 0, m2.width, m2.height})) out.push_back(v);
  return out;
}

double BrisqueLinearHead::score(const std::vector<double>& features) const {
  if (features.size() != weights.size()) throw InvalidArgument("BRISQUE head: feature/weight length mismatch");
  double s = bias;
  for (std::size_t i = 0; i < features.size(); ++i) s += weights[i] * features[i];
  return s;
}

BrisqueLinearHead BrisqueLinearHead::load(const std::filesystem::path& path) {
  const Json j = read_json_file(path);
  BrisqueLinearHead head;
  try {
    head.weights = j.at("weights").get<std::vector<double>>();
    head.bias = j.value("bias", 0.0);
  } catch (const Json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  if (head.weights.size() != kNssFeatureDim) {
    throw FormatError(path.string() + ": expected 36 weights, got " + std::to_string(head.weights.size()));
  }
  return head;
}

}  // namespace hfaid::iqa

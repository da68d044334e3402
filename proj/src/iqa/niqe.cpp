#include "hfaid/iqa/niqe.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "hfaid/common/error.hpp"
#include "hfaid/common/hashing.hpp"
#include "hfaid/imgproc/filter.hpp"
#include "hfaid/imgproc/resize.hpp"
#include "hfaid/iqa/brisque.hpp"
#include "hfaid/iqa/mscn.hpp"

namespace hfaid::iqa {
namespace {

struct Gaussian {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

Gaussian fit_gaussian(const std::vector<const std::vector<double>*>& rows, int dim) {
  const auto n = static_cast<double>(rows.size());
  Gaussian g{Eigen::VectorXd::Zero(dim), Eigen::MatrixXd::Zero(dim, dim)};
  for (const auto* r : rows) g.mean += Eigen::Map<const Eigen::VectorXd>(r->data(), dim);
  g.mean /= n;
  for (const auto* r : rows) {
    const Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(r->data(), dim) - g.mean;
    g.cov.noalias() += d * d.transpose();
  }
  g.cov /= n;
  g.cov = 0.5 * (g.cov + g.cov.transpose());
  return g;
}

std::string encode_doubles(const double* data, std::size_t n) {
  std::vector<std::uint8_t> bytes(n * 8);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t bits;
    std::memcpy(&bits, &data[i], 8);
    for (int b = 0; b < 8; ++b) bytes[i * 8 + static_cast<std::size_t>(b)] = static_cast<std::uint8_t>(bits >> (8 * b));
  }
  return base64_encode(bytes);
}

std::vector<double> decode_doubles(const std::string& text, std::size_t expected) {
  const auto bytes = base64_decode(text);
  if (bytes.size() != expected * 8) throw FormatError("NIQE model: array length mismatch");
  std::vector<double> out(expected);
  for (std::size_t i = 0; i < expected; ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[i * 8 + static_cast<std::size_t>(b)]) << (8 * b);
    std::memcpy(&out[i], &bits, 8);
  }
  return out;
}

}  // namespace

double percentile(std::vector<double> values, double pct) {
  if (values.empty()) throw InvalidArgument("percentile of empty set");
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(pct, 0.0, 100.0) / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<PatchFeatures> niqe_patch_features(const imgproc::ImagePlane& img, int patch_size) {
  if (patch_size < 14 || patch_size % 2 != 0) throw InvalidArgument("NIQE patch size must be even and >= 14");
  if (img.width < patch_size || img.height < patch_size) {
    throw InvalidArgument("NIQE: image " + std::to_string(img.width) + "x" + std::to_string(img.height) +
                          " smaller than one " + std::to_string(patch_size) + "px patch");
  }
  const auto luma = imgproc::to_luma(img);
  const auto s1 = mscn_with_sigma(luma);
  const auto half = imgproc::resize(luma, luma.width / 2, luma.height / 2, imgproc::Interp::bilinear);
  const auto m2 = compute_mscn(half);
  const int half_patch = patch_size / 2;

  std::vector<PatchFeatures> out;
  for (int py = 0; py + patch_size <= luma.height; py += patch_size) {
    for (int px = 0; px + patch_size <= luma.width; px += patch_size) {
      PatchFeatures pf;
      double sharp = 0.0;
      for (int y = py; y < py + patch_size; ++y) {
        for (int x = px; x < px + patch_size; ++x) sharp += s1.sigma.at(x, y);
      }
      pf.sharpness = sharp / (static_cast<double>(patch_size) * patch_size);
      try {
        const auto f1 = nss_features(s1.mscn, {px, py, patch_size, patch_size});
        const auto f2 = nss_features(m2, {px / 2, py / 2, half_patch, half_patch});
        pf.features.assign(f1.begin(), f1.end());
        pf.features.insert(pf.features.end(), f2.begin(), f2.end());
      } catch (const InvalidArgument&) {
        continue;
      }
      out.push_back(std::move(pf));
    }
  }
  return out;
}

NiqeModel fit_niqe_model(std::span<const imgproc::ImagePlane> pristine, int patch_size) {
  if (pristine.size() < 10) {
    throw InvalidArgument("fit_niqe_model: need at least 10 pristine images, got " + std::to_string(pristine.size()));
  }
  std::vector<std::vector<double>> kept;
  for (const auto& img : pristine) {
    auto patches = niqe_patch_features(img, patch_size);
    if (patches.empty()) continue;
    std::vector<double> sharp;
    for (const auto& p : patches) sharp.push_back(p.sharpness);
    const double cut = percentile(sharp, kNiqeSharpnessPercentile);
    for (auto& p : patches) {
      if (p.sharpness >= cut && p.sharpness > 0.0) kept.push_back(std::move(p.features));
    }
  }
  if (kept.size() < kNiqeMinPatches) {
    throw InvalidArgument("fit_niqe_model: only " + std::to_string(kept.size()) + " usable patches (need " +
                          std::to_string(kNiqeMinPatches) + ")");
  }
  std::vector<const std::vector<double>*> rows;
  for (const auto& k : kept) rows.push_back(&k);
  const auto g = fit_gaussian(rows, kNssFeatureDim);
  NiqeModel m;
  m.mean = g.mean;
  m.covariance = g.cov;
  m.patch_size = patch_size;
  m.feature_dim = kNssFeatureDim;
  return m;
}

double niqe_score(const imgproc::ImagePlane& img, const NiqeModel& model) {
  const auto patches = niqe_patch_features(img, model.patch_size);
  if (patches.empty()) throw InvalidArgument("niqe_score: image has no usable patches");
  std::vector<const std::vector<double>*> rows;
  for (const auto& p : patches) rows.push_back(&p.features);
  const auto g = fit_gaussian(rows, model.feature_dim);

  const Eigen::VectorXd d = model.mean - g.mean;
  const Eigen::MatrixXd pooled = 0.5 * (model.covariance + g.cov);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(pooled);
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const double tol = std::max(lambda.cwiseAbs().maxCoeff(), 1e-300) * 1e-12 * model.feature_dim;
  const Eigen::VectorXd proj = eig.eigenvectors().transpose() * d;
  double q = 0.0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda[i] > tol) q += proj[i] * proj[i] / lambda[i];
  }
  return std::sqrt(std::max(0.0, q));
}

Json NiqeModel::to_json() const {
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = covariance;
  return Json{{"format", "hfaid-niqe/1"},
              {"patch_size", patch_size},
              {"feature_dim", feature_dim},
              {"mean", encode_doubles(mean.data(), static_cast<std::size_t>(mean.size()))},
              {"covariance", encode_doubles(rm.data(), static_cast<std::size_t>(rm.size()))}};
}

NiqeModel NiqeModel::from_json(const Json& j) {
  NiqeModel m;
  try {
    m.patch_size = j.at("patch_size").get<int>();
    m.feature_dim = j.at("feature_dim").get<int>();
    if (m.feature_dim < 1) throw FormatError("NIQE model: bad feature_dim");
    const auto f = static_cast<std::size_t>(m.feature_dim);
    const auto mean = decode_doubles(j.at("mean").get<std::string>(), f);
    const auto cov = decode_doubles(j.at("covariance").get<std::string>(), f * f);
    m.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), m.feature_dim);
    m.covariance = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        cov.data(), m.feature_dim, m.feature_dim);
  } catch (const Json::exception& e) {
    throw FormatError(std::string("NIQE model: ") + e.what());
  }
  return m;
}

void NiqeModel::save(const std::filesystem::path& path) const { write_file_atomic(path, to_json().dump(2) + "\n"); }

NiqeModel NiqeModel::load(const std::filesystem::path& path) { return from_json(read_json_file(path)); }

}  // namespace hfaid::iqa

#include "hfaid/degrade/config.hpp"

#include <cmath>
#include <set>
#include <string>

#include "hfaid/common/error.hpp"

namespace hfaid::degrade {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidArgument("degradation config: " + what);
}

void require_prob(double p, const std::string& name) {
  require(std::isfinite(p) && p >= 0.0 && p <= 1.0, name + " must be in [0, 1]");
}

void require_range(double lo, double hi, const std::string& name) {
  require(std::isfinite(lo) && std::isfinite(hi) && lo <= hi, name + " range must be ordered");
}

void reject_unknown(const Json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw InvalidArgument("degradation config: " + where + " must be an object");
  for (const auto& [k, v] : j.items()) {
    if (!known.contains(k)) throw InvalidArgument("degradation config: unknown key " + where + "." + k);
  }
}

template <typename T>
void read_pair(const Json& j, const char* key, T& lo, T& hi) {
  if (!j.contains(key)) return;
  const auto& a = j.at(key);
  if (!a.is_array() || a.size() != 2) throw InvalidArgument(std::string("degradation config: ") + key + " must be [lo, hi]");
  lo = a[0].get<T>();
  hi = a[1].get<T>();
}

template <typename T>
void read(const Json& j, const char* key, T& v) {
  if (j.contains(key)) v = j.at(key).get<T>();
}

}  // namespace

void DegradationConfig::validate() const {
  require(orders == 1 || orders == 2, "orders must be 1 or 2");
  require(blur.kernel_size_min >= 1 && blur.kernel_size_min % 2 == 1 && blur.kernel_size_max % 2 == 1 &&
              blur.kernel_size_min <= blur.kernel_size_max,
          "blur kernel sizes must be odd and ordered");
  require_range(blur.sigma_min, blur.sigma_max, "blur sigma");
  require(blur.sigma_min > 0.0, "blur sigma must be positive");
  require_prob(blur.anisotropic_prob, "blur.anisotropic_prob");
  require_prob(blur.sinc_prob, "blur.sinc_prob");
  require_range(resize.scale_min, resize.scale_max, "resize scale");
  require(resize.scale_min > 0.0, "resize scale must be positive");
  double wsum = 0.0;
  for (double w : resize.mode_weights) {
    require(std::isfinite(w) && w >= 0.0, "resize mode weights must be non-negative");
    wsum += w;
  }
  require(wsum > 0.0, "resize mode weights must not all be zero");
  require_prob(noise.apply_prob, "noise.apply_prob");
  require_prob(noise.gaussian_prob, "noise.gaussian_prob");
  require_prob(noise.gray_noise_prob, "noise.gray_noise_prob");
  require_range(noise.gaussian_sigma_min, noise.gaussian_sigma_max, "noise gaussian sigma");
  require(noise.gaussian_sigma_min >= 0.0, "noise sigma must be non-negative");
  require_range(noise.poisson_scale_min, noise.poisson_scale_max, "noise poisson scale");
  require(noise.poisson_scale_min >= 0.0, "poisson scale must be non-negative");
  require(jpeg.quality_min >= 1 && jpeg.quality_max <= 100 && jpeg.quality_min <= jpeg.quality_max,
          "jpeg quality range must be ordered within [1, 100]");
  require((final_size.width > 0) == (final_size.height > 0), "final width and height must be set together");
  require(final_size.width > 0 || (std::isfinite(final_size.scale) && final_size.scale > 0.0),
          "final scale must be positive");
  require_prob(final_size.sinc_prob, "final.sinc_prob");
}

Json DegradationConfig::to_json() const {
  return Json{
      {"orders", orders},
      {"blur",
       {{"kernel_size", {blur.kernel_size_min, blur.kernel_size_max}},
        {"sigma_range", {blur.sigma_min, blur.sigma_max}},
        {"anisotropic_prob", blur.anisotropic_prob},
        {"sinc_prob", blur.sinc_prob}}},
      {"resize",
       {{"scale_range", {resize.scale_min, resize.scale_max}},
        {"mode_weights", {{"nearest", resize.mode_weights[0]}, {"bilinear", resize.mode_weights[1]},
                          {"bicubic", resize.mode_weights[2]}}}}},
      {"noise",
       {{"apply_prob", noise.apply_prob},
        {"gaussian_prob", noise.gaussian_prob},
        {"gaussian_sigma_range", {noise.gaussian_sigma_min, noise.gaussian_sigma_max}},
        {"poisson_scale_range", {noise.poisson_scale_min, noise.poisson_scale_max}},
        {"gray_noise_prob", noise.gray_noise_prob}}},
      {"jpeg", {{"quality_range", {jpeg.quality_min, jpeg.quality_max}}}},
      {"final",
       {{"width", final_size.width},
        {"height", final_size.height},
        {"scale", final_size.scale},
        {"sinc_prob", final_size.sinc_prob}}},
  };
}

DegradationConfig DegradationConfig::from_json(const Json& j) {
  DegradationConfig c;
  try {
    reject_unknown(j, {"orders", "blur", "resize", "noise", "jpeg", "final"}, "degradation");
    read(j, "orders", c.orders);
    if (j.contains("blur")) {
      const auto& b = j["blur"];
      reject_unknown(b, {"kernel_size", "sigma_range", "anisotropic_prob", "sinc_prob"}, "blur");
      read_pair(b, "kernel_size", c.blur.kernel_size_min, c.blur.kernel_size_max);
      read_pair(b, "sigma_range", c.blur.sigma_min, c.blur.sigma_max);
      read(b, "anisotropic_prob", c.blur.anisotropic_prob);
      read(b, "sinc_prob", c.blur.sinc_prob);
    }
    if (j.contains("resize")) {
      const auto& r = j["resize"];
      reject_unknown(r, {"scale_range", "mode_weights"}, "resize");
      read_pair(r, "scale_range", c.resize.scale_min, c.resize.scale_max);
      if (r.contains("mode_weights")) {
        const auto& w = r["mode_weights"];
        reject_unknown(w, {"nearest", "bilinear", "bicubic"}, "resize.mode_weights");
        read(w, "nearest", c.resize.mode_weights[0]);
        read(w, "bilinear", c.resize.mode_weights[1]);
        read(w, "bicubic", c.resize.mode_weights[2]);
      }
    }
    if (j.contains("noise")) {
      const auto& n = j["noise"];
      reject_unknown(n, {"apply_prob", "gaussian_prob", "gaussian_sigma_range", "poisson_scale_range", "gray_noise_prob"},
                     "noise");
      read(n, "apply_prob", c.noise.apply_prob);
      read(n, "gaussian_prob", c.noise.gaussian_prob);
      read_pair(n, "gaussian_sigma_range", c.noise.gaussian_sigma_min, c.noise.gaussian_sigma_max);
      read_pair(n, "poisson_scale_range", c.noise.poisson_scale_min, c.noise.poisson_scale_max);
      read(n, "gray_noise_prob", c.noise.gray_noise_prob);
    }
    if (j.contains("jpeg")) {
      reject_unknown(j["jpeg"], {"quality_range"}, "jpeg");
      read_pair(j["jpeg"], "quality_range", c.jpeg.quality_min, c.jpeg.quality_max);
    }
    if (j.contains("final")) {
      const auto& f = j["final"];
      reject_unknown(f, {"width", "height", "scale", "sinc_prob"}, "final");
      read(f, "width", c.final_size.width);
      read(f, "height", c.final_size.height);
      read(f, "scale", c.final_size.scale);
      read(f, "sinc_prob", c.final_size.sinc_prob);
    }
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("degradation config: ") + e.what());
  }
  c.validate();
  return c;
}

DegradationConfig DegradationConfig::near_identity() {
  DegradationConfig c;
  c.orders = 1;
  c.blur.kernel_size_min = c.blur.kernel_size_max = 7;
  c.blur.sigma_min = c.blur.sigma_max = 1e-3;
  c.blur.anisotropic_prob = 0.0;
  c.blur.sinc_prob = 0.0;
  c.resize.scale_min = c.resize.scale_max = 1.0;
  c.noise.apply_prob = 0.0;
  c.jpeg.quality_min = c.jpeg.quality_max = 100;
  c.final_size.sinc_prob = 0.0;
  return c;
}

}  // namespace hfaid::degrade

#include "hfaid/fixtures/scenes.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "hfaid/common/error.hpp"
#include "hfaid/common/hashing.hpp"
#include "hfaid/common/parallel.hpp"
#include "hfaid/common/rng.hpp"
#include "hfaid/imgproc/codec.hpp"

namespace hfaid::fixtures {
namespace {

using Color = std::array<double, 3>;

Color random_color(Rng& rng) {
  // Saturated: one channel high, one low, one anywhere.
  Color c{rng.uniform(0.75, 1.0), rng.uniform(0.0, 0.25), rng.uniform()};
  for (int i = 2; i > 0; --i) std::swap(c[static_cast<std::size_t>(i)], c[static_cast<std::size_t>(rng.uniform_int(0, i))]);
  return c;
}

// Smoothly interpolated lattice noise in [-1, 1].
class ValueNoise {
 public:
  ValueNoise(Rng& rng, int w, int h, int spacing) : spacing_(spacing) {
    gw_ = w / spacing + 2;
    gh_ = h / spacing + 2;
    grid_.resize(static_cast<std::size_t>(gw_) * static_cast<std::size_t>(gh_));
    for (auto& v : grid_) v = rng.uniform(-1.0, 1.0);
  }

  double at(int x, int y) const {
    const double fx = static_cast<double>(x) / spacing_;
    const double fy = static_cast<double>(y) / spacing_;
    const int ix = static_cast<int>(fx);
    const int iy = static_cast<int>(fy);
    const double tx = smooth(fx - ix);
    const double ty = smooth(fy - iy);
    const double a = g(ix, iy) + tx * (g(ix + 1, iy) - g(ix, iy));
    const double b = g(ix, iy + 1) + tx * (g(ix + 1, iy + 1) - g(ix, iy + 1));
    return a + ty * (b - a);
  }

 private:
  static double smooth(double t) { return t * t * (3.0 - 2.0 * t); }
  double g(int x, int y) const { return grid_[static_cast<std::size_t>(y) * static_cast<std::size_t>(gw_) + static_cast<std::size_t>(x)]; }

  int spacing_;
  int gw_ = 0, gh_ = 0;
  std::vector<double> grid_;
};

struct Shape {
  int kind;  // 0 ellipse, 1 rotated rectangle, 2 stripe band
  double cx, cy, rx, ry, angle;
  Color color;
  double texture_gain;

  bool contains(double x, double y) const {
    const double c = std::cos(angle), s = std::sin(angle);
    const double u = (x - cx) * c + (y - cy) * s;
    const double v = -(x - cx) * s + (y - cy) * c;
    switch (kind) {
      case 0: return (u * u) / (rx * rx) + (v * v) / (ry * ry) <= 1.0;
      case 1: return std::abs(u) <= rx && std::abs(v) <= ry;
      default: return std::abs(u) <= rx && std::abs(v) <= ry && std::fmod(std::abs(u), 8.0) < 4.0;
    }
  }
};

}  // namespace

imgproc::ImagePlane checkerboard(int width, int height, int cell) {
  if (cell < 1) throw InvalidArgument("checkerboard cell must be >= 1");
  imgproc::ImagePlane img(width, height, 3);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const float v = ((x / cell + y / cell) % 2 == 0) ? 1.0f : 0.0f;
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = v;
    }
  }
  return img;
}

imgproc::ImagePlane scene(int width, int height, std::uint64_t seed) {
  Rng rng(seed);
  imgproc::ImagePlane img(width, height, 3);

  const Color base_a = random_color(rng);
  const Color base_b = random_color(rng);
  const double grad_angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
  std::vector<ValueNoise> octaves;
  std::vector<double> gains;
  for (int spacing : {48, 24, 12, 6, 3}) {
    octaves.emplace_back(rng, width, height, spacing);
    gains.push_back(0.05 + 0.12 * spacing / 48.0);
  }

  const int shape_count = static_cast<int>(rng.uniform_int(18, 30));
  const double span = std::min(width, height);
  std::vector<Shape> shapes;
  for (int i = 0; i < shape_count; ++i) {
    Shape s;
    s.kind = static_cast<int>(rng.uniform_int(0, 2));
    s.cx = rng.uniform(0.0, width);
    s.cy = rng.uniform(0.0, height);
    s.rx = rng.uniform(0.04, 0.22) * span;
    s.ry = rng.uniform(0.04, 0.22) * span;
    s.angle = rng.uniform(0.0, std::numbers::pi);
    s.color = random_color(rng);
    s.texture_gain = rng.uniform(0.2, 1.0);
    shapes.push_back(s);
  }

  const double ca = std::cos(grad_angle), sa = std::sin(grad_angle);
  const double diag = std::hypot(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double tex = 0.0;
      for (std::size_t o = 0; o < octaves.size(); ++o) tex += gains[o] * octaves[o].at(x, y);
      const double t = std::clamp(0.5 + ((x - width / 2.0) * ca + (y - height / 2.0) * sa) / diag, 0.0, 1.0);
      Color px;
      double gain = 1.0;
      for (int c = 0; c < 3; ++c) px[static_cast<std::size_t>(c)] = base_a[static_cast<std::size_t>(c)] * (1 - t) + base_b[static_cast<std::size_t>(c)] * t;
      for (const auto& s : shapes) {
        if (s.contains(x + 0.5, y + 0.5)) {
          px = s.color;
          gain = s.texture_gain;
        }
      }
      for (int c = 0; c < 3; ++c) {
        img.at(x, y, c) = static_cast<float>(px[static_cast<std::size_t>(c)] * (1.0 + gain * tex) + gain * 0.5 * tex);
      }
    }
  }
  imgproc::clamp01(img);
  return img;
}

std::vector<std::filesystem::path> write_scenes(const std::filesystem::path& dir, std::size_t count, int width,
                                                int height, std::uint64_t seed, std::size_t workers) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> paths(count);
  parallel_for(count, workers, [&](std::size_t i) {
    char name[64];
    std::snprintf(name, sizeof name, "scene_%llu_%04zu.png", static_cast<unsigned long long>(seed), i);
    paths[i] = dir / name;
    imgproc::save_png(scene(width, height, derive_seed(seed, std::to_string(i))), paths[i]);
  });
  return paths;
}

}  // namespace hfaid::fixtures

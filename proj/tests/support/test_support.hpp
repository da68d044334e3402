#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hfaid/corpus/record.hpp"
#include "hfaid/imgproc/filter.hpp"
#include "hfaid/imgproc/image.hpp"

namespace hfaid::test {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "hfaid-test");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::string file_sha256(const std::filesystem::path& p);
std::string read_all(const std::filesystem::path& p);
void write_all(const std::filesystem::path& p, const std::string& text);

// Uniform noise plane in [0, 1].
imgproc::ImagePlane noise_plane(int w, int h, int channels, std::uint64_t seed);
// Horizontal + vertical colour gradient.
imgproc::ImagePlane gradient_plane(int w, int h);

// ---- Independent reference implementations ------------------------------

// Mirror without repeating the edge sample, written out step by step.
int ref_reflect(int i, int n);

// Direct 2-D convolution in double precision: out(x,y) = sum k(i,j) in(x-i, y-j).
std::vector<double> ref_convolve(const imgproc::ImagePlane& plane, const imgproc::Kernel2D& k, bool replicate);

// Two-pass variance of the 4-neighbour Laplacian over interior pixels.
double ref_laplacian_variance(const imgproc::ImagePlane& luma);

// MSCN with the full 7x7 window written as a 2-D sum; sigma from the
// weighted second central moment.
std::vector<double> ref_mscn(const imgproc::ImagePlane& luma);

// Samples of a zero-mean GGD with the given shape and unit scale parameter,
// by inverting the CDF of |x| (a Gamma(1/shape) variate to the power
// 1/shape) with Boost's regularized incomplete gamma inverse.
std::vector<double> ggd_inverse_cdf_samples(double shape, std::size_t n, std::uint64_t seed);

// Brute-force keep set for one channel: the ceil(n * keep / 100) best
// indices plus everything tied with the last kept value.
std::vector<std::size_t> ref_keep_set(const std::vector<double>& scores, bool higher_better, double keep);

// Record with a valid id derived from `key` and a unique path; no file.
corpus::ImageRecord fake_record(const std::string& key, int w = 640, int h = 480);

}  // namespace hfaid::test

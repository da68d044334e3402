#include <doctest.h>

#include <cmath>

#include "hfaid/common/error.hpp"
#include "hfaid/fixtures/scenes.hpp"
#include "hfaid/imgproc/codec.hpp"
#include "hfaid/imgproc/filter.hpp"
#include "hfaid/imgproc/image.hpp"
#include "hfaid/imgproc/resize.hpp"
#include "test_support.hpp"

using namespace hfaid;
using namespace hfaid::imgproc;

TEST_CASE("decode maps 8-bit v to v/255") {
  ImagePlane img(2, 2, 3, 128.0f / 255.0f);
  const auto back = decode_image(encode_png(img));
  REQUIRE(back.width == 2);
  for (float v : back.data) CHECK(v == doctest::Approx(0.50196).epsilon(1e-5));

  ImagePlane white(2, 2, 3, 1.0f);
  for (float v : decode_image(encode_png(white)).data) CHECK(v == 1.0f);
}

TEST_CASE("decode handles grayscale PNG, JPEG and rejects junk") {
  ImagePlane gray(5, 4, 1, 0.25f);
  const auto g3 = decode_image(encode_png(gray));
  CHECK(g3.channels == 3);
  CHECK(g3.at(2, 2, 2) == doctest::Approx(64.0 / 255.0));

  const auto grad = test::gradient_plane(40, 30);
  const auto jpg = encode_jpeg(grad, 90);
  CHECK(sniff_format(jpg) == ImageFormat::jpeg);
  CHECK(decode_image(jpg).width == 40);

  std::vector<std::uint8_t> truncated(jpg.begin(), jpg.begin() + static_cast<std::ptrdiff_t>(jpg.size() / 2));
  CHECK_THROWS_AS(decode_image(truncated), FormatError);
  CHECK_THROWS_AS(decode_image(std::vector<std::uint8_t>{'h', 'e', 'l', 'l', 'o'}), FormatError);
}

TEST_CASE("luma uses Rec.601 weights") {
  ImagePlane px(3, 1, 3);
  px.at(0, 0, 0) = 1.0f;
  px.at(1, 0, 2) = 1.0f;
  for (int c = 0; c < 3; ++c) px.at(2, 0, c) = 0.4f;
  const auto y = to_luma(px);
  CHECK(y.channels == 1);
  CHECK(y.at(0, 0) == doctest::Approx(0.299));
  CHECK(y.at(1, 0) == doctest::Approx(0.114));
  CHECK(y.at(2, 0) == doctest::Approx(0.4));
  CHECK(to_luma(y) == y);
}

TEST_CASE("grayscale test") {
  ImagePlane img(4, 4, 3, 0.5f);
  CHECK(is_grayscale(img, 0.0));
  img.at(1, 2, 2) = 0.6f;
  CHECK_FALSE(is_grayscale(img, 0.05));
  CHECK(is_grayscale(img, 0.2));

  // Channel permutation of a gray image stays gray.
  ImagePlane g(3, 3, 3);
  for (int i = 0; i < 9; ++i) {
    for (int c = 0; c < 3; ++c) g.data[static_cast<std::size_t>(3 * i + c)] = 0.1f * static_cast<float>(i);
  }
  ImagePlane perm = g;
  for (std::size_t i = 0; i < 9; ++i) std::swap(perm.data[3 * i], perm.data[3 * i + 2]);
  CHECK(is_grayscale(g, 0.0) == is_grayscale(perm, 0.0));
}

TEST_CASE("laplacian variance matches the scalar reference") {
  ImagePlane flat(10, 10, 1, 0.3f);
  CHECK(laplacian_variance(flat) == 0.0);

  const auto cb = to_luma(fixtures::checkerboard(8, 8, 1));
  const double ref = test::ref_laplacian_variance(cb);
  CHECK(laplacian_variance(cb) == doctest::Approx(ref).epsilon(1e-12));
  CHECK(ref > 0.0);

  const auto noise = test::noise_plane(31, 17, 1, 3);
  CHECK(laplacian_variance(noise) == doctest::Approx(test::ref_laplacian_variance(noise)).epsilon(1e-9));

  const auto blurred = convolve2d(cb, gaussian_kernel(9, 2.0), BorderMode::reflect);
  CHECK(test::ref_laplacian_variance(blurred) < ref);
  CHECK(laplacian_variance(blurred) < laplacian_variance(cb));

  CHECK_THROWS_AS(laplacian_variance(ImagePlane(2, 5, 1)), InvalidArgument);
}

TEST_CASE("convolve2d equals the naive reference") {
  const auto plane = test::noise_plane(16, 16, 1, 11);
  std::vector<double> taps(25);
  const auto kp = test::noise_plane(5, 5, 1, 12);
  for (std::size_t i = 0; i < 25; ++i) taps[i] = kp.data[i] - 0.5;
  const Kernel2D k(5, 5, taps);
  for (bool replicate : {false, true}) {
    const auto got = convolve2d(plane, k, replicate ? BorderMode::replicate : BorderMode::reflect);
    const auto ref = test::ref_convolve(plane, k, replicate);
    for (std::size_t i = 0; i < ref.size(); ++i) CHECK(got.data[i] == doctest::Approx(ref[i]).epsilon(1e-5).scale(1));
  }

  // Asymmetric kernel on three channels: flip direction and per-channel.
  const auto rgb = test::noise_plane(9, 7, 3, 13);
  const Kernel2D asym(3, 1, {1.0, 0.0, 0.0});
  const auto got = convolve2d(rgb, asym, BorderMode::replicate);
  const auto ref = test::ref_convolve(rgb, asym, true);
  for (std::size_t i = 0; i < ref.size(); ++i) CHECK(got.data[i] == doctest::Approx(ref[i]));
}

TEST_CASE("convolve2d basic identities") {
  const auto plane = test::noise_plane(12, 9, 3, 2);
  CHECK(convolve2d(plane, Kernel2D::identity(), BorderMode::reflect) == plane);
  ImagePlane c(12, 9, 1, 0.7f);
  for (float v : convolve2d(c, gaussian_kernel(7, 1.5), BorderMode::reflect).data) CHECK(v == doctest::Approx(0.7f));
  CHECK_THROWS_AS(Kernel2D(2, 3, std::vector<double>(6, 0.0)), InvalidArgument);

  ImagePlane scaled = plane;
  for (auto& v : scaled.data) v *= 3.0f;
  const auto a = convolve2d(scaled, gaussian_kernel(5, 1.0), BorderMode::reflect);
  const auto b = convolve2d(plane, gaussian_kernel(5, 1.0), BorderMode::reflect);
  for (std::size_t i = 0; i < a.data.size(); ++i) CHECK(a.data[i] == doctest::Approx(3.0f * b.data[i]).epsilon(1e-5));
}

TEST_CASE("border index modes") {
  CHECK(border_index(-1, 5, BorderMode::reflect) == 1);
  CHECK(border_index(5, 5, BorderMode::reflect) == 3);
  CHECK(border_index(-1, 5, BorderMode::replicate) == 0);
  for (int i = -20; i < 25; ++i) CHECK(border_index(i, 5, BorderMode::reflect) == test::ref_reflect(i, 5));
}

TEST_CASE("resize") {
  const auto img = test::noise_plane(13, 7, 3, 4);
  CHECK(resize(img, 13, 7, Interp::nearest) == img);
  ImagePlane c(10, 10, 3, 0.5f);
  for (auto interp : {Interp::nearest, Interp::bilinear, Interp::bicubic}) {
    const auto r = resize(c, 7, 15, interp);
    CHECK(r.width == 7);
    CHECK(r.height == 15);
    for (float v : r.data) CHECK(v == doctest::Approx(0.5f));
  }
  // 4x4 ramp v = x + 4y (over 15) to 2x2 with centre alignment samples at
  // (0.5, 0.5), (2.5, 0.5), (0.5, 2.5), (2.5, 2.5).
  ImagePlane ramp(4, 4, 1);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) ramp.at(x, y) = static_cast<float>(x + 4 * y) / 15.0f;
  }
  const auto half = resize(ramp, 2, 2, Interp::bilinear);
  CHECK(half.at(0, 0) == doctest::Approx(2.5 / 15));
  CHECK(half.at(1, 0) == doctest::Approx(4.5 / 15));
  CHECK(half.at(0, 1) == doctest::Approx(10.5 / 15));
  CHECK(half.at(1, 1) == doctest::Approx(12.5 / 15));

  const auto up = resize(test::noise_plane(8, 8, 1, 5), 29, 31, Interp::bicubic);
  for (float v : up.data) {
    CHECK(v >= 0.0f);
    CHECK(v <= 1.0f);
  }

  const auto sq = resize_long_side_center_crop(test::noise_plane(100, 50, 3, 1), 64);
  CHECK(sq.width == 32);
  CHECK(sq.height == 32);
}

TEST_CASE("jpeg round trip") {
  const auto grad = test::gradient_plane(64, 48);
  const auto q100 = jpeg_roundtrip(grad, 100);
  const auto q10 = jpeg_roundtrip(grad, 10);
  CHECK(psnr(grad, q100) > 40.0);
  CHECK(psnr(grad, q10) < psnr(grad, q100));
  const auto odd = jpeg_roundtrip(test::noise_plane(37, 53, 3, 1), 50);
  CHECK(odd.width == 37);
  CHECK(odd.height == 53);
}

TEST_CASE("png encoding is a pure function of pixels") {
  const auto img = test::noise_plane(20, 20, 3, 8);
  CHECK(encode_png(img) == encode_png(img));
  const auto back = decode_image(encode_png(img));
  for (std::size_t i = 0; i < img.data.size(); ++i) CHECK(std::abs(back.data[i] - img.data[i]) <= 0.5f / 255.0f + 1e-6f);
}

TEST_CASE("psnr of identical images is infinite") {
  const auto img = test::noise_plane(5, 5, 3, 1);
  CHECK(std::isinf(psnr(img, img)));
  CHECK(mse(img, img) == 0.0);
}

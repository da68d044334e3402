#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "hfaid/common/error.hpp"
#include "hfaid/degrade/degrade.hpp"
#include "hfaid/fixtures/scenes.hpp"
#include "hfaid/imgproc/filter.hpp"
#include "hfaid/iqa/brisque.hpp"
#include "hfaid/iqa/distribution_fit.hpp"
#include "hfaid/iqa/external_scorer.hpp"
#include "hfaid/iqa/mscn.hpp"
#include "hfaid/iqa/niqe.hpp"
#include "test_support.hpp"

using namespace hfaid;
using namespace hfaid::iqa;
using imgproc::ImagePlane;

TEST_CASE("mscn of a constant image is zero") {
  ImagePlane c(16, 16, 1, 0.6f);
  for (float v : compute_mscn(c).data) CHECK(v == doctest::Approx(0.0).scale(1.0));
  CHECK_THROWS_AS(compute_mscn(ImagePlane(6, 20, 1)), InvalidArgument);
}

TEST_CASE("mscn matches the 2-D window reference") {
  const auto cb = imgproc::to_luma(fixtures::checkerboard(32, 24, 4));
  auto got = compute_mscn(cb);
  auto ref = test::ref_mscn(cb);
  for (std::size_t i = 0; i < ref.size(); ++i) CHECK(got.data[i] == doctest::Approx(ref[i]).epsilon(1e-5).scale(1));

  const auto scene = imgproc::to_luma(fixtures::scene(64, 64, 3));
  got = compute_mscn(scene);
  ref = test::ref_mscn(scene);
  for (std::size_t i = 0; i < ref.size(); ++i) CHECK(got.data[i] == doctest::Approx(ref[i]).epsilon(1e-5).scale(1));
}

TEST_CASE("mscn of gaussian noise is near zero mean") {
  std::mt19937_64 eng(17);
  std::normal_distribution<double> nd(0.5, 0.1);
  ImagePlane img(64, 64, 1);
  for (auto& v : img.data) v = static_cast<float>(nd(eng));
  const auto m = compute_mscn(img);
  double mean = 0.0;
  for (float v : m.data) mean += v;
  mean /= static_cast<double>(m.data.size());
  CHECK(std::abs(mean) <= 0.05);
}

TEST_CASE("ggd moment ratio inversion") {
  for (double a : {0.3, 0.5, 1.0, 2.0, 4.0, 8.0}) CHECK(invert_moment_ratio(ggd_moment_ratio(a)) == doctest::Approx(a).epsilon(1e-6));
  // Closed forms: Gaussian pi/2, Laplace 2.
  CHECK(ggd_moment_ratio(2.0) == doctest::Approx(M_PI / 2));
  CHECK(ggd_moment_ratio(1.0) == doctest::Approx(2.0));
}

TEST_CASE("fit_ggd recovers shapes from inverse-CDF samples") {
  for (double a : {0.5, 1.0, 2.0, 4.0}) {
    const auto s = test::ggd_inverse_cdf_samples(a, 100000, 1234);
    const auto fit = fit_ggd(s);
    CHECK(std::abs(fit.shape - a) / a < 0.10);
    CHECK(fit.scale > 0.0);
  }
}

TEST_CASE("fit_ggd on normal and Laplace draws") {
  std::mt19937_64 eng(5);
  std::normal_distribution<double> nd;
  std::vector<double> g(100000), l(100000);
  for (auto& v : g) v = nd(eng);
  std::exponential_distribution<double> ed(1.0);
  for (auto& v : l) v = (eng() & 1u) ? ed(eng) : -ed(eng);
  const double ag = fit_ggd(g).shape, al = fit_ggd(l).shape;
  CHECK(ag >= 1.9);
  CHECK(ag <= 2.1);
  CHECK(al >= 0.93);
  CHECK(al <= 1.07);
  CHECK(fit_ggd(g).scale == doctest::Approx(1.0).epsilon(0.02));
  CHECK_THROWS_AS(fit_ggd(std::vector<double>(200, 0.3)), InvalidArgument);
  CHECK_THROWS_AS(fit_ggd(std::vector<double>(50, 0.3)), InvalidArgument);
}

TEST_CASE("fit_aggd") {
  std::mt19937_64 eng(6);
  std::normal_distribution<double> nd;
  std::vector<double> s(50000);
  for (auto& v : s) v = nd(eng);
  const auto fit = fit_aggd(s);
  CHECK(std::abs(fit.scale_left / fit.scale_right - 1.0) < 0.05);
  CHECK(fit.shape == doctest::Approx(2.0).epsilon(0.1));

  std::vector<double> sym(s.begin(), s.begin() + 1000);
  for (std::size_t i = 0; i < 1000; ++i) sym.push_back(-sym[i]);
  CHECK(fit_aggd(sym).mean == doctest::Approx(0.0).scale(1.0));

  std::vector<double> pos(500);
  for (auto& v : pos) v = std::abs(nd(eng)) + 0.01;
  CHECK_THROWS_AS(fit_aggd(pos), InvalidArgument);

  // A stretched right tail shows up in the scales and the mean.
  std::vector<double> skew = s;
  for (auto& v : skew) if (v > 0) v *= 2.0;
  const auto sk = fit_aggd(skew);
  CHECK(sk.scale_right / sk.scale_left == doctest::Approx(2.0).epsilon(0.05));
  CHECK(sk.mean > 0.0);
}

TEST_CASE("brisque features") {
  const auto noise = test::noise_plane(96, 96, 1, 21);
  const auto f = brisque_features(noise);
  CHECK(f.size() == 36);
  for (double v : f) CHECK(std::isfinite(v));
  CHECK(brisque_features(noise) == f);

  const auto blurred = imgproc::convolve2d(noise, imgproc::gaussian_kernel(19, 3.0), imgproc::BorderMode::reflect);
  const auto fb = brisque_features(blurred);
  double d = 0.0;
  for (std::size_t i = 0; i < 36; ++i) d += (f[i] - fb[i]) * (f[i] - fb[i]);
  CHECK(std::sqrt(d) > 0.1);

  CHECK(brisque_features(fixtures::scene(40, 30, 1)).size() == 36);
  CHECK_THROWS_AS(brisque_features(ImagePlane(13, 40, 1)), InvalidArgument);
}

TEST_CASE("brisque linear head") {
  test::TempDir d;
  BrisqueLinearHead head;
  head.weights.assign(36, 0.5);
  head.bias = 1.0;
  std::vector<double> f(36, 2.0);
  CHECK(head.score(f) == doctest::Approx(37.0));

  Json j{{"weights", head.weights}, {"bias", 1.0}};
  test::write_all(d / "w.json", j.dump());
  CHECK(BrisqueLinearHead::load(d / "w.json").weights.size() == 36);
  test::write_all(d / "bad.json", Json{{"weights", {1, 2}}, {"bias", 0}}.dump());
  CHECK_THROWS_AS(BrisqueLinearHead::load(d / "bad.json"), FormatError);
}

TEST_CASE("percentile helper") {
  CHECK(percentile({1, 2, 3, 4}, 50) == doctest::Approx(2.5));
  CHECK(percentile({5, 1, 3}, 0) == 1.0);
  CHECK(percentile({5, 1, 3}, 100) == 5.0);
}

TEST_CASE("niqe model fit, persistence and scoring") {
  std::vector<ImagePlane> pristine;
  for (std::uint64_t i = 0; i < 14; ++i) pristine.push_back(fixtures::scene(384, 384, 700 + i));
  const auto model = fit_niqe_model(pristine);
  CHECK(model.feature_dim == 36);
  REQUIRE(model.mean.size() == 36);
  for (int i = 0; i < 36; ++i) CHECK(std::isfinite(model.mean(i)));
  CHECK((model.covariance - model.covariance.transpose()).cwiseAbs().maxCoeff() <= 1e-9);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(model.covariance);
  CHECK(es.eigenvalues().minCoeff() >= -1e-9);

  // Doubling the pristine set leaves the Gaussian unchanged.
  std::vector<ImagePlane> twice = pristine;
  twice.insert(twice.end(), pristine.begin(), pristine.end());
  const auto model2 = fit_niqe_model(twice);
  CHECK((model2.mean - model.mean).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((model2.covariance - model.covariance).cwiseAbs().maxCoeff() < 1e-9);

  test::TempDir d;
  model.save(d / "m.json");
  const auto loaded = NiqeModel::load(d / "m.json");
  CHECK(loaded.mean == model.mean);
  CHECK(loaded.covariance == model.covariance);
  CHECK(loaded.patch_size == model.patch_size);

  const double s0 = niqe_score(pristine[0], model);
  CHECK(std::isfinite(s0));
  CHECK(s0 >= 0.0);
  CHECK(niqe_score(pristine[0], model) == s0);
  CHECK(niqe_score(pristine[0], loaded) == s0);

  const auto cfg = degrade::DegradationConfig{};
  int ordered = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    const auto deg = degrade::degrade(pristine[i], 50 + i, cfg);
    ordered += niqe_score(deg, model) > niqe_score(pristine[i], model);
  }
  CHECK(ordered >= 3);

  CHECK_THROWS_AS(niqe_score(ImagePlane(64, 200, 3), model), InvalidArgument);
  std::vector<ImagePlane> few(pristine.begin(), pristine.begin() + 9);
  CHECK_THROWS_AS(fit_niqe_model(few), InvalidArgument);
}

TEST_CASE("niqe fit needs enough usable patches") {
  std::vector<ImagePlane> small;
  for (std::uint64_t i = 0; i < 10; ++i) small.push_back(fixtures::scene(100, 100, i));
  CHECK_THROWS_WITH_AS(fit_niqe_model(small), doctest::Contains("usable patches"), InvalidArgument);
}

#include <doctest.h>

#include <cmath>
#include <sstream>

#include "hfaid/common/error.hpp"
#include "hfaid/common/json_util.hpp"
#include "hfaid/common/rng.hpp"
#include "hfaid/diffmath/guidance.hpp"
#include "hfaid/diffmath/sampler.hpp"
#include "hfaid/diffmath/schedule.hpp"

using namespace hfaid;
using namespace hfaid::diffmath;

namespace {

struct Moments {
  double mean = 0.0;
  double var = 0.0;
};

Moments moments(const std::vector<double>& v) {
  Moments m;
  for (double x : v) m.mean += x;
  m.mean /= static_cast<double>(v.size());
  for (double x : v) m.var += (x - m.mean) * (x - m.mean);
  m.var /= static_cast<double>(v.size() - 1);
  return m;
}

}  // namespace

TEST_CASE("schedule basics") {
  const auto one = make_schedule(ScheduleKind::linear, 1, 0.01, 0.02);
  REQUIRE(one.alpha_bar.size() == 1);
  CHECK(one.alpha_bar_at(1) == doctest::Approx(0.99));

  const auto flat = make_schedule(ScheduleKind::linear, 200, 0.03, 0.03);
  for (int t = 1; t <= 200; ++t) CHECK(std::abs(flat.alpha_bar_at(t) - std::pow(0.97, t)) <= 1e-12);

  for (const auto& s : {ScheduleProfile::standard().build(), ScheduleProfile::desk().build(),
                        make_schedule(ScheduleKind::cosine, 300, 1e-4, 0.02)}) {
    double prev_snr = INFINITY;
    for (int t = 1; t <= s.T; ++t) {
      const double ab = s.alpha_bar_at(t);
      CHECK(ab > 0.0);
      CHECK(ab < 1.0);
      if (t > 1) CHECK(ab < s.alpha_bar_at(t - 1));
      const double snr = ab / (1.0 - ab);
      CHECK(snr < prev_snr);
      prev_snr = snr;
    }
  }
  CHECK(ScheduleProfile::desk().build().alpha_bar_at(50) < 1e-4);
  CHECK(ScheduleProfile::standard().build().beta_at(1000) == doctest::Approx(0.02));

  CHECK_THROWS_AS(make_schedule(ScheduleKind::linear, 0, 0.01, 0.02), InvalidArgument);
  CHECK_THROWS_AS(make_schedule(ScheduleKind::linear, 10, 0.05, 0.02), InvalidArgument);
  CHECK_THROWS_AS(make_schedule(ScheduleKind::linear, 10, 0.0, 0.02), InvalidArgument);
  CHECK(ScheduleProfile::from_json(ScheduleProfile::desk().to_json()).T == 50);
}

TEST_CASE("cosine schedule follows the squared cosine") {
  const auto s = make_schedule(ScheduleKind::cosine, 1000, 1e-4, 0.02);
  const double off = 0.008;
  auto f = [&](double t) { return std::pow(std::cos((t / 1000.0 + off) / (1.0 + off) * M_PI / 2), 2); };
  for (int t : {1, 10, 250, 500, 750}) CHECK(s.alpha_bar_at(t) == doctest::Approx(f(t) / f(0)).epsilon(1e-9));
}

TEST_CASE("forward noise and loss") {
  const auto s = ScheduleProfile::standard().build();
  const std::vector<double> x{1.0, -2.0, 0.5}, eps{0.3, 0.1, -1.0};
  for (int t : {1, 500, 1000}) {
    const auto z = forward_noise(x, t, eps, s);
    const double a = std::sqrt(s.alpha_bar_at(t)), b = std::sqrt(1.0 - s.alpha_bar_at(t));
    for (std::size_t i = 0; i < 3; ++i) CHECK(z[i] == a * x[i] + b * eps[i]);
  }
  CHECK(training_loss(eps, eps) == 0.0);
  CHECK(training_loss(std::vector<double>{1.0, 2.0}, std::vector<double>{0.0, 0.0}) == 5.0);
  CHECK_THROWS_AS(forward_noise(x, 0, eps, s), InvalidArgument);
  CHECK_THROWS_AS(forward_noise(x, 1001, eps, s), InvalidArgument);
  CHECK_THROWS_AS(forward_noise(x, 3, std::vector<double>{1.0}, s), InvalidArgument);
}

TEST_CASE("cfg mix identities") {
  const std::vector<double> p{1.0, -0.5, 2.0}, n{0.25, 4.0, -1.0};
  CHECK(cfg_mix(p, n, 0.0) == p);
  const auto one = cfg_mix(p, n, 1.0);
  for (std::size_t i = 0; i < 3; ++i) CHECK(one[i] == 2.0 * p[i] - n[i]);
  CHECK(cfg_mix(p, p, 7.5) == p);
  CHECK(cfg_mix(std::vector<double>{1.0}, std::vector<double>{1.0}, 2.0)[0] == 1.0);
  CHECK(cfg_mix(std::vector<double>{2.0}, std::vector<double>{1.0}, 1.0)[0] == 3.0);
  // Linear in lambda.
  for (double l : {0.5, 3.0, -1.0}) {
    const auto m = cfg_mix(p, n, l);
    for (std::size_t i = 0; i < 3; ++i) CHECK(m[i] == doctest::Approx(p[i] + l * (p[i] - n[i])));
  }
  CHECK_THROWS_AS(cfg_mix(p, std::vector<double>{1.0}, 1.0), InvalidArgument);
}

TEST_CASE("guided prediction calls the denoiser twice") {
  int calls = 0;
  std::vector<std::string> seen;
  Denoiser den = [&](std::span<const double> z, int, const Conditioning& c) {
    ++calls;
    seen.push_back(c.prompt);
    return State(z.size(), c.prompt == "pos" ? 2.0 : 1.0);
  };
  GuidanceConfig g{1.0, {"pos", {}}, {"neg", {}}};
  const State z(4, 0.0);
  const auto out = guided_prediction(den, z, 5, g);
  CHECK(calls == 2);
  CHECK(seen == std::vector<std::string>{"pos", "neg"});
  for (double v : out) CHECK(v == 3.0);

  Denoiser bad = [](std::span<const double>, int, const Conditioning& c) -> State {
    if (c.prompt == "neg") throw std::runtime_error("boom");
    return State(4, 0.0);
  };
  CHECK_THROWS_WITH_AS(guided_prediction(bad, z, 7, g), doctest::Contains("negative branch at t=7"), Error);
  Denoiser shape = [](std::span<const double>, int, const Conditioning&) { return State(3, 0.0); };
  CHECK_THROWS_WITH_AS(guided_prediction(shape, z, 2, g), doctest::Contains("t=2"), Error);
}

TEST_CASE("ddim with a linear denoiser matches a scalar recursion") {
  const auto s = make_schedule(ScheduleKind::linear, 20, 0.01, 0.2);
  const double a = 0.3;
  Denoiser den = [a](std::span<const double> z, int, const Conditioning&) {
    State out(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) out[i] = a * z[i];
    return out;
  };
  Rng rng(3), init(3);
  const double z0 = init.normal();
  const auto out = ddpm_sample(den, s, std::nullopt, rng, 1, {.ddim = true});
  double z = z0;
  for (int t = s.T; t >= 1; --t) {
    const double ab = s.alpha_bar_at(t), prev = t > 1 ? s.alpha_bar_at(t - 1) : 1.0;
    z = std::sqrt(prev / ab) * z + (std::sqrt(1.0 - prev) - std::sqrt(prev * (1.0 - ab) / ab)) * a * z;
  }
  CHECK(out[0] == doctest::Approx(z).epsilon(1e-12));
}

TEST_CASE("single-step sampler is deterministic given z_T") {
  const auto s = make_schedule(ScheduleKind::linear, 1, 0.1, 0.1);
  Denoiser zero = [](std::span<const double> z, int t, const Conditioning&) {
    CHECK(t == 1);
    return State(z.size(), 0.0);
  };
  Rng rng(8), init(8);
  const double z1 = init.normal();
  const auto out = ddpm_sample(zero, s, std::nullopt, rng, 1);
  CHECK(out[0] == doctest::Approx(z1 / std::sqrt(0.9)).epsilon(1e-12));
}

TEST_CASE("sampling is reproducible and writes a trajectory") {
  const auto s = ScheduleProfile::desk().build();
  const auto den = gaussian_data_denoiser(s, 1.0, 1.0);
  Rng a(11), b(11);
  std::ostringstream traj;
  const auto x = ddpm_sample(den, s, std::nullopt, a, 16, {.trajectory = &traj});
  CHECK(x == ddpm_sample(den, s, std::nullopt, b, 16));
  std::istringstream in(traj.str());
  std::string line;
  int t = 50;
  while (std::getline(in, line)) {
    const auto j = Json::parse(line);
    CHECK(j["t"] == t--);
    CHECK(j["norm"].get<double>() >= 0.0);
  }
  CHECK(t == 0);
}

TEST_CASE("exact denoiser recovers the data gaussian") {
  for (const auto& prof : {ScheduleProfile::desk(), ScheduleProfile::standard()}) {
    const auto s = prof.build();
    const auto den = gaussian_data_denoiser(s, 1.5, 0.5);
    Rng rng(77);
    const auto x = moments(ddpm_sample(den, s, std::nullopt, rng, 10000));
    CHECK(std::abs(x.mean - 1.5) / 1.5 <= 0.05);
    CHECK(std::abs(x.var - 0.25) / 0.25 <= 0.10);
  }
  const auto s = ScheduleProfile::desk().build();
  Rng rng(78);
  const auto d = moments(ddpm_sample(gaussian_data_denoiser(s, -2.0, 1.0), s, std::nullopt, rng, 10000, {.ddim = true}));
  CHECK(std::abs(d.mean + 2.0) / 2.0 <= 0.05);
  CHECK(std::abs(d.var - 1.0) <= 0.10);
}

TEST_CASE("guidance pushes samples away from the negative condition") {
  const auto s = ScheduleProfile::desk().build();
  const auto den = gaussian_data_denoiser(s, 0.0, 1.0);
  GuidanceConfig g{1.0, {"pos", {1.0}}, {"neg", {0.0}}};
  Rng rng(5);
  const auto m = moments(ddpm_sample(den, s, g, rng, 5000));
  CHECK(m.mean > 1.2);
  g.lambda_s = 0.0;
  Rng rng2(5);
  CHECK(std::abs(moments(ddpm_sample(den, s, g, rng2, 5000)).mean - 1.0) < 0.1);
}

TEST_CASE("non-finite state is reported with its step") {
  const auto s = make_schedule(ScheduleKind::linear, 5, 0.1, 0.2);
  Denoiser blowup = [](std::span<const double> z, int t, const Conditioning&) {
    return State(z.size(), t == 3 ? INFINITY : 0.0);
  };
  Rng rng(1);
  CHECK_THROWS_WITH_AS(ddpm_sample(blowup, s, std::nullopt, rng, 2), doctest::Contains("t=3"), Error);
}

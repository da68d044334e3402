#include "hfaid/diffmath/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "hfaid/common/error.hpp"

namespace hfaid::diffmath {
namespace {

void require_same(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw InvalidArgument(std::string(what) + ": shape mismatch (" + std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

std::string_view schedule_kind_name(ScheduleKind k) { return k == ScheduleKind::linear ? "linear" : "cosine"; }

ScheduleKind parse_schedule_kind(std::string_view name) {
  if (name == "linear") return ScheduleKind::linear;
  if (name == "cosine") return ScheduleKind::cosine;
  throw InvalidArgument("unknown schedule kind '" + std::string(name) + "'");
}

NoiseSchedule make_schedule(ScheduleKind kind, int T, double beta_min, double beta_max) {
  if (T < 1) throw InvalidArgument("schedule needs T >= 1");
  if (!(beta_min > 0.0 && beta_min <= beta_max && beta_max < 1.0)) {
    throw InvalidArgument("schedule needs 0 < beta_min <= beta_max < 1");
  }
  NoiseSchedule s;
  s.T = T;
  s.beta.resize(static_cast<std::size_t>(T));
  if (kind == ScheduleKind::linear) {
    for (int t = 1; t <= T; ++t) {
      const double f = T == 1 ? 0.0 : static_cast<double>(t - 1) / (T - 1);
      s.beta[static_cast<std::size_t>(t - 1)] = beta_min + f * (beta_max - beta_min);
    }
  } else {
    constexpr double offset = 0.008;
    auto f = [&](int t) {
      const double c = std::cos((static_cast<double>(t) / T + offset) / (1.0 + offset) * std::numbers::pi / 2.0);
      return c * c;
    };
    for (int t = 1; t <= T; ++t) {
      const double b = 1.0 - f(t) / f(t - 1);
      s.beta[static_cast<std::size_t>(t - 1)] = std::clamp(b, std::numeric_limits<double>::min(), 0.999);
    }
  }
  s.alpha_bar.resize(static_cast<std::size_t>(T));
  double prod = 1.0;
  for (std::size_t i = 0; i < s.beta.size(); ++i) {
    prod *= 1.0 - s.beta[i];
    s.alpha_bar[i] = prod;
  }
  return s;
}

Json ScheduleProfile::to_json() const {
  return Json{{"kind", std::string(schedule_kind_name(kind))}, {"T", T}, {"beta_min", beta_min}, {"beta_max", beta_max}};
}

ScheduleProfile ScheduleProfile::from_json(const Json& j) {
  ScheduleProfile p;
  try {
    if (j.is_string()) {
      const auto name = j.get<std::string>();
      if (name == "standard") return standard();
      if (name == "desk") return desk();
      throw InvalidArgument("unknown schedule profile '" + name + "'");
    }
    p.kind = parse_schedule_kind(j.value("kind", std::string("linear")));
    p.T = j.value("T", p.T);
    p.beta_min = j.value("beta_min", p.beta_min);
    p.beta_max = j.value("beta_max", p.beta_max);
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("schedule profile: ") + e.what());
  }
  p.build();  // validates
  return p;
}

State forward_noise(std::span<const double> x, int t, std::span<const double> eps, const NoiseSchedule& sched) {
  require_same(x.size(), eps.size(), "forward_noise");
  if (t < 1 || t > sched.T) throw InvalidArgument("forward_noise: t=" + std::to_string(t) + " outside [1, " + std::to_string(sched.T) + "]");
  const double ab = sched.alpha_bar_at(t);
  const double a = std::sqrt(ab);
  const double b = std::sqrt(1.0 - ab);
  State out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = a * x[i] + b * eps[i];
  return out;
}

double training_loss(std::span<const double> eps, std::span<const double> eps_hat) {
  require_same(eps.size(), eps_hat.size(), "training_loss");
  double s = 0.0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const double d = eps[i] - eps_hat[i];
    s += d * d;
  }
  return s;
}

}  // namespace hfaid::diffmath

#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "hfaid/common/json_util.hpp"

namespace hfaid::diffmath {

using State = std::vector<double>;

enum class ScheduleKind { linear, cosine };

std::string_view schedule_kind_name(ScheduleKind k);
ScheduleKind parse_schedule_kind(std::string_view name);

// Timesteps are 1-based: beta(t) and alpha_bar(t) for t in [1, T].
struct NoiseSchedule {
  int T = 0;
  std::vector<double> beta;       // beta[t - 1]
  std::vector<double> alpha_bar;  // alpha_bar[t - 1] = prod_{s <= t} (1 - beta_s)

  double beta_at(int t) const { return beta[static_cast<std::size_t>(t - 1)]; }
  double alpha_bar_at(int t) const { return alpha_bar[static_cast<std::size_t>(t - 1)]; }
};

// linear: beta interpolates beta_min -> beta_max (beta_min when T = 1).
// cosine: alpha_bar follows cos^2(((t/T) + s)/(1 + s) * pi/2) with
// s = 0.008; betas are back-derived, clipped to (0, 0.999] and alpha_bar
// is recomputed from them. Requires T >= 1 and 0 < beta_min <= beta_max < 1.
NoiseSchedule make_schedule(ScheduleKind kind, int T, double beta_min, double beta_max);

struct ScheduleProfile {
  ScheduleKind kind = ScheduleKind::linear;
  int T = 1000;
  double beta_min = 1e-4;
  double beta_max = 0.02;

  NoiseSchedule build() const { return make_schedule(kind, T, beta_min, beta_max); }
  Json to_json() const;
  static ScheduleProfile from_json(const Json& j);

  // The usual DDPM schedule.
  static ScheduleProfile standard() { return {}; }
  // 50 steps for desk-scale runs; the beta range is stretched so alpha_bar(T)
  // still reaches ~1e-5.
  static ScheduleProfile desk() { return {ScheduleKind::linear, 50, 2e-3, 0.4}; }
};

// sqrt(alpha_bar_t) x + sqrt(1 - alpha_bar_t) eps.
State forward_noise(std::span<const double> x, int t, std::span<const double> eps, const NoiseSchedule& sched);

// Squared L2 norm of eps - eps_hat.
double training_loss(std::span<const double> eps, std::span<const double> eps_hat);

}  // namespace hfaid::diffmath

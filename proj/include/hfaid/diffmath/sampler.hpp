#pragma once

#include <cstddef>
#include <optional>
#include <ostream>

#include "hfaid/common/rng.hpp"
#include "hfaid/diffmath/guidance.hpp"
#include "hfaid/diffmath/schedule.hpp"

namespace hfaid::diffmath {

struct SamplerOptions {
  // Deterministic DDIM (eta = 0) updates instead of ancestral DDPM.
  bool ddim = false;
  // Receives one JSON line {"t", "norm"} per step when set.
  std::ostream* trajectory = nullptr;
};

// Reverse process from z_T ~ N(0, I) of `dim` values. Each step predicts
// noise with guided_prediction (or one unconditioned call when `guidance`
// is empty) and applies
//   z_{t-1} = (z_t - beta_t / sqrt(1 - alpha_bar_t) eps) / sqrt(1 - beta_t)
//             + sqrt(beta_t) n,   n ~ N(0, I), no noise at t = 1.
// Throws Error with the step index if the state becomes non-finite.
State ddpm_sample(const Denoiser& den, const NoiseSchedule& sched, const std::optional<GuidanceConfig>& guidance,
                  Rng& rng, std::size_t dim, const SamplerOptions& opts = {});

// Exact noise predictor for data x ~ N(mean, stddev^2) per component:
// (z - sqrt(ab) E[x | z]) / sqrt(1 - ab). If the conditioning carries a
// non-empty context, context[0] replaces `mean`.
Denoiser gaussian_data_denoiser(const NoiseSchedule& sched, double mean, double stddev);

}  // namespace hfaid::diffmath

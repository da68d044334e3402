#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hfaid/diffmath/schedule.hpp"

namespace hfaid::diffmath {

// Opaque to this module: a prompt plus any extra conditioning input (the
// low-resolution image, for instance) flattened into `context`.
struct Conditioning {
  std::string prompt;
  std::vector<double> context;
};

// eps_theta(z_t, t, c): predicted noise with the shape of z_t.
using Denoiser = std::function<State(std::span<const double> z, int t, const Conditioning& c)>;

struct GuidanceConfig {
  double lambda_s = 0.0;
  Conditioning c_pos;
  Conditioning c_neg;
};

// (1 + lambda) eps_pos - lambda eps_neg, componentwise.
State cfg_mix(std::span<const double> eps_pos, std::span<const double> eps_neg, double lambda_s);

// Two denoiser calls on the same (z, t), positive first, mixed with
// cfg_mix. A failing or misshapen call is rethrown as Error naming the
// branch and timestep.
State guided_prediction(const Denoiser& den, std::span<const double> z, int t, const GuidanceConfig& g);

}  // namespace hfaid::diffmath

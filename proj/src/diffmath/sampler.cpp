#include "hfaid/diffmath/sampler.hpp"

#include <cmath>
#include <string>

#include "hfaid/common/error.hpp"
#include "hfaid/common/json_util.hpp"

namespace hfaid::diffmath {

State ddpm_sample(const Denoiser& den, const NoiseSchedule& sched, const std::optional<GuidanceConfig>& guidance,
                  Rng& rng, std::size_t dim, const SamplerOptions& opts) {
  if (sched.T < 1 || sched.beta.size() != static_cast<std::size_t>(sched.T)) {
    throw InvalidArgument("ddpm_sample: invalid schedule");
  }
  State z(dim);
  for (auto& v : z) v = rng.normal();
  const Conditioning none;
  for (int t = sched.T; t >= 1; --t) {
    State eps;
    if (guidance) {
      eps = guided_prediction(den, z, t, *guidance);
    } else {
      eps = den(z, t, none);
      if (eps.size() != dim) throw Error("denoiser returned the wrong shape at t=" + std::to_string(t));
    }
    const double beta = sched.beta_at(t);
    const double ab = sched.alpha_bar_at(t);
    if (opts.ddim) {
      const double ab_prev = t > 1 ? sched.alpha_bar_at(t - 1) : 1.0;
      for (std::size_t i = 0; i < dim; ++i) {
        const double x0 = (z[i] - std::sqrt(1.0 - ab) * eps[i]) / std::sqrt(ab);
        z[i] = std::sqrt(ab_prev) * x0 + std::sqrt(1.0 - ab_prev) * eps[i];
      }
    } else {
      const double coef = beta / std::sqrt(1.0 - ab);
      const double scale = 1.0 / std::sqrt(1.0 - beta);
      const double sigma = std::sqrt(beta);
      for (std::size_t i = 0; i < dim; ++i) {
        z[i] = (z[i] - coef * eps[i]) * scale;
        if (t > 1) z[i] += sigma * rng.normal();
      }
    }
    double norm2 = 0.0;
    for (double v : z) norm2 += v * v;
    if (!std::isfinite(norm2)) throw Error("sampler state became non-finite at step t=" + std::to_string(t));
    if (opts.trajectory) *opts.trajectory << Json{{"t", t}, {"norm", std::sqrt(norm2)}}.dump() << '\n';
  }
  return z;
}

Denoiser gaussian_data_denoiser(const NoiseSchedule& sched, double mean, double stddev) {
  if (!(stddev > 0.0)) throw InvalidArgument("gaussian_data_denoiser: stddev must be positive");
  return [sched, mean, stddev](std::span<const double> z, int t, const Conditioning& c) {
    const double m = c.context.empty() ? mean : c.context[0];
    const double ab = sched.alpha_bar_at(t);
    const double s2 = stddev * stddev;
    const double gain = std::sqrt(ab) * s2 / (ab * s2 + 1.0 - ab);
    State out(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
      const double x_hat = m + gain * (z[i] - std::sqrt(ab) * m);
      out[i] = (z[i] - std::sqrt(ab) * x_hat) / std::sqrt(1.0 - ab);
    }
    return out;
  };
}

}  // namespace hfaid::diffmath

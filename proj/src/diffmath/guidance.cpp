#include "hfaid/diffmath/guidance.hpp"

#include <cmath>
#include <string>

#include "hfaid/common/error.hpp"

namespace hfaid::diffmath {
namespace {

State evaluate(const Denoiser& den, std::span<const double> z, int t, const Conditioning& c, const char* branch) {
  State out;
  try {
    out = den(z, t, c);
  } catch (const std::exception& e) {
    throw Error(std::string("denoiser failed on the ") + branch + " branch at t=" + std::to_string(t) + ": " + e.what());
  }
  if (out.size() != z.size()) {
    throw Error(std::string("denoiser returned ") + std::to_string(out.size()) + " values for a state of " +
                std::to_string(z.size()) + " on the " + branch + " branch at t=" + std::to_string(t));
  }
  return out;
}

}  // namespace

State cfg_mix(std::span<const double> eps_pos, std::span<const double> eps_neg, double lambda_s) {
  if (eps_pos.size() != eps_neg.size()) throw InvalidArgument("cfg_mix: shape mismatch");
  if (!std::isfinite(lambda_s)) throw InvalidArgument("cfg_mix: guidance scale must be finite");
  State out(eps_pos.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (1.0 + lambda_s) * eps_pos[i] - lambda_s * eps_neg[i];
  return out;
}

State guided_prediction(const Denoiser& den, std::span<const double> z, int t, const GuidanceConfig& g) {
  const State pos = evaluate(den, z, t, g.c_pos, "positive");
  const State neg = evaluate(den, z, t, g.c_neg, "negative");
  return cfg_mix(pos, neg, g.lambda_s);
}

}  // namespace hfaid::diffmath

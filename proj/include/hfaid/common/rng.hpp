#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace hfaid {

// Seeded random stream. The engine is std::mt19937_64, whose output sequence
// is fixed by the standard; the distributions are implemented here rather
// than with <random> distributions, whose algorithms are unspecified and
// differ between standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of resolution.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [lo, hi], both inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  // Standard normal (Marsaglia polar method, spare value cached).
  double normal();
  bool bernoulli(double p) { return uniform() < p; }

  // Independent child stream keyed by `key`.
  Rng fork(std::string_view key) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace hfaid

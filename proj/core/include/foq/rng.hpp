#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace foq {

// One independent generator per stochastic decision point. Streams are keyed
// by (experiment seed, name, index), so adding a stream never perturbs the
// draws of another.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::string_view name, std::uint64_t index = 0);

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // True with probability p.
  bool bernoulli(double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return uniform() < p;
  }

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t stream_seed(std::uint64_t seed, std::string_view name, std::uint64_t index);

}  // namespace foq

#pragma once

#include <cmath>
#include <cstdint>

namespace foq {

// Simulation time in integer nanoseconds.
using SimTime = std::int64_t;
// Line and source rates in bits per second.
using BitRate = std::uint64_t;
using Bytes = std::uint64_t;
using FlowId = std::uint32_t;
using PortId = std::int32_t;

__extension__ using u128 = unsigned __int128;

inline constexpr SimTime kNanosPerSecond = 1'000'000'000;

constexpr double to_seconds(SimTime t) {
  return static_cast<double>(t) / static_cast<double>(kNanosPerSecond);
}

inline SimTime from_seconds(double seconds) {
  return static_cast<SimTime>(std::llround(seconds * static_cast<double>(kNanosPerSecond)));
}

// Serialization delay of `bits` at `rate`, carrying the sub-nanosecond
// remainder between calls so a continuously busy line keeps its exact
// long-run rate.
class RateClock {
 public:
  explicit RateClock(BitRate rate) : rate_(rate) {}

  SimTime transmit(std::uint64_t bits) {
    const u128 scaled =
        static_cast<u128>(bits) * kNanosPerSecond + remainder_;
    remainder_ = static_cast<std::uint64_t>(scaled % rate_);
    return static_cast<SimTime>(scaled / rate_);
  }

  BitRate rate() const { return rate_; }

 private:
  BitRate rate_;
  std::uint64_t remainder_ = 0;
};

}  // namespace foq

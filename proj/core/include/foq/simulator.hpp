#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "foq/units.hpp"

namespace foq {

// Ordering among events scheduled for the same instant: port index, then flow
// id, then insertion order.
struct EventKey {
  PortId port = std::numeric_limits<PortId>::max();
  FlowId flow = std::numeric_limits<FlowId>::max();
};

// Single-threaded discrete-event loop.
class Simulator {
 public:
  using Callback = std::function<void()>;

  SimTime now() const { return now_; }

  void schedule_at(SimTime at, EventKey key, Callback fn);
  void schedule_in(SimTime delay, EventKey key, Callback fn) {
    schedule_at(now_ + delay, key, std::move(fn));
  }

  // Runs events with timestamp < until, then advances the clock to `until`.
  void run_until(SimTime until);
  // Same, but also runs the events stamped exactly `until`.
  void run_through(SimTime until);

  std::uint64_t events_processed() const { return processed_; }
  std::size_t pending() const { return heap_.size(); }

 private:
  void drain(SimTime until, bool inclusive);

  struct Entry {
    SimTime at;
    PortId port;
    FlowId flow;
    std::uint64_t seq;
    std::uint32_t slot;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.at != b.at) return a.at > b.at;
      if (a.port != b.port) return a.port > b.port;
      if (a.flow != b.flow) return a.flow > b.flow;
      return a.seq > b.seq;
    }
  };

  SimTime now_ = 0;
  std::uint64_t seq_ = 0;
  std::uint64_t processed_ = 0;
  std::vector<Entry> heap_;
  std::vector<Callback> slots_;
  std::vector<std::uint32_t> free_slots_;
};

}  // namespace foq

#include "foq/simulator.hpp"

#include <algorithm>
#include <stdexcept>

namespace foq {

void Simulator::schedule_at(SimTime at, EventKey key, Callback fn) {
  if (at < now_) throw std::logic_error("event scheduled in the past");
  std::uint32_t slot;
  if (free_slots_.empty()) {
    slot = static_cast<std::uint32_t>(slots_.size());
    slots_.push_back(std::move(fn));
  } else {
    slot = free_slots_.back();
    free_slots_.pop_back();
    slots_[slot] = std::move(fn);
  }
  heap_.push_back({at, key.port, key.flow, seq_++, slot});
  std::push_heap(heap_.begin(), heap_.end(), Later{});
}

void Simulator::run_until(SimTime until) { drain(until, false); }

void Simulator::run_through(SimTime until) { drain(until, true); }

void Simulator::drain(SimTime until, bool inclusive) {
  while (!heap_.empty() &&
         (heap_.front().at < until || (inclusive && heap_.front().at == until))) {
    std::pop_heap(heap_.begin(), heap_.end(), Later{});
    const Entry e = heap_.back();
    heap_.pop_back();
    now_ = e.at;
    Callback fn = std::move(slots_[e.slot]);
    slots_[e.slot] = nullptr;
    free_slots_.push_back(e.slot);
    ++processed_;
    fn();
  }
  now_ = std::max(now_, until);
}

}  // namespace foq

#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "foq/packet.hpp"
#include "foq/units.hpp"

namespace foq {

enum class FabricResult : std::uint8_t { Queued, Dropped };

// Shared-memory fabric with one FIFO per (output port, priority level).
// Level 0 is the highest priority. Lower levels may only fill the memory up to
// `memory - reserve`; the reserve keeps room for the high-priority queue.
// A full fabric tail-drops the arriving packet whatever its flow.
class Fabric {
 public:
  Fabric(int num_ports, int priorities, Bytes memory, Bytes reserve);

  FabricResult enqueue(const Packet& packet, int priority);

  // Head of the highest non-empty priority queue of `port`.
  std::optional<Packet> dequeue(PortId port);

  bool empty(PortId port) const { return port_bytes_[index(port)] == 0; }
  Bytes occupancy() const { return occupancy_; }
  Bytes port_backlog(PortId port) const { return port_bytes_[index(port)]; }
  Bytes memory() const { return memory_; }
  Bytes admission_limit(int priority) const {
    return priority == 0 ? memory_ : memory_ - reserve_;
  }
  int priorities() const { return priorities_; }

  // Bytes of `flow` queued for `port`; walks the queues.
  Bytes flow_backlog(PortId port, FlowId flow) const;

 private:
  std::size_t index(PortId port) const { return static_cast<std::size_t>(port); }

  int priorities_;
  Bytes memory_;
  Bytes reserve_;
  Bytes occupancy_ = 0;
  std::vector<std::vector<std::deque<Packet>>> queues_;  // [port][priority]
  std::vector<Bytes> port_bytes_;
};

}  // namespace foq

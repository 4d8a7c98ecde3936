#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <variant>

#include "foq/control_law.hpp"
#include "foq/packet.hpp"
#include "foq/switch_config.hpp"
#include "foq/units.hpp"

namespace foq {

// Per-interval traffic at one OUT queue.
struct IntervalCounters {
  Bytes in_bytes = 0;
  Bytes out_bytes = 0;
  Bytes dropped_bytes = 0;
  std::uint64_t in_packets = 0;
  std::uint64_t out_packets = 0;
  std::uint64_t dropped_packets = 0;
};

struct QueuedPacket {
  Packet packet;
  double finish_tag = 0.0;  // WFQ virtual finish time, bytes / weight
};

using ControllerState = std::variant<std::monostate, PiState, GbState>;

struct OutQueueState {
  FlowId flow = 0;
  ServiceClass service_class = ServiceClass::Assured;
  double weight = 1.0;
  QueueManagement queue_mgmt = DropTail{};
  Bytes capacity = 0;

  std::deque<QueuedPacket> packets;
  Bytes backlog = 0;
  double red_avg = 0.0;
  double last_finish = 0.0;
  IntervalCounters counters;
  ControllerState controller;
  double service_rate_estimate = 0.0;  // r_O over the last interval, bits/s
};

struct OutPortState {
  std::map<FlowId, OutQueueState> queues;  // ordered by flow id
  double virtual_time = 0.0;
};

}  // namespace foq

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "foq/control_law.hpp"
#include "foq/packet.hpp"
#include "foq/units.hpp"

namespace foq {

struct DropTail {};

struct RedParams {
  double max_p = 0.5;
  Bytes min_th = 1000;
  Bytes max_th = 3000;
  double weight = 0.1;                 // EWMA weight w_q
  SimTime sample_interval = 1'000'000; // ns

  std::vector<std::string> validate() const;
};

using QueueManagement = std::variant<DropTail, RedParams>;

enum class FeedbackMode : std::uint8_t { Off, PI, GearBox };
enum class CongestionMeasure : std::uint8_t { RelativeCongestion, DropProbability };
enum class CounterUnit : std::uint8_t { Bytes, Packets };

std::string_view to_string(FeedbackMode m);

struct FeedbackConfig {
  FeedbackMode mode = FeedbackMode::Off;
  SimTime interval = 1'000'000;  // T, ns
  SimTime delay = 0;             // feedback channel latency, ns
  CongestionMeasure measure = CongestionMeasure::RelativeCongestion;
  PiParams pi;                   // gains and alpha for PI mode
  GbParams gb;                   // thresholds, beta and table for GearBox mode
};

struct FlowSpec {
  FlowId id = 0;
  ServiceClass service_class = ServiceClass::Assured;
  double weight = 1.0;  // WFQ weight among non-premium queues
  std::optional<QueueManagement> queue_mgmt;
};

struct SwitchConfig {
  int num_ports = 16;
  BitRate line_rate = 100'000'000;  // c
  double speedup = 1.28;            // s
  Bytes fabric_memory = 50'000;
  // Bytes of fabric memory usable only by the high-priority fabric queue.
  Bytes fabric_reserve = 0;
  int fabric_priorities = 2;
  Bytes out_queue_size = 20'000;    // per flow
  int num_classes = 3;
  CounterUnit counter_unit = CounterUnit::Bytes;
  QueueManagement queue_mgmt = DropTail{};
  std::vector<FlowSpec> flows;
  FeedbackConfig feedback;

  // Rate of the fabric-to-OUT-line interface, s * c, in bits/s.
  BitRate fabric_line_rate() const;

  const FlowSpec* find_flow(FlowId id) const;

  // Every violated invariant, each message naming its field.
  std::vector<std::string> validate() const;
};

}  // namespace foq

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "foq/packet.hpp"
#include "foq/simulator.hpp"
#include "foq/units.hpp"

namespace foq {

struct CbrSource {
  BitRate rate = 0;
  std::uint32_t packet_size = 0;  // bytes
  SimTime start = 0;
  SimTime stop = 0;               // exclusive
  FlowId flow_id = 0;
  PortId ingress_port = 0;
  PortId egress_port = 0;

  // Throws std::invalid_argument naming the field.
  void validate() const;
};

// Departure of packet i: start + floor(i * size * 8 * 1e9 / rate), exact.
SimTime cbr_departure(const CbrSource& source, std::uint64_t i);

// Packets departing in [start, stop).
std::uint64_t cbr_packet_count(const CbrSource& source);

std::vector<SimTime> cbr_departures(const CbrSource& source);

using PacketSink = std::function<void(Packet)>;

// Drives `sink` with every packet of `source`, one event at a time. Packets
// carry source_id and a per-source sequence number.
void cbr_schedule(Simulator& sim, const CbrSource& source, std::uint32_t source_id,
                  PacketSink sink);

}  // namespace foq

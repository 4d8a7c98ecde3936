#pragma once

#include <cstdint>
#include <string_view>

#include "foq/units.hpp"

namespace foq {

enum class ServiceClass : std::uint8_t { Premium, Assured, BestEffort };

std::string_view to_string(ServiceClass c);

struct Packet {
  FlowId flow_id = 0;          // QoS flow at the egress port
  std::uint32_t source_id = 0; // originating source (TCP connection, CBR stream)
  PortId ingress_port = 0;
  PortId egress_port = 0;
  std::uint32_t size = 0;      // bytes
  ServiceClass service_class = ServiceClass::Assured;
  SimTime created_at = 0;      // arrival at the switch ingress
  std::uint64_t seq = 0;       // TCP sequence number (packets)
};

}  // namespace foq

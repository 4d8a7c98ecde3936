#include "foq/fabric.hpp"

#include <stdexcept>

namespace foq {

Fabric::Fabric(int num_ports, int priorities, Bytes memory, Bytes reserve)
    : priorities_(priorities),
      memory_(memory),
      reserve_(reserve),
      queues_(static_cast<std::size_t>(num_ports),
              std::vector<std::deque<Packet>>(static_cast<std::size_t>(priorities))),
      port_bytes_(static_cast<std::size_t>(num_ports), 0) {
  if (num_ports <= 0 || priorities <= 0) throw std::invalid_argument("empty fabric");
  if (reserve > memory) throw std::invalid_argument("fabric reserve exceeds memory");
}

FabricResult Fabric::enqueue(const Packet& packet, int priority) {
  if (priority < 0 || priority >= priorities_)
    throw std::out_of_range("fabric priority out of range");
  if (occupancy_ + packet.size > admission_limit(priority)) return FabricResult::Dropped;
  queues_[index(packet.egress_port)][static_cast<std::size_t>(priority)].push_back(packet);
  occupancy_ += packet.size;
  port_bytes_[index(packet.egress_port)] += packet.size;
  return FabricResult::Queued;
}

std::optional<Packet> Fabric::dequeue(PortId port) {
  for (auto& q : queues_[index(port)]) {
    if (q.empty()) continue;
    Packet p = q.front();
    q.pop_front();
    occupancy_ -= p.size;
    port_bytes_[index(port)] -= p.size;
    return p;
  }
  return std::nullopt;
}

Bytes Fabric::flow_backlog(PortId port, FlowId flow) const {
  Bytes total = 0;
  for (const auto& q : queues_[index(port)])
    for (const auto& p : q)
      if (p.flow_id == flow) total += p.size;
  return total;
}

}  // namespace foq

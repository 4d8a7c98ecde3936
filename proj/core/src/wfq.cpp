#include "foq/wfq.hpp"

#include <algorithm>
#include <stdexcept>

namespace foq {

double wfq_stamp(OutPortState& port, OutQueueState& queue, std::uint32_t size) {
  const double start = std::max(port.virtual_time, queue.last_finish);
  queue.last_finish = start + static_cast<double>(size) / queue.weight;
  return queue.last_finish;
}

std::optional<FlowId> out_scheduler_select(const OutPortState& port) {
  for (const auto& [id, q] : port.queues) {
    if (q.service_class == ServiceClass::Premium && !q.packets.empty()) return id;
  }
  std::optional<FlowId> best;
  double best_tag = 0.0;
  for (const auto& [id, q] : port.queues) {
    if (q.service_class == ServiceClass::Premium || q.packets.empty()) continue;
    const double tag = q.packets.front().finish_tag;
    if (!best || tag < best_tag) {
      best = id;
      best_tag = tag;
    }
  }
  return best;
}

QueuedPacket wfq_take(OutPortState& port, FlowId flow) {
  auto it = port.queues.find(flow);
  if (it == port.queues.end() || it->second.packets.empty())
    throw std::logic_error("wfq_take on an empty queue");
  OutQueueState& q = it->second;
  QueuedPacket head = q.packets.front();
  q.packets.pop_front();
  q.backlog -= head.packet.size;
  if (q.service_class != ServiceClass::Premium) port.virtual_time = head.finish_tag;
  return head;
}

}  // namespace foq

#pragma once

#include <optional>

#include "foq/out_queue.hpp"

namespace foq {

// Self-clocked fair queueing over bytes: a packet's finish tag is
// max(V, previous finish of its queue) + size / weight, where V is the tag of
// the packet last taken into service.
double wfq_stamp(OutPortState& port, OutQueueState& queue, std::uint32_t size);

// Premium queues first (lowest flow id), then the non-premium head with the
// smallest finish tag. nullopt when every queue is empty.
std::optional<FlowId> out_scheduler_select(const OutPortState& port);

// Removes the head of `flow`'s queue and advances the port's virtual time.
QueuedPacket wfq_take(OutPortState& port, FlowId flow);

}  // namespace foq

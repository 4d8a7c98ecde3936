#pragma once

#include "foq/out_queue.hpp"
#include "foq/rng.hpp"
#include "foq/switch_config.hpp"

namespace foq {

enum class QueueDecision : std::uint8_t { Enqueue, Drop };

// 0 below min_th, linear up to max_p at max_th, 1 from max_th on.
double red_drop_probability(double average, const RedParams& params);

// One EWMA step, taken once per sample_interval.
double red_update_average(double average, Bytes backlog, const RedParams& params);

// Arrival test against the current average. Packets that do not fit in the
// physical buffer are dropped regardless of the average.
QueueDecision red_arrival_decision(const OutQueueState& queue,
                                   std::uint32_t packet_size,
                                   const RedParams& params, RandomStream& rng);

// Drop-tail: drop iff the packet does not fit.
QueueDecision droptail_arrival_decision(const OutQueueState& queue,
                                        std::uint32_t packet_size);

}  // namespace foq

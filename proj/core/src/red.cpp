#include "foq/red.hpp"


namespace foq {

std::vector<std::string> RedParams::validate() const {
  std::vector<std::string> errors;
  if (!(max_p > 0.0 && max_p <= 1.0)) errors.push_back("red.max_p must lie in (0, 1]");
  if (!(min_th < max_th)) errors.push_back("red.min_th must be below red.max_th");
  if (!(weight > 0.0 && weight <= 1.0)) errors.push_back("red.weight must lie in (0, 1]");
  if (!(sample_interval > 0)) errors.push_back("red.sample_interval must be > 0");
  return errors;
}

double red_drop_probability(double average, const RedParams& params) {
  const auto min_th = static_cast<double>(params.min_th);
  const auto max_th = static_cast<double>(params.max_th);
  if (average < min_th) return 0.0;
  if (average >= max_th) return 1.0;
  return params.max_p * (average - min_th) / (max_th - min_th);
}

double red_update_average(double average, Bytes backlog, const RedParams& params) {
  return (1.0 - params.weight) * average + params.weight * static_cast<double>(backlog);
}

QueueDecision droptail_arrival_decision(const OutQueueState& queue,
                                        std::uint32_t packet_size) {
  return queue.backlog + packet_size > queue.capacity ? QueueDecision::Drop
                                                      : QueueDecision::Enqueue;
}

QueueDecision red_arrival_decision(const OutQueueState& queue,
                                   std::uint32_t packet_size,
                                   const RedParams& params, RandomStream& rng) {
  if (droptail_arrival_decision(queue, packet_size) == QueueDecision::Drop)
    return QueueDecision::Drop;
  return rng.bernoulli(red_drop_probability(queue.red_avg, params))
             ? QueueDecision::Drop
             : QueueDecision::Enqueue;
}

}  // namespace foq

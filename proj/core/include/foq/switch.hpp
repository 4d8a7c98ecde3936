#pragma once

// N-port Feedback Output Queuing switch.
//
//   IN port i --[IN dropper]--> shared-memory fabric FQ_j (2 priorities)
//     --[OUT line j at s*c]--> per-flow OUT queues OQ_{j,k} (drop-tail / RED)
//     --[priority + WFQ scheduler]--> OUT port j at c
//
// Every feedback interval T each OUT queue's counters are sampled, the
// configured controller computes a new drop level and the IN droppers of
// (j, k) pick it up after the feedback delay. Premium traffic bypasses the
// droppers and rides the high-priority fabric queue.

#include <functional>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "foq/control_law.hpp"
#include "foq/fabric.hpp"
#include "foq/out_queue.hpp"
#include "foq/packet.hpp"
#include "foq/red.hpp"
#include "foq/rng.hpp"
#include "foq/simulator.hpp"
#include "foq/switch_config.hpp"
#include "foq/time_series.hpp"

namespace foq {

// Dropper decision for one packet. Premium packets are always admitted.
bool ingress_admit(const Packet& packet, double drop_prob, RandomStream& rng);

struct SampleResult {
  bool informative = false;      // false when nothing arrived in the interval
  double congestion = 0.0;       // RelCong(T) or DropProb(T)
  FeedbackSignal signal = FeedbackSignal::Hold;
  double drop_prob = 0.0;        // new IN drop probability for (j, k)
};

// One sampling step at an OUT queue: measures congestion over the interval,
// runs the queue's controller, resets the counters. `drop_levels` is the
// GearBox table (unused in other modes). With feedback Off the congestion is
// still reported and the drop probability stays 0.
SampleResult sample_and_feedback(OutQueueState& queue, const SwitchConfig& config,
                                 const std::vector<double>& drop_levels,
                                 double prev_drop_prob);

// Byte ledger of one (egress port, flow) since the start of the run.
struct FlowTotals {
  Bytes injected = 0;
  Bytes ingress_dropped = 0;
  Bytes fabric_dropped = 0;
  Bytes egress_dropped = 0;
  Bytes delivered = 0;
};

struct FeedbackEvent {
  SimTime at = 0;
  PortId port = 0;
  FlowId flow = 0;
  SampleResult result;
};

class FoqSwitch {
 public:
  using DeliveryHandler = std::function<void(const Packet&)>;
  using FeedbackObserver = std::function<void(const FeedbackEvent&)>;

  // Throws std::invalid_argument listing every config violation.
  FoqSwitch(Simulator& sim, SwitchConfig config, std::uint64_t seed);

  FoqSwitch(const FoqSwitch&) = delete;
  FoqSwitch& operator=(const FoqSwitch&) = delete;

  // Creates the OUT queue and counters for (port, flow) ahead of traffic so
  // that it appears in the series from t = 0. Otherwise done on first arrival.
  void register_flow(PortId egress, FlowId flow);

  // Arrival of a packet at its IN port at the current simulation time.
  void receive(Packet packet);

  void set_delivery_handler(DeliveryHandler handler) { on_delivery_ = std::move(handler); }
  void set_feedback_observer(FeedbackObserver observer) { on_feedback_ = std::move(observer); }

  // Schedules the periodic samplers; idempotent.
  void start();

  // Starts the samplers if needed and processes every event up to and
  // including `until`, so the interval ending at `until` is sampled.
  // Returns the per-interval series recorded so far.
  const TimeSeries& run(SimTime until);

  const TimeSeries& series() const { return series_; }
  const SwitchConfig& config() const { return config_; }
  const Fabric& fabric() const { return fabric_; }
  const OutQueueState* out_queue(PortId port, FlowId flow) const;
  double ingress_drop_probability(PortId port, FlowId flow) const;
  const std::vector<double>& drop_levels() const { return drop_levels_; }

  FlowTotals totals(PortId port, FlowId flow) const;
  // Bytes of (port, flow) currently inside the switch: fabric queue, OUT line,
  // OUT queue and OUT port transmitter.
  Bytes resident(PortId port, FlowId flow) const;
  std::vector<std::pair<PortId, FlowId>> flows() const;

 private:
  struct IntervalStats {
    Bytes offered = 0;
    Bytes ingress_dropped = 0;
    Bytes fabric_dropped = 0;
    Bytes egress_dropped = 0;
    Bytes delivered = 0;
    std::vector<SimTime> delays;
  };

  struct FlowSlot {
    OutQueueState* queue = nullptr;
    double drop_prob = 0.0;
    FlowTotals totals;
    IntervalStats interval;
    RandomStream red_rng;
    Bytes on_line = 0;
    Bytes on_port = 0;
  };

  struct PortState {
    OutPortState out;
    RandomStream ingress_rng;
    RateClock line_clock;
    RateClock port_clock;
    bool line_busy = false;
    bool port_busy = false;
  };

  FlowSlot& slot(PortId port, FlowId flow);
  int fabric_priority(ServiceClass c) const { return c == ServiceClass::Premium ? 0 : 1; }

  void start_line(PortId port);
  void line_done(Packet packet);
  void start_port(PortId port);
  void port_done(Packet packet);
  void sample_all();
  void sample_all_and_reschedule();
  void red_sample_all();

  Simulator& sim_;
  SwitchConfig config_;
  std::uint64_t seed_;
  Fabric fabric_;
  std::vector<PortState> ports_;
  std::map<std::pair<PortId, FlowId>, FlowSlot> slots_;
  std::vector<double> drop_levels_;
  TimeSeries series_;
  DeliveryHandler on_delivery_;
  FeedbackObserver on_feedback_;
  Bytes fabric_peak_ = 0;  // highest fabric occupancy in the current interval
  bool started_ = false;
  bool has_red_ = false;
  SimTime red_period_ = 0;
};

}  // namespace foq

#include "foq/switch.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "foq/wfq.hpp"

namespace foq {

std::string_view to_string(ServiceClass c) {
  switch (c) {
    case ServiceClass::Premium: return "premium";
    case ServiceClass::Assured: return "assured";
    case ServiceClass::BestEffort: break;
  }
  return "best_effort";
}

std::string_view to_string(FeedbackMode m) {
  switch (m) {
    case FeedbackMode::PI: return "pi";
    case FeedbackMode::GearBox: return "gearbox";
    case FeedbackMode::Off: break;
  }
  return "off";
}

BitRate SwitchConfig::fabric_line_rate() const {
  return static_cast<BitRate>(std::llround(speedup * static_cast<double>(line_rate)));
}

const FlowSpec* SwitchConfig::find_flow(FlowId id) const {
  for (const auto& f : flows)
    if (f.id == id) return &f;
  return nullptr;
}

namespace {

void append_red_errors(std::vector<std::string>& errors, const QueueManagement& qm,
                       const std::string& prefix) {
  if (const auto* red = std::get_if<RedParams>(&qm)) {
    for (auto& e : red->validate()) errors.push_back(prefix + e);
  }
}

}  // namespace

std::vector<std::string> SwitchConfig::validate() const {
  std::vector<std::string> errors;
  if (num_ports <= 0) errors.emplace_back("switch.ports must be > 0");
  if (line_rate == 0) errors.emplace_back("switch.line_rate must be > 0");
  if (!(speedup > 1.0)) errors.emplace_back("switch.speedup must be > 1");
  if (fabric_memory == 0) errors.emplace_back("fabric.memory must be > 0");
  if (fabric_reserve >= fabric_memory && fabric_memory > 0)
    errors.emplace_back("fabric.reserve must be below fabric.memory");
  if (fabric_priorities < 1 || fabric_priorities > 2)
    errors.emplace_back("fabric.priorities must be 1 or 2");
  if (out_queue_size == 0) errors.emplace_back("out_queue.size must be > 0");
  if (num_classes < 1) errors.emplace_back("switch.classes must be >= 1");
  append_red_errors(errors, queue_mgmt, "out_queue.");

  std::set<FlowId> seen;
  for (const auto& f : flows) {
    const std::string name = "flow." + std::to_string(f.id) + ".";
    if (!seen.insert(f.id).second) errors.push_back(name + "id is duplicated");
    if (!(f.weight > 0.0)) errors.push_back(name + "weight must be > 0");
    if (f.queue_mgmt) append_red_errors(errors, *f.queue_mgmt, name);
  }

  if (feedback.interval <= 0) errors.emplace_back("feedback.interval must be > 0");
  if (feedback.delay < 0) errors.emplace_back("feedback.delay must be >= 0");
  if (feedback.mode == FeedbackMode::PI) {
    const auto& pi = feedback.pi;
    if (!(pi.gain_p >= 0.0)) errors.emplace_back("feedback.k must be >= 0");
    if (!(pi.gain_i > 0.0)) errors.emplace_back("feedback.ki must be > 0");
    if (!(pi.alpha > 0.0 && pi.alpha <= 1.0))
      errors.emplace_back("feedback.alpha must lie in (0, 1]");
  }
  if (feedback.mode == FeedbackMode::GearBox) {
    const auto& gb = feedback.gb;
    if (!(gb.d_min >= 0.0 && gb.d_min < gb.d_max && gb.d_max < 1.0))
      errors.emplace_back("feedback.d_min/d_max must satisfy 0 <= d_min < d_max < 1");
    if (!(gb.beta > 0.0 && gb.beta < 1.0))
      errors.emplace_back("feedback.beta must lie in (0, 1)");
    if (gb.table_size < 2) errors.emplace_back("feedback.table_size must be >= 2");
  }
  return errors;
}

bool ingress_admit(const Packet& packet, double drop_prob, RandomStream& rng) {
  if (packet.service_class == ServiceClass::Premium) return true;
  return !rng.bernoulli(drop_prob);
}

SampleResult sample_and_feedback(OutQueueState& queue, const SwitchConfig& config,
                                 const std::vector<double>& drop_levels,
                                 double prev_drop_prob) {
  const IntervalCounters c = queue.counters;
  queue.counters = {};

  const double period = to_seconds(config.feedback.interval);
  queue.service_rate_estimate = static_cast<double>(c.out_bytes) * 8.0 / period;

  SampleResult r;
  r.drop_prob = prev_drop_prob;
  const bool packets = config.counter_unit == CounterUnit::Packets;
  const double in = packets ? static_cast<double>(c.in_packets) : static_cast<double>(c.in_bytes);
  const double out = packets ? static_cast<double>(c.out_packets) : static_cast<double>(c.out_bytes);
  const double dropped =
      packets ? static_cast<double>(c.dropped_packets) : static_cast<double>(c.dropped_bytes);
  if (in == 0.0) return r;

  r.informative = true;
  r.congestion = config.feedback.measure == CongestionMeasure::RelativeCongestion
                     ? 1.0 - out / in
                     : dropped / in;

  if (queue.service_class == ServiceClass::Premium) {
    r.drop_prob = 0.0;
    return r;
  }

  switch (config.feedback.mode) {
    case FeedbackMode::Off:
      r.drop_prob = 0.0;
      break;
    case FeedbackMode::GearBox: {
      auto& st = std::get<GbState>(queue.controller);
      r.signal = gb_signal_from_congestion(r.congestion, config.feedback.gb);
      st = apply_gb_signal(st, r.signal, drop_levels.size());
      r.drop_prob = drop_levels[st.level_index];
      break;
    }
    case FeedbackMode::PI: {
      auto& st = std::get<PiState>(queue.controller);
      PiParams params = config.feedback.pi;
      params.speedup = config.speedup;
      params.interval = period;
      params.line_rate = static_cast<double>(config.line_rate);
      const double fabric_out = static_cast<double>(c.in_bytes) * 8.0 / period;
      const double desired = params.alpha * params.speedup * queue.service_rate_estimate;
      PiOutput o = pi_update(st, fabric_out, desired, params);
      r.drop_prob = drop_prob_from_rate(o.drop_rate, fabric_out, st.last_drop_prob);
      o.state.last_drop_prob = r.drop_prob;
      st = o.state;
      break;
    }
  }
  return r;
}

FoqSwitch::FoqSwitch(Simulator& sim, SwitchConfig config, std::uint64_t seed)
    : sim_(sim),
      config_(std::move(config)),
      seed_(seed),
      fabric_([this] {
        const auto errors = config_.validate();
        if (!errors.empty()) {
          std::ostringstream os;
          for (std::size_t i = 0; i < errors.size(); ++i) os << (i ? "; " : "") << errors[i];
          throw std::invalid_argument(os.str());
        }
        return Fabric(config_.num_ports, config_.fabric_priorities, config_.fabric_memory,
                      config_.fabric_reserve);
      }()) {
  ports_.reserve(static_cast<std::size_t>(config_.num_ports));
  for (int p = 0; p < config_.num_ports; ++p) {
    ports_.push_back(PortState{OutPortState{},
                               RandomStream(seed_, "ingress", static_cast<std::uint64_t>(p)),
                               RateClock(config_.fabric_line_rate()),
                               RateClock(config_.line_rate)});
  }
  if (config_.feedback.mode == FeedbackMode::GearBox)
    drop_levels_ = drop_level_table(config_.feedback.gb.beta, config_.feedback.gb.table_size);
  has_red_ = std::holds_alternative<RedParams>(config_.queue_mgmt);
  for (const auto& f : config_.flows)
    if (f.queue_mgmt && std::holds_alternative<RedParams>(*f.queue_mgmt)) has_red_ = true;
}

FoqSwitch::FlowSlot& FoqSwitch::slot(PortId port, FlowId flow) {
  if (port < 0 || port >= config_.num_ports) throw std::out_of_range("egress port out of range");
  const auto key = std::make_pair(port, flow);
  auto it = slots_.find(key);
  if (it != slots_.end()) return it->second;

  OutQueueState q;
  q.flow = flow;
  q.capacity = config_.out_queue_size;
  q.queue_mgmt = config_.queue_mgmt;
  if (const FlowSpec* spec = config_.find_flow(flow)) {
    q.service_class = spec->service_class;
    q.weight = spec->weight;
    if (spec->queue_mgmt) q.queue_mgmt = *spec->queue_mgmt;
  }
  switch (config_.feedback.mode) {
    case FeedbackMode::PI: q.controller = PiState{}; break;
    case FeedbackMode::GearBox: q.controller = GbState{}; break;
    case FeedbackMode::Off: break;
  }
  auto& queues = ports_[static_cast<std::size_t>(port)].out.queues;
  OutQueueState* stored = &queues.emplace(flow, std::move(q)).first->second;

  const std::uint64_t index =
      (static_cast<std::uint64_t>(static_cast<std::uint32_t>(port)) << 32) | flow;
  FlowSlot fresh{stored, 0.0, {}, {}, RandomStream(seed_, "red", index), 0, 0};
  return slots_.emplace(key, std::move(fresh)).first->second;
}

void FoqSwitch::register_flow(PortId egress, FlowId flow) { slot(egress, flow); }

void FoqSwitch::receive(Packet packet) {
  if (packet.size == 0) throw std::invalid_argument("packet size must be > 0");
  if (packet.ingress_port < 0 || packet.ingress_port >= config_.num_ports)
    throw std::out_of_range("ingress port out of range");
  FlowSlot& s = slot(packet.egress_port, packet.flow_id);
  packet.service_class = s.queue->service_class;
  packet.created_at = sim_.now();

  s.totals.injected += packet.size;
  s.interval.offered += packet.size;

  auto& rng = ports_[static_cast<std::size_t>(packet.ingress_port)].ingress_rng;
  if (!ingress_admit(packet, s.drop_prob, rng)) {
    s.totals.ingress_dropped += packet.size;
    s.interval.ingress_dropped += packet.size;
    return;
  }
  const int prio = std::min(fabric_priority(packet.service_class), fabric_.priorities() - 1);
  const FabricResult fr = fabric_.enqueue(packet, prio);
  fabric_peak_ = std::max(fabric_peak_, fabric_.occupancy());
  if (fr == FabricResult::Dropped) {
    s.totals.fabric_dropped += packet.size;
    s.interval.fabric_dropped += packet.size;
    return;
  }
  start_line(packet.egress_port);
}

void FoqSwitch::start_line(PortId port) {
  PortState& ps = ports_[static_cast<std::size_t>(port)];
  if (ps.line_busy) return;
  auto next = fabric_.dequeue(port);
  if (!next) return;
  ps.line_busy = true;
  slot(port, next->flow_id).on_line += next->size;
  const SimTime dt = ps.line_clock.transmit(std::uint64_t{next->size} * 8);
  sim_.schedule_in(dt, EventKey{port, next->flow_id},
                   [this, p = *next] { line_done(p); });
}

void FoqSwitch::line_done(Packet packet) {
  const PortId port = packet.egress_port;
  PortState& ps = ports_[static_cast<std::size_t>(port)];
  FlowSlot& s = slot(port, packet.flow_id);
  OutQueueState& q = *s.queue;
  s.on_line -= packet.size;

  q.counters.in_bytes += packet.size;
  q.counters.in_packets += 1;
  QueueDecision d;
  if (const auto* red = std::get_if<RedParams>(&q.queue_mgmt)) {
    d = red_arrival_decision(q, packet.size, *red, s.red_rng);
  } else {
    d = droptail_arrival_decision(q, packet.size);
  }
  if (d == QueueDecision::Drop) {
    q.counters.dropped_bytes += packet.size;
    q.counters.dropped_packets += 1;
    s.totals.egress_dropped += packet.size;
    s.interval.egress_dropped += packet.size;
  } else {
    const double tag = wfq_stamp(ps.out, q, packet.size);
    q.packets.push_back(QueuedPacket{packet, tag});
    q.backlog += packet.size;
    start_port(port);
  }
  ps.line_busy = false;
  start_line(port);
}

void FoqSwitch::start_port(PortId port) {
  PortState& ps = ports_[static_cast<std::size_t>(port)];
  if (ps.port_busy) return;
  const auto flow = out_scheduler_select(ps.out);
  if (!flow) return;
  QueuedPacket head = wfq_take(ps.out, *flow);
  FlowSlot& s = slot(port, *flow);
  s.queue->counters.out_bytes += head.packet.size;
  s.queue->counters.out_packets += 1;
  s.on_port += head.packet.size;
  ps.port_busy = true;
  const SimTime dt = ps.port_clock.transmit(std::uint64_t{head.packet.size} * 8);
  sim_.schedule_in(dt, EventKey{port, *flow}, [this, p = head.packet] { port_done(p); });
}

void FoqSwitch::port_done(Packet packet) {
  const PortId port = packet.egress_port;
  FlowSlot& s = slot(port, packet.flow_id);
  s.on_port -= packet.size;
  s.totals.delivered += packet.size;
  s.interval.delivered += packet.size;
  s.interval.delays.push_back(sim_.now() - packet.created_at);
  ports_[static_cast<std::size_t>(port)].port_busy = false;
  if (on_delivery_) on_delivery_(packet);
  start_port(port);
}

void FoqSwitch::start() {
  if (started_) return;
  started_ = true;
  sim_.schedule_in(config_.feedback.interval, EventKey{},
                   [this] { sample_all_and_reschedule(); });
  if (has_red_) {
    SimTime red_period = 0;
    auto pick = [&red_period](const QueueManagement& qm) {
      if (const auto* red = std::get_if<RedParams>(&qm))
        red_period = red_period == 0 ? red->sample_interval
                                     : std::min(red_period, red->sample_interval);
    };
    pick(config_.queue_mgmt);
    for (const auto& f : config_.flows)
      if (f.queue_mgmt) pick(*f.queue_mgmt);
    red_period_ = red_period;
    sim_.schedule_in(red_period_, EventKey{}, [this] { red_sample_all(); });
  }
}

void FoqSwitch::sample_all_and_reschedule() {
  sample_all();
  sim_.schedule_in(config_.feedback.interval, EventKey{},
                   [this] { sample_all_and_reschedule(); });
}

void FoqSwitch::red_sample_all() {
  const SimTime now = sim_.now();
  for (auto& ps : ports_) {
    for (auto& [id, q] : ps.out.queues) {
      const auto* red = std::get_if<RedParams>(&q.queue_mgmt);
      if (!red) continue;
      // Queues with a longer interval than the base tick update on their own grid.
      if (now % red->sample_interval != 0) continue;
      q.red_avg = red_update_average(q.red_avg, q.backlog, *red);
    }
  }
  sim_.schedule_in(red_period_, EventKey{}, [this] { red_sample_all(); });
}

namespace {

double percentile(std::vector<SimTime>& v, double q) {
  if (v.empty()) return 0.0;
  const auto n = v.size();
  auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
  rank = std::clamp<std::size_t>(rank, 1, n) - 1;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(rank), v.end());
  return to_seconds(v[rank]);
}

}  // namespace

void FoqSwitch::sample_all() {
  const SimTime now = sim_.now();
  const double period = to_seconds(config_.feedback.interval);
  const double t = to_seconds(now);
  auto rate = [period](Bytes b) { return static_cast<double>(b) * 8.0 / period; };

  series_.add(t, "fabric_occupancy", kAggregate, kAggregate,
               static_cast<double>(fabric_.occupancy()), "B");
  series_.add(t, "fabric_peak", kAggregate, kAggregate, static_cast<double>(fabric_peak_),
              "B");
  fabric_peak_ = fabric_.occupancy();
  for (int p = 0; p < config_.num_ports; ++p) {
    series_.add(t, "fabric_queue", p, kAggregate,
                 static_cast<double>(fabric_.port_backlog(p)), "B");
  }

  for (auto& [key, s] : slots_) {
    const auto [port, flow] = key;
    OutQueueState& q = *s.queue;
    const Bytes in = q.counters.in_bytes;
    const Bytes out = q.counters.out_bytes;

    const SampleResult r = sample_and_feedback(q, config_, drop_levels_, s.drop_prob);
    if (r.drop_prob != s.drop_prob) {
      if (config_.feedback.delay == 0) {
        s.drop_prob = r.drop_prob;
      } else {
        sim_.schedule_in(config_.feedback.delay, EventKey{port, flow},
                         [this, k = key, v = r.drop_prob] { slots_.at(k).drop_prob = v; });
      }
    }
    if (on_feedback_) on_feedback_(FeedbackEvent{now, port, flow, r});

    const auto f = static_cast<std::int64_t>(flow);
    IntervalStats& st = s.interval;
    series_.add(t, "offered_rate", port, f, rate(st.offered), "bps");
    series_.add(t, "throughput", port, f, rate(st.delivered), "bps");
    series_.add(t, "ingress_drop_rate", port, f, rate(st.ingress_dropped), "bps");
    series_.add(t, "fabric_drop_rate", port, f, rate(st.fabric_dropped), "bps");
    series_.add(t, "egress_drop_rate", port, f, rate(st.egress_dropped), "bps");
    series_.add(t, "queue_in_rate", port, f, rate(in), "bps");
    series_.add(t, "queue_out_rate", port, f, rate(out), "bps");
    series_.add(t, "out_queue", port, f, static_cast<double>(q.backlog), "B");
    series_.add(t, "relcong", port, f, r.informative ? r.congestion : 0.0, "ratio");
    series_.add(t, "drop_prob", port, f, r.drop_prob, "ratio");
    series_.add(t, "delay_p50", port, f, percentile(st.delays, 0.50), "s");
    series_.add(t, "delay_p99", port, f, percentile(st.delays, 0.99), "s");
    st = IntervalStats{};
  }
}

const TimeSeries& FoqSwitch::run(SimTime until) {
  start();
  sim_.run_through(until);
  return series_;
}

const OutQueueState* FoqSwitch::out_queue(PortId port, FlowId flow) const {
  auto it = slots_.find({port, flow});
  return it == slots_.end() ? nullptr : it->second.queue;
}

double FoqSwitch::ingress_drop_probability(PortId port, FlowId flow) const {
  auto it = slots_.find({port, flow});
  return it == slots_.end() ? 0.0 : it->second.drop_prob;
}

FlowTotals FoqSwitch::totals(PortId port, FlowId flow) const {
  auto it = slots_.find({port, flow});
  return it == slots_.end() ? FlowTotals{} : it->second.totals;
}

Bytes FoqSwitch::resident(PortId port, FlowId flow) const {
  auto it = slots_.find({port, flow});
  if (it == slots_.end()) return 0;
  const FlowSlot& s = it->second;
  return fabric_.flow_backlog(port, flow) + s.on_line + s.queue->backlog + s.on_port;
}

std::vector<std::pair<PortId, FlowId>> FoqSwitch::flows() const {
  std::vector<std::pair<PortId, FlowId>> out;
  out.reserve(slots_.size());
  for (const auto& [key, s] : slots_) out.push_back(key);
  return out;
}

}  // namespace foq

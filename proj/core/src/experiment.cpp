#include "foq/experiment.hpp"

#include <memory>

#include "foq/cbr.hpp"
#include "foq/simulator.hpp"
#include "foq/tcp.hpp"

namespace foq {

namespace {

struct TcpPopulation {
  std::vector<std::unique_ptr<AccessLink>> links;
  std::vector<std::unique_ptr<TcpSender>> senders;
  std::vector<TcpReceiver> receivers;
  std::vector<SimTime> round_trip;  // forward + ack propagation per source
};

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  Simulator sim;
  FoqSwitch sw(sim, config.switch_config, config.seed);

  const auto cbr_count = static_cast<std::uint32_t>(config.cbr.size());
  for (std::uint32_t i = 0; i < cbr_count; ++i) {
    const CbrSource& src = config.cbr[i];
    sw.register_flow(src.egress_port, src.flow_id);
    cbr_schedule(sim, src, i, [&sw](Packet p) { sw.receive(p); });
  }

  TcpPopulation pop;
  const TcpExperiment& tcp = config.tcp;
  if (!tcp.groups.empty()) {
    sw.register_flow(tcp.egress, tcp.flow);
    const auto starts = staged_start(tcp.groups, config.seed);
    for (std::size_t g = 0; g < tcp.groups.size(); ++g) {
      const SubnetGroup& grp = tcp.groups[g];
      const PortId ingress = tcp.group_ingress[g];
      pop.links.push_back(std::make_unique<AccessLink>(
          sim, grp.link_rate, grp.access_buffer, ingress, [&sw](Packet p) { sw.receive(p); }));
      AccessLink* link = pop.links.back().get();
      for (SimTime start : starts[g]) {
        const auto id = cbr_count + static_cast<std::uint32_t>(pop.senders.size());
        pop.senders.push_back(std::make_unique<TcpSender>(
            sim, tcp.params, id, tcp.flow, ingress, tcp.egress,
            [link](Packet p) { link->send(p); }));
        pop.senders.back()->start_at(start);
        pop.round_trip.push_back(2 * grp.one_way_delay);
      }
    }
    pop.receivers.resize(pop.senders.size());
    sw.set_delivery_handler([&sim, &pop, cbr_count](const Packet& p) {
      if (p.source_id < cbr_count) return;
      const std::size_t i = p.source_id - cbr_count;
      // Data reaches the receiver one delay later and its ack returns after
      // another; both legs are fixed, so one event carries the pair in order.
      sim.schedule_in(pop.round_trip[i], EventKey{p.egress_port, p.flow_id},
                      [&pop, i, seq = p.seq] {
                        pop.senders[i]->on_ack(pop.receivers[i].on_data(seq));
                      });
    });
  }

  ExperimentResult result;
  result.raw = sw.run(config.duration);
  result.events = sim.events_processed();
  result.series = sliding_window(result.raw, to_seconds(config.window));

  const double t_end = to_seconds(config.duration);
  for (const auto& [port, flow] : sw.flows()) {
    FlowReport r{port, flow, sw.totals(port, flow), sw.resident(port, flow)};
    const auto f = static_cast<std::int64_t>(flow);
    auto add = [&](const char* metric, Bytes v) {
      result.series.add(t_end, metric, port, f, static_cast<double>(v), "B");
    };
    add("total_injected", r.totals.injected);
    add("total_ingress_dropped", r.totals.ingress_dropped);
    add("total_fabric_dropped", r.totals.fabric_dropped);
    add("total_egress_dropped", r.totals.egress_dropped);
    add("total_delivered", r.totals.delivered);
    add("total_resident", r.resident);
    result.flows.push_back(r);
  }

  result.tcp.sources = pop.senders.size();
  for (const auto& s : pop.senders) {
    result.tcp.sent += s->stats().sent;
    result.tcp.retransmitted += s->stats().retransmitted;
    result.tcp.timeouts += s->stats().timeouts;
    result.tcp.fast_retransmits += s->stats().fast_retransmits;
  }
  for (const auto& l : pop.links) result.tcp.access_drops += l->dropped();
  return result;
}

}  // namespace foq

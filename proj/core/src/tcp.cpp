#include "foq/tcp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "foq/rng.hpp"

namespace foq {

TcpWindow tcp_on_ack(TcpWindow w) {
  switch (w.state) {
    case TcpState::SlowStart:
      ++w.cwnd;
      if (w.cwnd >= w.ssthresh) {
        w.state = TcpState::CongestionAvoidance;
        w.ack_count = 0;
      }
      break;
    case TcpState::CongestionAvoidance:
      if (++w.ack_count >= w.cwnd) {
        ++w.cwnd;
        w.ack_count = 0;
      }
      break;
    case TcpState::Recovery:
      w.cwnd = w.ssthresh;
      w.ack_count = 0;
      w.state = TcpState::CongestionAvoidance;
      break;
  }
  return w;
}

TcpWindow tcp_on_loss(TcpWindow w, LossKind kind) {
  w.ssthresh = std::max<std::uint32_t>(w.cwnd / 2, 2);
  w.ack_count = 0;
  if (kind == LossKind::TripleDup) {
    w.cwnd = w.ssthresh;
    w.state = TcpState::Recovery;
  } else {
    w.cwnd = 1;
    w.state = TcpState::SlowStart;
  }
  return w;
}

AccessLink::AccessLink(Simulator& sim, BitRate rate, Bytes buffer, PortId port, Sink sink)
    : sim_(sim), clock_(rate), buffer_(buffer), port_(port), sink_(std::move(sink)) {
  if (rate == 0) throw std::invalid_argument("link rate must be > 0");
}

bool AccessLink::send(Packet packet) {
  if (buffer_ != 0 && backlog_ + packet.size > buffer_) {
    ++dropped_;
    return false;
  }
  backlog_ += packet.size;
  queue_.push_back(packet);
  start();
  return true;
}

void AccessLink::start() {
  if (busy_ || queue_.empty()) return;
  busy_ = true;
  const SimTime dt = clock_.transmit(std::uint64_t{queue_.front().size} * 8);
  sim_.schedule_in(dt, EventKey{port_, queue_.front().flow_id}, [this] { done(); });
}

void AccessLink::done() {
  Packet p = queue_.front();
  queue_.pop_front();
  backlog_ -= p.size;
  busy_ = false;
  sink_(p);
  start();
}

std::uint64_t TcpReceiver::on_data(std::uint64_t seq) {
  if (seq == next_) {
    ++next_;
    while (!out_of_order_.empty() && *out_of_order_.begin() == next_) {
      out_of_order_.erase(out_of_order_.begin());
      ++next_;
    }
  } else if (seq > next_) {
    out_of_order_.insert(seq);
  }
  return next_;
}

TcpSender::TcpSender(Simulator& sim, TcpParams params, std::uint32_t source_id, FlowId flow,
                     PortId ingress, PortId egress, Transmit transmit)
    : sim_(sim),
      params_(params),
      id_(source_id),
      flow_(flow),
      ingress_(ingress),
      egress_(egress),
      transmit_(std::move(transmit)),
      rto_(params.rto_initial) {
  window_.ssthresh = std::max<std::uint32_t>(params_.initial_ssthresh, 2);
}

void TcpSender::start_at(SimTime at) {
  sim_.schedule_at(at, EventKey{ingress_, flow_}, [this] {
    started_ = true;
    send_available();
  });
}

void TcpSender::send_packet(std::uint64_t seq) {
  Packet p;
  p.flow_id = flow_;
  p.source_id = id_;
  p.ingress_port = ingress_;
  p.egress_port = egress_;
  p.size = params_.packet_size;
  p.seq = seq;
  p.created_at = sim_.now();
  ++stats_.sent;
  if (seq < snd_max_) {
    ++stats_.retransmitted;
  } else if (!timing_) {
    timing_ = true;
    timed_seq_ = seq;
    timed_at_ = sim_.now();
  }
  snd_max_ = std::max(snd_max_, seq + 1);
  transmit_(p);
}

void TcpSender::send_available() {
  while (snd_nxt_ < snd_una_ + window_.cwnd + inflation_) {
    send_packet(snd_nxt_);
    ++snd_nxt_;
  }
  if (snd_una_ < snd_max_ && deadline_ < 0) arm_timer();
}

void TcpSender::arm_timer() {
  deadline_ = sim_.now() + rto_ * static_cast<SimTime>(backoff_);
  if (timer_pending_) return;
  timer_pending_ = true;
  sim_.schedule_at(deadline_, EventKey{ingress_, flow_}, [this] { on_timer(); });
}

void TcpSender::on_timer() {
  timer_pending_ = false;
  if (deadline_ < 0 || snd_una_ >= snd_max_) return;
  if (sim_.now() < deadline_) {
    timer_pending_ = true;
    sim_.schedule_at(deadline_, EventKey{ingress_, flow_}, [this] { on_timer(); });
    return;
  }
  ++stats_.timeouts;
  window_ = tcp_on_loss(window_, LossKind::Timeout);
  backoff_ = std::min(backoff_ * 2, params_.max_backoff);
  dupacks_ = 0;
  inflation_ = 0;
  timing_ = false;
  recover_ = snd_max_;
  snd_nxt_ = snd_una_;
  deadline_ = -1;
  send_available();
}

void TcpSender::rtt_sample(SimTime sample) {
  const auto r = static_cast<double>(sample);
  if (!have_rtt_) {
    have_rtt_ = true;
    srtt_ = r;
    rttvar_ = r / 2.0;
  } else {
    rttvar_ = 0.75 * rttvar_ + 0.25 * std::abs(srtt_ - r);
    srtt_ = 0.875 * srtt_ + 0.125 * r;
  }
  const double g = static_cast<double>(params_.clock_granularity);
  const auto rto = static_cast<SimTime>(srtt_ + std::max(g, 4.0 * rttvar_));
  rto_ = std::clamp(rto, params_.rto_min, params_.rto_max);
}

void TcpSender::on_ack(std::uint64_t ack) {
  if (ack > snd_una_) {
    stats_.acked += ack - snd_una_;
    if (timing_ && ack > timed_seq_) {
      timing_ = false;
      rtt_sample(sim_.now() - timed_at_);
    }
    snd_una_ = ack;
    snd_nxt_ = std::max(snd_nxt_, snd_una_);
    dupacks_ = 0;
    inflation_ = 0;
    backoff_ = 1;
    window_ = tcp_on_ack(window_);
    if (snd_una_ >= snd_max_) deadline_ = -1;
    else deadline_ = sim_.now() + rto_;
    send_available();
    return;
  }
  if (ack < snd_una_ || snd_una_ >= snd_max_) return;
  ++dupacks_;
  if (window_.state == TcpState::Recovery) {
    // Each further duplicate means a packet left the network.
    ++inflation_;
    send_available();
    return;
  }
  if (dupacks_ != 3 || snd_una_ < recover_) return;
  ++stats_.fast_retransmits;
  window_ = tcp_on_loss(window_, LossKind::TripleDup);
  inflation_ = 3;
  recover_ = snd_max_;
  timing_ = false;
  send_packet(snd_una_);
  arm_timer();
}

void SubnetGroup::validate() const {
  if (source_count == 0) throw std::invalid_argument("source_count must be > 0");
  if (link_rate == 0) throw std::invalid_argument("link_rate must be > 0");
  if (window_end < window_begin) throw std::invalid_argument("start window is reversed");
  if (one_way_delay < 0) throw std::invalid_argument("one_way_delay must be >= 0");
}

std::vector<std::vector<SimTime>> staged_start(const std::vector<SubnetGroup>& groups,
                                               std::uint64_t seed) {
  std::vector<std::vector<SimTime>> out;
  out.reserve(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const SubnetGroup& grp = groups[g];
    grp.validate();
    RandomStream rng(seed, "tcp-start", g);
    const auto span = static_cast<double>(grp.window_end - grp.window_begin);
    std::vector<SimTime> starts(grp.source_count);
    for (auto& s : starts)
      s = grp.window_begin + static_cast<SimTime>(std::floor(rng.uniform() * span));
    out.push_back(std::move(starts));
  }
  return out;
}

std::vector<double> stage_overload_ratios(const std::vector<SubnetGroup>& groups,
                                          BitRate destination_rate) {
  if (destination_rate == 0) throw std::invalid_argument("destination rate must be > 0");
  std::vector<double> out;
  double sum = 0.0;
  for (const auto& g : groups) {
    sum += static_cast<double>(g.link_rate);
    out.push_back(sum / static_cast<double>(destination_rate));
  }
  return out;
}

}  // namespace foq

#pragma once

// Simplified Reno sources: slow start, additive increase, fast retransmit on
// three duplicate acks with a halved window, and retransmission timeouts with
// go-back-N and exponential backoff. Acks are cumulative, one per data packet.

#include <cstdint>
#include <deque>
#include <functional>
#include <set>
#include <utility>
#include <vector>

#include "foq/packet.hpp"
#include "foq/simulator.hpp"
#include "foq/units.hpp"

namespace foq {

enum class TcpState : std::uint8_t { SlowStart, CongestionAvoidance, Recovery };
enum class LossKind : std::uint8_t { TripleDup, Timeout };

struct TcpWindow {
  std::uint32_t cwnd = 1;             // packets
  std::uint32_t ssthresh = 1u << 16;  // packets
  std::uint32_t ack_count = 0;        // acks toward the next +1 in avoidance
  TcpState state = TcpState::SlowStart;
};

// One new (non-duplicate) ack. Slow start adds one packet; avoidance adds one
// packet per cwnd acks; the first new ack in recovery deflates to ssthresh.
TcpWindow tcp_on_ack(TcpWindow w);

// TripleDup: ssthresh = max(cwnd/2, 2), cwnd = ssthresh, Recovery.
// Timeout:   ssthresh = max(cwnd/2, 2), cwnd = 1, SlowStart.
TcpWindow tcp_on_loss(TcpWindow w, LossKind kind);

struct TcpParams {
  std::uint32_t packet_size = 10;          // bytes
  std::uint32_t initial_ssthresh = 1u << 16;
  SimTime rto_initial = 1'000'000'000;     // ns
  SimTime rto_min = 0;
  SimTime rto_max = 64'000'000'000;
  SimTime clock_granularity = 10'000'000;  // G in srtt + max(G, 4 rttvar)
  std::uint32_t max_backoff = 64;
};

// FIFO rate limiter with a byte buffer (0 = unbounded). Packets that do not
// fit are lost.
class AccessLink {
 public:
  using Sink = std::function<void(Packet)>;

  AccessLink(Simulator& sim, BitRate rate, Bytes buffer, PortId port, Sink sink);

  bool send(Packet packet);

  Bytes backlog() const { return backlog_; }
  std::uint64_t dropped() const { return dropped_; }

 private:
  void start();
  void done();

  Simulator& sim_;
  RateClock clock_;
  Bytes buffer_;
  PortId port_;
  Sink sink_;
  std::deque<Packet> queue_;
  Bytes backlog_ = 0;
  bool busy_ = false;
  std::uint64_t dropped_ = 0;
};

class TcpReceiver {
 public:
  // Returns the cumulative ack: the next sequence number expected.
  std::uint64_t on_data(std::uint64_t seq);
  std::uint64_t next_expected() const { return next_; }

 private:
  std::uint64_t next_ = 0;
  std::set<std::uint64_t> out_of_order_;
};

struct TcpStats {
  std::uint64_t sent = 0;
  std::uint64_t retransmitted = 0;
  std::uint64_t timeouts = 0;
  std::uint64_t fast_retransmits = 0;
  std::uint64_t acked = 0;  // packets cumulatively acknowledged
};

class TcpSender {
 public:
  using Transmit = std::function<void(Packet)>;

  TcpSender(Simulator& sim, TcpParams params, std::uint32_t source_id, FlowId flow,
            PortId ingress, PortId egress, Transmit transmit);

  // Schedules the first transmission; the sender is backlogged from then on.
  void start_at(SimTime at);
  void on_ack(std::uint64_t ack);

  const TcpWindow& window() const { return window_; }
  const TcpStats& stats() const { return stats_; }
  SimTime rto() const { return rto_; }
  std::uint32_t source_id() const { return id_; }
  bool started() const { return started_; }

 private:
  void send_available();
  void send_packet(std::uint64_t seq);
  void arm_timer();
  void on_timer();
  void rtt_sample(SimTime sample);

  Simulator& sim_;
  TcpParams params_;
  std::uint32_t id_;
  FlowId flow_;
  PortId ingress_;
  PortId egress_;
  Transmit transmit_;

  TcpWindow window_;
  TcpStats stats_;
  bool started_ = false;
  std::uint64_t snd_una_ = 0;
  std::uint64_t snd_nxt_ = 0;
  std::uint64_t snd_max_ = 0;
  std::uint64_t recover_ = 0;
  std::uint32_t dupacks_ = 0;
  std::uint32_t inflation_ = 0;  // fast recovery window inflation, packets

  // Karn: one timed segment at a time, never a retransmitted one.
  bool timing_ = false;
  std::uint64_t timed_seq_ = 0;
  SimTime timed_at_ = 0;
  bool have_rtt_ = false;
  double srtt_ = 0.0;
  double rttvar_ = 0.0;
  SimTime rto_;
  std::uint32_t backoff_ = 1;

  // Lazy retransmission timer: at most one pending event, re-armed on expiry
  // if the deadline has moved.
  SimTime deadline_ = -1;
  bool timer_pending_ = false;
};

struct SubnetGroup {
  std::uint32_t source_count = 1;
  BitRate link_rate = 10'000'000;
  SimTime window_begin = 0;
  SimTime window_end = 0;
  SimTime one_way_delay = 20'000'000;
  Bytes access_buffer = 0;  // 0 = unbounded

  void validate() const;
};

// Start times per group, uniform over each group's window, drawn from the
// stream ("tcp-start", group index).
std::vector<std::vector<SimTime>> staged_start(const std::vector<SubnetGroup>& groups,
                                               std::uint64_t seed);

// Offered:capacity after each stage: cumulative link-rate sum / destination rate.
std::vector<double> stage_overload_ratios(const std::vector<SubnetGroup>& groups,
                                          BitRate destination_rate);

}  // namespace foq

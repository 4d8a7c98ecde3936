#include "foq/cbr.hpp"

#include <memory>
#include <stdexcept>

namespace foq {

void CbrSource::validate() const {
  if (rate == 0) throw std::invalid_argument("rate must be > 0");
  if (packet_size == 0) throw std::invalid_argument("packet_size must be > 0");
  if (start < 0) throw std::invalid_argument("start must be >= 0");
  if (stop < start) throw std::invalid_argument("stop must not precede start");
}

SimTime cbr_departure(const CbrSource& source, std::uint64_t i) {
  const u128 num = static_cast<u128>(i) * source.packet_size * 8u *
                                static_cast<u128>(kNanosPerSecond);
  return source.start + static_cast<SimTime>(num / source.rate);
}

std::uint64_t cbr_packet_count(const CbrSource& source) {
  if (source.stop <= source.start) return 0;
  // Smallest i with departure(i) >= stop.
  const auto span = static_cast<u128>(source.stop - source.start);
  const u128 bits_ns =
      static_cast<u128>(source.packet_size) * 8u * kNanosPerSecond;
  // floor(i * bits_ns / rate) < span  <=>  i * bits_ns < span * rate
  const u128 limit = span * source.rate;
  return static_cast<std::uint64_t>((limit + bits_ns - 1) / bits_ns);
}

std::vector<SimTime> cbr_departures(const CbrSource& source) {
  const std::uint64_t n = cbr_packet_count(source);
  std::vector<SimTime> out;
  out.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) out.push_back(cbr_departure(source, i));
  return out;
}

namespace {

struct Emitter : std::enable_shared_from_this<Emitter> {
  Simulator* sim;
  CbrSource src;
  std::uint32_t id;
  std::uint64_t count;
  PacketSink sink;

  Emitter(Simulator* s, CbrSource c, std::uint32_t i, std::uint64_t n, PacketSink k)
      : sim(s), src(c), id(i), count(n), sink(std::move(k)) {}

  void arm(std::uint64_t i) {
    sim->schedule_at(cbr_departure(src, i), EventKey{src.ingress_port, src.flow_id},
                     [self = shared_from_this(), i] { self->emit(i); });
  }

  void emit(std::uint64_t i) {
    Packet p;
    p.flow_id = src.flow_id;
    p.source_id = id;
    p.ingress_port = src.ingress_port;
    p.egress_port = src.egress_port;
    p.size = src.packet_size;
    p.seq = i;
    p.created_at = sim->now();
    sink(p);
    if (i + 1 < count) arm(i + 1);
  }
};

}  // namespace

void cbr_schedule(Simulator& sim, const CbrSource& source, std::uint32_t source_id,
                  PacketSink sink) {
  source.validate();
  const std::uint64_t count = cbr_packet_count(source);
  if (count == 0) return;
  std::make_shared<Emitter>(&sim, source, source_id, count, std::move(sink))->arm(0);
}

}  // namespace foq

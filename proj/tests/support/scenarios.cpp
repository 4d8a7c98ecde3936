#include "scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "foq/analytic.hpp"
#include "foq/control_law.hpp"
#include "foq/rng.hpp"
#include "foq/switch.hpp"
#include "foq/wfq.hpp"

namespace foq::testing {

namespace {

template <class F>
void for_each_in(const TimeSeries& raw, const std::string& metric, std::int64_t port,
                 std::int64_t flow, double t0, double t1, F&& f) {
  for (const Record& r : raw.select(metric, port, flow))
    if (r.t_sec >= t0 && r.t_sec < t1) f(r.value);
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

Check fail(std::string why) { return {false, std::move(why)}; }

}  // namespace

ExperimentConfig load_fixture(const std::string& name) {
  return load_config(std::string(FOQ_CONFIG_DIR) + "/" + name);
}

double mean_over(const TimeSeries& raw, const std::string& metric, std::int64_t port,
                 std::int64_t flow, double t0, double t1) {
  double sum = 0.0;
  std::size_t n = 0;
  for_each_in(raw, metric, port, flow, t0, t1, [&](double v) {
    sum += v;
    ++n;
  });
  return n == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / static_cast<double>(n);
}

double max_over(const TimeSeries& raw, const std::string& metric, std::int64_t port,
                std::int64_t flow, double t0, double t1) {
  double m = -std::numeric_limits<double>::infinity();
  for_each_in(raw, metric, port, flow, t0, t1, [&](double v) { m = std::max(m, v); });
  return m;
}

double sum_over(const TimeSeries& raw, const std::string& metric, std::int64_t port,
                std::int64_t flow, double t0, double t1) {
  double s = 0.0;
  for_each_in(raw, metric, port, flow, t0, t1, [&](double v) { s += v; });
  return s;
}

ExperimentConfig small_tcp_config(std::uint32_t groups, std::uint32_t sources,
                                  SimTime duration, FeedbackMode mode) {
  ExperimentConfig cfg = load_fixture("tcp_scaled.cfg");
  cfg.tcp.groups.resize(groups);
  cfg.tcp.group_ingress.resize(groups);
  for (auto& g : cfg.tcp.groups) g.source_count = sources;
  cfg.duration = duration;
  cfg.switch_config.feedback.mode = mode;
  return cfg;
}

ExperimentConfig cbr_overload_config(double overload, FeedbackMode mode, SimTime duration) {
  ExperimentConfig cfg;
  const auto n = static_cast<int>(std::ceil(overload));
  SwitchConfig& sw = cfg.switch_config;
  sw.num_ports = n + 1;
  sw.line_rate = 100'000'000;
  sw.speedup = 1.28;
  sw.fabric_memory = 50'000;
  sw.fabric_reserve = sw.fabric_memory / 16;
  sw.out_queue_size = 20'000;
  sw.feedback.mode = mode;
  sw.flows.push_back(FlowSpec{1, ServiceClass::Assured, 1.0, std::nullopt});
  const auto rate = static_cast<BitRate>(overload * 1e8 / n);
  const std::uint32_t size = 15;
  const SimTime period = static_cast<SimTime>(size * 8 * 1e9 / static_cast<double>(rate));
  for (int i = 0; i < n; ++i) {
    CbrSource s;
    s.rate = rate;
    s.packet_size = size;
    s.start = period * i / n;
    s.stop = duration;
    s.flow_id = 1;
    s.ingress_port = i;
    s.egress_port = n;
    cfg.cbr.push_back(s);
  }
  cfg.duration = duration;
  cfg.window = sw.feedback.interval;
  return cfg;
}

Check check_byte_conservation() {
  std::vector<std::pair<std::string, ExperimentConfig>> runs;
  for (FeedbackMode m : {FeedbackMode::Off, FeedbackMode::GearBox, FeedbackMode::PI}) {
    ExperimentConfig cbr = load_fixture("cbr_scaled.cfg");
    cbr.duration = 60'000'000;
    cbr.switch_config.feedback.mode = m;
    runs.emplace_back("cbr/" + std::string(to_string(m)), cbr);
  }
  for (FeedbackMode m : {FeedbackMode::Off, FeedbackMode::GearBox})
    runs.emplace_back("tcp/" + std::string(to_string(m)),
                      small_tcp_config(2, 40, 3'000'000'000, m));

  for (const auto& [name, cfg] : runs) {
    const ExperimentResult res = run_experiment(cfg);
    if (res.flows.empty()) return fail(name + ": no flows");
    for (const FlowReport& f : res.flows) {
      const FlowTotals& t = f.totals;
      const Bytes out = t.ingress_dropped + t.fabric_dropped + t.egress_dropped + t.delivered +
                        f.resident;
      if (t.injected == 0) return fail(name + ": flow " + std::to_string(f.flow) + " idle");
      if (out != t.injected)
        return fail(name + ": flow " + std::to_string(f.flow) + " injected " +
                    std::to_string(t.injected) + " != accounted " + std::to_string(out));
      const double end = to_seconds(cfg.duration);
      auto row = [&](const char* metric) {
        const auto v = res.series.select(metric, f.port, f.flow);
        return v.size() == 1 && v[0].t_sec == end ? v[0].value : -1.0;
      };
      if (row("total_injected") != static_cast<double>(t.injected) ||
          row("total_delivered") != static_cast<double>(t.delivered) ||
          row("total_resident") != static_cast<double>(f.resident))
        return fail(name + ": report totals differ from the switch ledger");
    }
  }
  return {true, std::to_string(runs.size()) + " runs, every flow balances to the byte"};
}

Check check_wfq_share() {
  OutPortState port;
  for (auto [id, w] : {std::pair<FlowId, double>{1, 6.0}, {2, 1.0}}) {
    OutQueueState q;
    q.flow = id;
    q.weight = w;
    q.capacity = 1u << 30;
    port.queues.emplace(id, q);
  }
  RandomStream rng(7, "wfq-sizes");
  auto push = [&](FlowId id) {
    OutQueueState& q = port.queues.at(id);
    const auto size = static_cast<std::uint32_t>(8 + rng.next() % 8);
    Packet p;
    p.flow_id = id;
    p.size = size;
    q.packets.push_back({p, wfq_stamp(port, q, size)});
    q.backlog += size;
  };
  for (int i = 0; i < 4; ++i) {
    push(1);
    push(2);
  }

  // Service at 100 Mb/s for 250 ms. Time is counted in bit slots (10 ns) and
  // served bits are credited to 1 us bins, so window edges cut packets exactly.
  const std::uint64_t bits_per_bin = 100;
  const std::size_t bins = 250'000;
  const std::uint64_t horizon = bins * bits_per_bin;
  std::vector<double> served1(bins, 0.0), served2(bins, 0.0);
  std::uint64_t pos = 0;
  while (pos < horizon) {
    const auto id = out_scheduler_select(port);
    if (!id) return fail("scheduler went idle with backlogged queues");
    const QueuedPacket qp = wfq_take(port, *id);
    push(*id);
    auto& acc = *id == 1 ? served1 : served2;
    const std::uint64_t b = pos + std::uint64_t{qp.packet.size} * 8;
    while (pos < b && pos < horizon) {
      const std::uint64_t bin = pos / bits_per_bin;
      const std::uint64_t edge = std::min(b, (bin + 1) * bits_per_bin);
      acc[bin] += static_cast<double>(edge - pos) / 8.0;
      pos = edge;
    }
    pos = b;
  }
  std::vector<double> c1(bins + 1, 0.0), c2(bins + 1, 0.0);
  for (std::size_t i = 0; i < bins; ++i) {
    c1[i + 1] = c1[i] + served1[i];
    c2[i + 1] = c2[i] + served2[i];
  }
  double worst = 0.0;
  const std::size_t width = 50'000;
  for (std::size_t s = 0; s + width <= bins; s += 100) {
    const double ratio = (c1[s + width] - c1[s]) / (c2[s + width] - c2[s]);
    worst = std::max(worst, std::abs(ratio / 6.0 - 1.0));
  }
  if (worst > 0.02) return fail("worst 50 ms share error " + fmt(worst * 100) + "%");
  return {true, "worst 50 ms share error " + fmt(worst * 100) + "% (limit 2%)"};
}

Check check_gb_band() {
  const ExperimentConfig cfg = cbr_overload_config(2.0, FeedbackMode::GearBox, 400'000'000);
  const ExperimentResult res = run_experiment(cfg);
  const GbParams& gb = cfg.switch_config.feedback.gb;
  const double eps = gb.beta;
  const PortId out = cfg.switch_config.num_ports - 1;
  double lo = 1.0, hi = 0.0;
  for (const Record& r : res.raw.select("relcong", out, 1)) {
    if (r.t_sec <= 0.1) continue;
    lo = std::min(lo, r.value);
    hi = std::max(hi, r.value);
  }
  const double drops = sum_over(res.raw, "fabric_drop_rate", out, 1, 0.1001, 1.0);
  const std::string range = "relcong in [" + fmt(lo) + ", " + fmt(hi) + "] after 100 ms";
  if (lo < gb.d_min - eps || hi > gb.d_max + eps)
    return fail(range + ", band [" + fmt(gb.d_min - eps) + ", " + fmt(gb.d_max + eps) + "]");
  if (drops != 0.0) return fail("fabric drops after the transient");
  return {true, range + ", no fabric drops"};
}

Check check_admit_composition() {
  const double beta = derive_beta(0.17, 0.02);
  const std::size_t size = 64;
  const auto table = drop_level_table(beta, size);
  GbState st;
  double admit = 1.0;
  for (std::size_t k = 0; k < size; ++k) {
    if (st.level_index != k) return fail("pointer did not follow Increase signals");
    const double exact = std::pow(1.0 - beta, static_cast<double>(k));
    // P_k is stored, so 1 - P_k can carry one rounding of the subtraction.
    if (std::abs((1.0 - table[k]) - exact) > std::numeric_limits<double>::epsilon())
      return fail("1 - P_" + std::to_string(k) + " != (1-beta)^k");
    if (std::abs(admit - exact) > 1e-14 * exact)
      return fail("k-fold product drifts at k=" + std::to_string(k));
    st = apply_gb_signal(st, FeedbackSignal::Increase, size);
    admit *= 1.0 - beta;
  }
  return {true, "64 table levels, 1 - P_k == (1-beta)^k to one ulp of 1"};
}

Check check_vieta() {
  double worst = 0.0;
  for (int i = 0; i <= 20; ++i) {
    for (int j = 0; j <= 40; ++j) {
      const double k = 0.05 * i;
      const double ki = -0.5 + 0.1 * j;
      const Poles p = poles(k, ki);
      worst = std::max(worst, std::abs(p.z1 * p.z2 + k));
      worst = std::max(worst, std::abs(p.z1 + p.z2 + (k + ki - 1.0)));
    }
  }
  if (worst > 1e-12) return fail("Vieta residual " + fmt(worst));
  return {true, "max Vieta residual " + fmt(worst) + " over 861 gain pairs"};
}

Check check_determinism() {
  ExperimentConfig cbr = load_fixture("cbr_scaled.cfg");
  cbr.duration = 50'000'000;
  const ExperimentConfig tcp = small_tcp_config(2, 40, 3'000'000'000, FeedbackMode::GearBox);
  for (const ExperimentConfig* cfg : {static_cast<const ExperimentConfig*>(&cbr), &tcp}) {
    const std::string a = run_experiment(*cfg).series.to_csv();
    const std::string b = run_experiment(*cfg).series.to_csv();
    if (a != b) return fail("equal seeds gave different CSV");
  }
  ExperimentConfig other = tcp;
  other.seed = tcp.seed + 1;
  if (run_experiment(other).series.to_csv() == run_experiment(tcp).series.to_csv())
    return fail("seed has no effect on the TCP run");
  return {true, "CBR and TCP runs bit-identical under equal seeds"};
}

const std::vector<NamedCheck>& property_checks() {
  static const std::vector<NamedCheck> checks = {
      {"byte conservation", &check_byte_conservation},
      {"WFQ share", &check_wfq_share},
      {"GearBox band containment", &check_gb_band},
      {"admit-probability composition", &check_admit_composition},
      {"Vieta pole identities", &check_vieta},
      {"determinism", &check_determinism},
  };
  return checks;
}

}  // namespace foq::testing

#include "foq/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace foq {

namespace {

std::string join(const std::vector<std::string>& errors) {
  std::string out;
  for (const auto& e : errors) {
    if (!out.empty()) out += '\n';
    out += e;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Quantity {
  double number;
  std::string_view unit;
};

Quantity split_quantity(std::string_view value) {
  value = trim(value);
  double x = 0.0;
  const auto* first = value.data();
  const auto* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(first, last, x);
  if (ec != std::errc{} || ptr == first) throw std::invalid_argument("not a number");
  if (!std::isfinite(x)) throw std::invalid_argument("not a finite number");
  return {x, trim(std::string_view(ptr, static_cast<std::size_t>(last - ptr)))};
}

template <typename T>
T scaled(double x, double factor) {
  if (x < 0.0) throw std::invalid_argument("negative value");
  const double v = x * factor;
  if (v > 9.2e18) throw std::invalid_argument("value out of range");
  return static_cast<T>(std::llround(v));
}

}  // namespace

BitRate parse_rate(std::string_view value) {
  const auto [x, unit] = split_quantity(value);
  double f = 0.0;
  if (unit.empty() || unit == "bps") f = 1.0;
  else if (unit == "kbps" || unit == "Kbps") f = 1e3;
  else if (unit == "Mbps") f = 1e6;
  else if (unit == "Gbps") f = 1e9;
  else throw std::invalid_argument("expected a rate unit (bps, kbps, Mbps, Gbps), got '" +
                                   std::string(unit) + "'");
  return scaled<BitRate>(x, f);
}

Bytes parse_size(std::string_view value) {
  const auto [x, unit] = split_quantity(value);
  double f = 0.0;
  if (unit.empty() || unit == "B") f = 1.0;
  else if (unit == "KB" || unit == "kB") f = 1e3;
  else if (unit == "MB") f = 1e6;
  else throw std::invalid_argument("expected a size unit (B, KB, MB), got '" +
                                   std::string(unit) + "'");
  return scaled<Bytes>(x, f);
}

SimTime parse_duration(std::string_view value) {
  const auto [x, unit] = split_quantity(value);
  double f = 0.0;
  if (unit == "s") f = 1e9;
  else if (unit == "ms") f = 1e6;
  else if (unit == "us") f = 1e3;
  else if (unit.empty() || unit == "ns") f = 1.0;
  else throw std::invalid_argument("expected a time unit (s, ms, us, ns), got '" +
                                   std::string(unit) + "'");
  return scaled<SimTime>(x, f);
}

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error(join(errors)), errors_(std::move(errors)) {}

namespace {

struct Entry {
  std::string value;
  int line = 0;
  bool used = false;
};

class Reader {
 public:
  explicit Reader(std::string_view text) {
    std::size_t pos = 0;
    int line_no = 0;
    while (pos <= text.size()) {
      const auto nl = text.find('\n', pos);
      std::string_view line =
          text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
      pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
      ++line_no;
      if (const auto hash = line.find('#'); hash != std::string_view::npos)
        line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) {
        error(line_no, "expected 'key = value'");
        continue;
      }
      const std::string key(trim(line.substr(0, eq)));
      const std::string value(trim(line.substr(eq + 1)));
      if (key.empty()) {
        error(line_no, "empty key");
        continue;
      }
      if (entries_.count(key)) {
        error(line_no, key + ": duplicate key (first set on line " +
                           std::to_string(entries_[key].line) + ")");
        continue;
      }
      entries_[key] = Entry{value, line_no, false};
    }
  }

  bool has_prefix(std::string_view prefix) const {
    auto it = entries_.lower_bound(std::string(prefix));
    return it != entries_.end() && it->first.compare(0, prefix.size(), prefix) == 0;
  }

  // Distinct middle components of keys "<prefix><id>.<rest>".
  std::vector<std::string> ids(std::string_view prefix) const {
    std::set<std::string> out;
    for (const auto& [k, e] : entries_) {
      if (k.compare(0, prefix.size(), prefix) != 0) continue;
      const auto rest = std::string_view(k).substr(prefix.size());
      const auto dot = rest.find('.');
      if (dot == std::string_view::npos || dot == 0) continue;
      out.emplace(rest.substr(0, dot));
    }
    return {out.begin(), out.end()};
  }

  template <typename T, typename Parse>
  bool get(const std::string& key, T& target, Parse parse) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return false;
    it->second.used = true;
    try {
      target = parse(it->second.value);
      return true;
    } catch (const std::exception& e) {
      error(it->second.line, key + ": " + e.what());
      return false;
    }
  }

  bool rate(const std::string& key, BitRate& t) { return get(key, t, parse_rate); }
  bool size(const std::string& key, Bytes& t) { return get(key, t, parse_size); }
  bool time(const std::string& key, SimTime& t) { return get(key, t, parse_duration); }
  bool real(const std::string& key, double& t) {
    return get(key, t, [](const std::string& v) {
      const auto q = split_quantity(v);
      if (!q.unit.empty()) throw std::invalid_argument("dimensionless value expected");
      return q.number;
    });
  }
  template <typename Int>
  bool integer(const std::string& key, Int& t) {
    return get(key, t, [](const std::string& v) {
      long long x = 0;
      const auto* last = v.data() + v.size();
      auto [ptr, ec] = std::from_chars(v.data(), last, x);
      if (ec != std::errc{} || ptr != last) throw std::invalid_argument("not an integer");
      if (x < 0) throw std::invalid_argument("negative value");
      return static_cast<Int>(x);
    });
  }
  bool text(const std::string& key, std::string& t) {
    return get(key, t, [](const std::string& v) { return v; });
  }
  template <typename E>
  bool choice(const std::string& key, E& t, const std::vector<std::pair<std::string, E>>& opts) {
    return get(key, t, [&opts](const std::string& v) {
      std::string names;
      for (const auto& [name, e] : opts) {
        if (name == v) return e;
        names += (names.empty() ? "" : ", ") + name;
      }
      throw std::invalid_argument("expected one of " + names + ", got '" + v + "'");
      return E{};
    });
  }

  bool required(const std::string& key) {
    if (entries_.count(key)) return true;
    errors_.push_back(key + ": required");
    return false;
  }

  void error(int line, std::string msg) {
    errors_.push_back("line " + std::to_string(line) + ": " + std::move(msg));
  }
  void error(std::string msg) { errors_.push_back(std::move(msg)); }

  void report_unused() {
    for (const auto& [k, e] : entries_)
      if (!e.used) error(e.line, k + ": unknown key");
  }

  std::vector<std::string>& errors() { return errors_; }

 private:
  std::map<std::string, Entry> entries_;
  std::vector<std::string> errors_;
};

void read_red(Reader& r, const std::string& prefix, RedParams& red) {
  r.real(prefix + "max_p", red.max_p);
  r.size(prefix + "min_th", red.min_th);
  r.size(prefix + "max_th", red.max_th);
  r.real(prefix + "weight", red.weight);
  r.time(prefix + "sample_interval", red.sample_interval);
}

std::optional<QueueManagement> read_policy(Reader& r, const std::string& prefix) {
  enum class Policy { DropTail, Red };
  Policy p = Policy::DropTail;
  if (!r.choice<Policy>(prefix + "policy", p,
                        {{"droptail", Policy::DropTail}, {"red", Policy::Red}})) {
    if (!r.has_prefix(prefix + "red.")) return std::nullopt;
    p = Policy::Red;
  }
  if (p == Policy::DropTail) return DropTail{};
  RedParams red;
  read_red(r, prefix + "red.", red);
  return red;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  Reader r(text);
  ExperimentConfig cfg;
  SwitchConfig& sw = cfg.switch_config;

  if (!r.has_prefix("switch.")) r.error("missing switch section");

  if (r.required("experiment.duration")) r.time("experiment.duration", cfg.duration);
  r.integer("experiment.seed", cfg.seed);
  r.text("experiment.output", cfg.output_path);
  r.time("experiment.window", cfg.window);

  r.integer("switch.ports", sw.num_ports);
  r.rate("switch.line_rate", sw.line_rate);
  r.real("switch.speedup", sw.speedup);
  r.integer("switch.classes", sw.num_classes);
  r.choice<CounterUnit>("switch.counter_unit", sw.counter_unit,
                        {{"bytes", CounterUnit::Bytes}, {"packets", CounterUnit::Packets}});

  r.size("fabric.memory", sw.fabric_memory);
  if (!r.size("fabric.reserve", sw.fabric_reserve)) sw.fabric_reserve = sw.fabric_memory / 16;
  r.integer("fabric.priorities", sw.fabric_priorities);

  r.size("out_queue.size", sw.out_queue_size);
  if (auto qm = read_policy(r, "out_queue.")) sw.queue_mgmt = *qm;

  FeedbackConfig& fb = sw.feedback;
  r.choice<FeedbackMode>("feedback.mode", fb.mode,
                         {{"off", FeedbackMode::Off},
                          {"pi", FeedbackMode::PI},
                          {"gearbox", FeedbackMode::GearBox}});
  r.time("feedback.interval", fb.interval);
  r.time("feedback.delay", fb.delay);
  r.choice<CongestionMeasure>("feedback.measure", fb.measure,
                              {{"relcong", CongestionMeasure::RelativeCongestion},
                               {"dropprob", CongestionMeasure::DropProbability}});
  r.real("feedback.k", fb.pi.gain_p);
  r.real("feedback.ki", fb.pi.gain_i);
  r.real("feedback.alpha", fb.pi.alpha);
  r.real("feedback.d_max", fb.gb.d_max);
  r.real("feedback.d_min", fb.gb.d_min);
  r.integer("feedback.table_size", fb.gb.table_size);
  if (!r.real("feedback.beta", fb.gb.beta)) {
    if (fb.gb.d_min >= 0.0 && fb.gb.d_min < fb.gb.d_max && fb.gb.d_max < 1.0)
      fb.gb.beta = derive_beta(fb.gb.d_max, fb.gb.d_min);
  }

  for (const auto& id : r.ids("flow.")) {
    const std::string p = "flow." + id + ".";
    FlowSpec f;
    unsigned long v = 0;
    auto [ptr, ec] = std::from_chars(id.data(), id.data() + id.size(), v);
    if (ec != std::errc{} || ptr != id.data() + id.size() || v > UINT32_MAX) {
      r.error(p + "*: flow id must be a non-negative integer");
      continue;
    }
    f.id = static_cast<FlowId>(v);
    r.choice<ServiceClass>(p + "class", f.service_class,
                           {{"premium", ServiceClass::Premium},
                            {"assured", ServiceClass::Assured},
                            {"best_effort", ServiceClass::BestEffort}});
    r.real(p + "weight", f.weight);
    f.queue_mgmt = read_policy(r, p);
    sw.flows.push_back(f);
  }
  std::sort(sw.flows.begin(), sw.flows.end(),
            [](const FlowSpec& a, const FlowSpec& b) { return a.id < b.id; });

  for (const auto& name : r.ids("cbr.")) {
    const std::string p = "cbr." + name + ".";
    CbrSource s;
    s.stop = cfg.duration;
    if (r.required(p + "rate")) r.rate(p + "rate", s.rate);
    if (r.required(p + "packet_size")) {
      Bytes size = 0;
      if (r.size(p + "packet_size", size)) s.packet_size = static_cast<std::uint32_t>(size);
    }
    r.time(p + "start", s.start);
    r.time(p + "stop", s.stop);
    r.integer(p + "flow", s.flow_id);
    r.integer(p + "ingress", s.ingress_port);
    r.integer(p + "egress", s.egress_port);
    try {
      s.validate();
    } catch (const std::exception& e) {
      r.error(p + "*: " + e.what());
    }
    for (PortId port : {s.ingress_port, s.egress_port})
      if (port >= sw.num_ports) r.error(p + "*: port " + std::to_string(port) + " out of range");
    cfg.cbr.push_back(s);
  }

  TcpExperiment& tcp = cfg.tcp;
  {
    Bytes size = tcp.params.packet_size;
    if (r.size("tcp.packet_size", size)) tcp.params.packet_size = static_cast<std::uint32_t>(size);
  }
  r.integer("tcp.initial_ssthresh", tcp.params.initial_ssthresh);
  r.time("tcp.rto_initial", tcp.params.rto_initial);
  r.time("tcp.rto_min", tcp.params.rto_min);
  r.time("tcp.rto_max", tcp.params.rto_max);
  r.time("tcp.granularity", tcp.params.clock_granularity);
  r.integer("tcp.max_backoff", tcp.params.max_backoff);
  r.integer("tcp.flow", tcp.flow);
  r.integer("tcp.egress", tcp.egress);

  std::vector<std::string> group_ids = r.ids("tcp.group.");
  std::sort(group_ids.begin(), group_ids.end(), [](const std::string& a, const std::string& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  for (const auto& id : group_ids) {
    const std::string p = "tcp.group." + id + ".";
    SubnetGroup g;
    PortId ingress = static_cast<PortId>(tcp.groups.size());
    if (r.required(p + "sources")) r.integer(p + "sources", g.source_count);
    r.rate(p + "link_rate", g.link_rate);
    r.time(p + "start", g.window_begin);
    g.window_end = g.window_begin;
    r.time(p + "end", g.window_end);
    r.time(p + "one_way_delay", g.one_way_delay);
    r.size(p + "access_buffer", g.access_buffer);
    r.integer(p + "ingress", ingress);
    try {
      g.validate();
    } catch (const std::exception& e) {
      r.error(p + "*: " + e.what());
    }
    if (ingress >= sw.num_ports)
      r.error(p + "ingress: port " + std::to_string(ingress) + " out of range");
    tcp.groups.push_back(g);
    tcp.group_ingress.push_back(ingress);
  }
  if (!tcp.groups.empty()) {
    if (tcp.egress >= sw.num_ports) r.error("tcp.egress: port out of range");
    if (tcp.params.packet_size == 0) r.error("tcp.packet_size: must be > 0");
  }

  r.report_unused();

  if (r.has_prefix("switch.")) {
    for (auto& e : sw.validate()) r.error(e);
  }
  if (r.has_prefix("experiment.duration") && cfg.duration <= 0)
    r.error("experiment.duration: must be > 0");
  if (cfg.window < 0) r.error("experiment.window: must be > 0");

  if (!r.errors().empty()) throw ConfigError(r.errors());
  if (cfg.window == 0) cfg.window = sw.feedback.interval;
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError({"cannot open " + path.string()});
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config(os.str());
}

}  // namespace foq

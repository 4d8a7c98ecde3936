#pragma once

// Experiment description in flat `section.key = value` text. Values may carry
// units: rates (bps, kbps, Mbps, Gbps), sizes (B, KB, MB; decimal) and times
// (s, ms, us, ns). `#` starts a comment.
//
//   experiment.duration = 200ms
//   switch.line_rate    = 100Mbps
//   flow.1.class        = assured
//   cbr.a.rate          = 95.2Mbps
//   tcp.group.0.sources = 1000

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "foq/cbr.hpp"
#include "foq/switch_config.hpp"
#include "foq/tcp.hpp"

namespace foq {

struct TcpExperiment {
  TcpParams params;
  FlowId flow = 1;
  PortId egress = 0;
  std::vector<SubnetGroup> groups;
  std::vector<PortId> group_ingress;  // one per group
};

struct ExperimentConfig {
  SwitchConfig switch_config;
  std::vector<CbrSource> cbr;
  TcpExperiment tcp;
  SimTime duration = 0;
  std::uint64_t seed = 1;
  std::string output_path;
  SimTime window = 0;  // 0: the feedback interval
};

// Every problem found, in file order.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

// Unit parsing, exposed for tests. Each throws std::invalid_argument with a
// short reason.
BitRate parse_rate(std::string_view value);
Bytes parse_size(std::string_view value);
SimTime parse_duration(std::string_view value);

}  // namespace foq

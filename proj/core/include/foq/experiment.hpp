#pragma once

#include <cstdint>
#include <vector>

#include "foq/config.hpp"
#include "foq/switch.hpp"
#include "foq/time_series.hpp"

namespace foq {

struct FlowReport {
  PortId port = 0;
  FlowId flow = 0;
  FlowTotals totals;
  Bytes resident = 0;
};

struct TcpSummary {
  std::uint64_t sources = 0;
  std::uint64_t sent = 0;
  std::uint64_t retransmitted = 0;
  std::uint64_t timeouts = 0;
  std::uint64_t fast_retransmits = 0;
  std::uint64_t access_drops = 0;
};

struct ExperimentResult {
  TimeSeries raw;     // one record per metric per feedback interval
  TimeSeries series;  // raw smoothed over the configured window, then totals
  std::vector<FlowReport> flows;
  TcpSummary tcp;
  std::uint64_t events = 0;
};

// Builds the switch and every source, runs for the configured duration and
// collects the per-interval series. Totals rows (metric "total_*", unit B)
// are stamped at the end time, one per flow.
ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace foq

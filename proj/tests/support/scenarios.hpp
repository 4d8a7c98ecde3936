#pragma once

// Shared scenario builders and property checks for the gtest suites and the
// acceptance runner.

#include <string>
#include <vector>

#include "foq/config.hpp"
#include "foq/experiment.hpp"
#include "foq/time_series.hpp"

namespace foq::testing {

struct Check {
  bool ok = true;
  std::string detail;
};

ExperimentConfig load_fixture(const std::string& name);

// Mean of one raw series over [t0, t1) seconds.
double mean_over(const TimeSeries& raw, const std::string& metric, std::int64_t port,
                 std::int64_t flow, double t0, double t1);
double max_over(const TimeSeries& raw, const std::string& metric, std::int64_t port,
                std::int64_t flow, double t0, double t1);
double sum_over(const TimeSeries& raw, const std::string& metric, std::int64_t port,
                std::int64_t flow, double t0, double t1);

// A small Reno population: `groups` subnets of `sources` each, one start per
// `stage` seconds, through the same switch as the scaled TCP fixture.
ExperimentConfig small_tcp_config(std::uint32_t groups, std::uint32_t sources,
                                  SimTime duration, FeedbackMode mode);

// One assured flow offered `overload` times the line rate from CBR sources.
ExperimentConfig cbr_overload_config(double overload, FeedbackMode mode, SimTime duration);

Check check_byte_conservation();
Check check_wfq_share();
Check check_gb_band();
Check check_admit_composition();
Check check_vieta();
Check check_determinism();

struct NamedCheck {
  const char* name;
  Check (*run)();
};
const std::vector<NamedCheck>& property_checks();

}  // namespace foq::testing

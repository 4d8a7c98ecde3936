#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace foq {

// Scope value used for port or flow when a record is not tied to one.
inline constexpr std::int64_t kAggregate = -1;

struct Record {
  double t_sec = 0.0;
  std::string metric;
  std::int64_t port = kAggregate;
  std::int64_t flow = kAggregate;
  double value = 0.0;
  std::string unit;

  bool operator==(const Record&) const = default;
};

// Flat list of samples, one metric per record, timestamps non-decreasing.
//
// CSV layout (UTF-8, LF):  t_sec,metric,port,flow,value,unit
// Aggregate scopes are written as "*". Numbers use the shortest decimal form
// that parses back to the same double.
class TimeSeries {
 public:
  void add(double t_sec, std::string metric, std::int64_t port, std::int64_t flow,
           double value, std::string unit);

  const std::vector<Record>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  // Records of one (metric, port, flow) series in time order.
  std::vector<Record> select(std::string_view metric, std::int64_t port,
                             std::int64_t flow) const;

  std::string to_csv() const;
  // Throws std::invalid_argument with the offending line number.
  static TimeSeries from_csv(std::string_view text);

  bool operator==(const TimeSeries&) const = default;

 private:
  std::vector<Record> records_;
};

// Trailing-window average of every series. Each output point is the mean of
// the samples in the window ending at it; for rate metrics sampled on a fixed
// interval this is the number of bytes in the window divided by its width.
// The window holds round(width / native) samples, where the native interval is
// the smallest positive spacing of each series. Shorter at the series start.
TimeSeries sliding_window(const TimeSeries& series, double width_sec);

}  // namespace foq

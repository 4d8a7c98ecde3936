#include "foq/time_series.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <stdexcept>
#include <tuple>

namespace foq {

namespace {

void append_number(std::string& out, double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
  out.append(buf, end);
}

void append_scope(std::string& out, std::int64_t v) {
  if (v == kAggregate) {
    out.push_back('*');
  } else {
    out += std::to_string(v);
  }
}

double parse_double(std::string_view s, std::size_t line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw std::invalid_argument("line " + std::to_string(line) + ": bad number '" +
                                std::string(s) + "'");
  return v;
}

std::int64_t parse_scope(std::string_view s, std::size_t line) {
  if (s == "*") return kAggregate;
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || v < 0)
    throw std::invalid_argument("line " + std::to_string(line) + ": bad scope '" +
                                std::string(s) + "'");
  return v;
}

constexpr std::string_view kHeader = "t_sec,metric,port,flow,value,unit";

}  // namespace

void TimeSeries::add(double t_sec, std::string metric, std::int64_t port,
                     std::int64_t flow, double value, std::string unit) {
  if (!records_.empty() && t_sec < records_.back().t_sec)
    throw std::logic_error("time series timestamps must be non-decreasing");
  records_.push_back({t_sec, std::move(metric), port, flow, value, std::move(unit)});
}

std::vector<Record> TimeSeries::select(std::string_view metric, std::int64_t port,
                                       std::int64_t flow) const {
  std::vector<Record> out;
  for (const auto& r : records_)
    if (r.metric == metric && r.port == port && r.flow == flow) out.push_back(r);
  return out;
}

std::string TimeSeries::to_csv() const {
  std::string out(kHeader);
  out.push_back('\n');
  for (const auto& r : records_) {
    append_number(out, r.t_sec);
    out.push_back(',');
    out += r.metric;
    out.push_back(',');
    append_scope(out, r.port);
    out.push_back(',');
    append_scope(out, r.flow);
    out.push_back(',');
    append_number(out, r.value);
    out.push_back(',');
    out += r.unit;
    out.push_back('\n');
  }
  return out;
}

TimeSeries TimeSeries::from_csv(std::string_view text) {
  TimeSeries ts;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != kHeader)
        throw std::invalid_argument("line 1: expected header '" + std::string(kHeader) + "'");
      header_seen = true;
      continue;
    }
    std::string_view fields[6];
    std::size_t n = 0;
    while (n < 6) {
      const auto comma = line.find(',');
      fields[n++] = line.substr(0, comma);
      if (comma == std::string_view::npos) {
        line = {};
        break;
      }
      line = line.substr(comma + 1);
    }
    if (n != 6 || !line.empty())
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected 6 fields");
    ts.add(parse_double(fields[0], line_no), std::string(fields[1]),
           parse_scope(fields[2], line_no), parse_scope(fields[3], line_no),
           parse_double(fields[4], line_no), std::string(fields[5]));
  }
  if (!header_seen) throw std::invalid_argument("missing CSV header");
  return ts;
}

TimeSeries sliding_window(const TimeSeries& series, double width_sec) {
  using Key = std::tuple<std::string, std::int64_t, std::int64_t>;
  std::map<Key, std::vector<std::size_t>> index;
  const auto& recs = series.records();
  for (std::size_t i = 0; i < recs.size(); ++i)
    index[{recs[i].metric, recs[i].port, recs[i].flow}].push_back(i);

  std::vector<double> averaged(recs.size());
  for (const auto& [key, idx] : index) {
    double native = 0.0;
    for (std::size_t j = 1; j < idx.size(); ++j) {
      const double dt = recs[idx[j]].t_sec - recs[idx[j - 1]].t_sec;
      if (dt > 0.0 && (native == 0.0 || dt < native)) native = dt;
    }
    std::size_t span = 1;
    if (native > 0.0)
      span = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(width_sec / native)));

    for (std::size_t j = 0; j < idx.size(); ++j) {
      const std::size_t count = std::min(j + 1, span);
      // Incremental mean: exact for constant windows.
      double mean = 0.0;
      std::size_t k = 0;
      for (std::size_t m = j + 1 - count; m <= j; ++m) {
        ++k;
        mean += (recs[idx[m]].value - mean) / static_cast<double>(k);
      }
      averaged[idx[j]] = mean;
    }
  }

  TimeSeries out;
  for (std::size_t i = 0; i < recs.size(); ++i)
    out.add(recs[i].t_sec, recs[i].metric, recs[i].port, recs[i].flow, averaged[i],
            recs[i].unit);
  return out;
}

}  // namespace foq

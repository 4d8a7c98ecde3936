#include "foq/control_law.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace foq {

void PiParams::validate() const {
  if (!(interval > 0.0)) throw std::invalid_argument("interval must be > 0");
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("alpha must lie in (0, 1]");
  if (!(speedup > 1.0)) throw std::invalid_argument("speedup must be > 1");
  if (!(line_rate > 0.0)) throw std::invalid_argument("line_rate must be > 0");
}

PiOutput pi_update(const PiState& state, double measured_rate,
                   double desired_rate, const PiParams& params) {
  const double error = measured_rate - desired_rate;
  const double integral_step = params.gain_i * error;
  double accumulator = state.accumulator + integral_step;
  const double linear = params.gain_p * error + accumulator;

  const double upper = state.last_drop_prob < 1.0
                           ? measured_rate / (1.0 - state.last_drop_prob)
                           : std::numeric_limits<double>::infinity();
  const double drop_rate = std::clamp(linear, 0.0, upper);

  if ((linear < 0.0 && integral_step < 0.0) ||
      (linear > upper && integral_step > 0.0)) {
    accumulator = state.accumulator;
  }

  PiState next;
  next.accumulator = accumulator;
  next.last_error = error;
  next.last_drop_prob = state.last_drop_prob;
  return {drop_rate, next};
}

double drop_prob_from_rate(double drop_rate, double fabric_out_rate,
                           double prev_prob) {
  if (!(fabric_out_rate > 0.0)) return prev_prob;
  const double p = (1.0 - prev_prob) * drop_rate / fabric_out_rate;
  return std::clamp(p, 0.0, 1.0);
}

double gb_delta(double error, double prev_error, double fabric_out_rate,
                const PiParams& params) {
  if (fabric_out_rate == 0.0) throw std::domain_error("undefined delta");
  return ((params.gain_p + params.gain_i) * error - params.gain_p * prev_error) /
         fabric_out_rate;
}

double quantize_delta(double delta, double delta_max, double delta_min,
                      double beta) {
  if (delta > delta_max) return beta;
  if (delta < -delta_min) return beta / (beta - 1.0);
  return 0.0;
}

void GbParams::validate() const {
  if (!(d_min >= 0.0 && d_min < d_max && d_max < 1.0))
    throw std::invalid_argument("thresholds must satisfy 0 <= d_min < d_max < 1");
  if (!(beta > 0.0 && beta < 1.0))
    throw std::invalid_argument("beta must lie in (0, 1)");
  if (table_size < 2) throw std::invalid_argument("table_size must be >= 2");
}

std::string_view to_string(FeedbackSignal signal) {
  switch (signal) {
    case FeedbackSignal::Increase: return "increase";
    case FeedbackSignal::Decrease: return "decrease";
    case FeedbackSignal::Hold: break;
  }
  return "hold";
}

FeedbackSignal gb_signal_from_congestion(double relative_congestion,
                                         const GbParams& params) {
  if (relative_congestion > params.d_max) return FeedbackSignal::Increase;
  if (relative_congestion < params.d_min) return FeedbackSignal::Decrease;
  return FeedbackSignal::Hold;
}

std::vector<double> drop_level_table(double beta, std::size_t table_size) {
  if (!(beta > 0.0 && beta < 1.0))
    throw std::invalid_argument("beta must lie in (0, 1)");
  if (table_size < 2) throw std::invalid_argument("table_size must be >= 2");

  std::vector<double> table(table_size);
  double admit = 1.0;
  for (std::size_t k = 0; k < table_size; ++k) {
    table[k] = 1.0 - admit;
    admit *= 1.0 - beta;
  }
  return table;
}

GbState apply_gb_signal(GbState state, FeedbackSignal signal,
                        std::size_t table_size) {
  switch (signal) {
    case FeedbackSignal::Increase:
      if (state.level_index + 1 < table_size) ++state.level_index;
      break;
    case FeedbackSignal::Decrease:
      if (state.level_index > 0) --state.level_index;
      break;
    case FeedbackSignal::Hold:
      break;
  }
  return state;
}

namespace {

void check_band(double d_max, double d_min) {
  if (!(d_min >= 0.0 && d_max < 1.0))
    throw std::invalid_argument("thresholds must lie in [0, 1)");
  if (!(d_min < d_max)) throw std::invalid_argument("degenerate hysteresis band");
}

}  // namespace

double derive_beta(double d_max, double d_min) {
  check_band(d_max, d_min);
  return 1.0 - std::sqrt((1.0 - d_max) / (1.0 - d_min));
}

Thresholds derive_thresholds(double alpha, double speedup, double gain_i,
                             double delta_max, double delta_min) {
  const double as = alpha * speedup;
  if (!(as > 1.0)) throw std::invalid_argument("no congestion headroom");
  if (!(gain_i > 0.0)) throw std::invalid_argument("gain_i must be > 0");

  const double base = 1.0 - 1.0 / as;
  Thresholds t;
  t.d_max = base + delta_max / (as * gain_i);
  t.d_min = std::max(0.0, base - delta_min / (as * gain_i));
  t.degenerate = !(t.d_min < t.d_max);
  return t;
}

DeltaBounds delta_bounds_from_thresholds(double alpha, double speedup,
                                         double gain_i, double d_max,
                                         double d_min) {
  const double as = alpha * speedup;
  if (!(as > 1.0)) throw std::invalid_argument("no congestion headroom");
  const double base = 1.0 - 1.0 / as;
  return {(d_max - base) * as * gain_i, (base - d_min) * as * gain_i};
}

double d_mid(double d_min, double d_max) {
  check_band(d_max, d_min);
  return 1.0 - std::sqrt((1.0 - d_min) * (1.0 - d_max));
}

}  // namespace foq

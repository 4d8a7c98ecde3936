#pragma once

// Feedback controllers run at each OUT queue: a discrete PI law on the drop
// rate, its conversion to an ingress drop probability, and the quantized
// Gear-Box variant that only moves a pointer through a table of drop levels.

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace foq {

struct PiParams {
  double gain_p = 0.0;      // proportional gain
  double gain_i = 0.5;      // integral gain
  double interval = 1e-3;   // sampling interval, seconds
  double alpha = 0.95;      // desired rate = alpha * speedup * service rate
  double speedup = 1.28;
  double line_rate = 1e8;   // bits/s

  // Throws std::invalid_argument naming the first violated field.
  void validate() const;
};

struct PiState {
  double accumulator = 0.0;     // gain_i * sum of errors, bits/s
  double last_error = 0.0;      // e[n-1], bits/s
  double last_drop_prob = 0.0;  // p[n-1]
};

struct PiOutput {
  double drop_rate;  // bits/s
  PiState state;
};

// rho[n] = K e[n] + K_I sum e[m], with e = measured - desired.
//
// The emitted drop rate is clamped to [0, measured / (1 - p[n-1])], i.e. it
// can be neither negative nor larger than the estimated arrival rate. While
// clamped, the accumulator does not integrate further into the saturated
// direction.
PiOutput pi_update(const PiState& state, double measured_rate,
                   double desired_rate, const PiParams& params);

// p[n] = (1 - p[n-1]) rho[n] / r[n], clamped to [0, 1]. A zero fabric output
// rate carries no information and returns prev_prob unchanged.
double drop_prob_from_rate(double drop_rate, double fabric_out_rate,
                           double prev_prob);

// delta[n] = ((K + K_I) e[n] - K e[n-1]) / r[n].
// Throws std::domain_error("undefined delta") when fabric_out_rate == 0.
double gb_delta(double error, double prev_error, double fabric_out_rate,
                const PiParams& params);

// Three-level quantization of delta: beta, 0 or beta / (beta - 1).
double quantize_delta(double delta, double delta_max, double delta_min,
                      double beta);

struct GbParams {
  double d_max = 0.17;
  double d_min = 0.02;
  double beta = 0.079707;
  std::size_t table_size = 64;

  void validate() const;
};

struct GbState {
  std::size_t level_index = 0;
};

// Two bits on the wire.
enum class FeedbackSignal : std::uint8_t { Hold = 0, Increase = 1, Decrease = 2 };

std::string_view to_string(FeedbackSignal signal);

FeedbackSignal gb_signal_from_congestion(double relative_congestion,
                                         const GbParams& params);

// P_k = 1 - (1 - beta)^k for k in [0, table_size).
std::vector<double> drop_level_table(double beta, std::size_t table_size);

// Saturating pointer move.
GbState apply_gb_signal(GbState state, FeedbackSignal signal,
                        std::size_t table_size);

// beta = 1 - sqrt((1 - d_max) / (1 - d_min)); the step size that makes the
// congestion right after an Increase at d_max equal the congestion right after
// a Decrease at d_min.
double derive_beta(double d_max, double d_min);

struct Thresholds {
  double d_max;
  double d_min;
  bool degenerate;  // d_min >= d_max after clamping
};

// d_max = 1 - 1/(alpha s) + delta_max/(alpha s K_I)
// d_min = 1 - 1/(alpha s) - delta_min/(alpha s K_I), clamped at 0.
Thresholds derive_thresholds(double alpha, double speedup, double gain_i,
                             double delta_max, double delta_min);

struct DeltaBounds {
  double delta_max;
  double delta_min;
};

// Inverse of derive_thresholds (no clamping).
DeltaBounds delta_bounds_from_thresholds(double alpha, double speedup,
                                         double gain_i, double d_max,
                                         double d_min);

// 1 - sqrt((1 - d_min)(1 - d_max)): the congestion the hysteresis returns to.
double d_mid(double d_min, double d_max);

}  // namespace foq

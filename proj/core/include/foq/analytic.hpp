#pragma once

// Closed-form analysis of the single-flow PI loop
//
//   r[n]   = lambda[n] - rho[n-1]                 (fabric output, unsaturated)
//   rho[n] = K e[n] + K_I sum_{m<=n} e[m],  e = r - r_opt
//
// driven by a step lambda[n] = lambda0. When lambda0 exceeds the fabric
// interface capacity sc, the fabric output stays at sc for an initial period
// of N0 intervals while the fabric queue drains; afterwards the response is a
// sum of two geometric modes converging to D = lambda0 - r_opt.
//
// step_response_recurrence() is the brute-force time-stepped oracle: it models
// the fabric queue explicitly and needs no stability assumption.

#include <cstddef>
#include <vector>

namespace foq {

struct StepScenario {
  double arrival_rate = 1.0;     // lambda0, bits/s
  double desired_rate = 0.5;     // r_opt, bits/s
  double fabric_capacity = 1.28; // sc, bits/s; +inf disables saturation
  double gain_p = 0.0;
  double gain_i = 0.5;
  double interval = 1.0;         // T, seconds

  void validate() const;
};

struct Poles {
  double z1;  // -(K+K_I-1)/2 + sqrt(...)/2
  double z2;  // -(K+K_I-1)/2 - sqrt(...)/2
};

// Roots of z^2 + (K + K_I - 1) z - K = 0. Throws for K < 0 (complex roots).
Poles poles(double gain_p, double gain_i);

// 0 < K_I < 2 (1 - K), strictly.
bool is_stable(double gain_p, double gain_i);

// Fabric queue (bits) at the end of interval n while saturated:
// q_n = T [(n+1)(lambda0 - sc) - n K (sc - r_opt) - n(n+1)/2 K_I (sc - r_opt)].
double saturated_queue(const StepScenario& scenario, long n);

struct InitialPeriod {
  std::size_t n0 = 0;     // smallest n with q_{n-1} <= 0; 0 when lambda0 <= sc
  double s_n0 = 0.0;      // K_I N0 (sc - r_opt)
  double max_queue = 0.0; // max q_n over [0, n0), bits
};

InitialPeriod initial_period(const StepScenario& scenario);

struct StepResponse {
  std::size_t n0 = 0;
  double s_n0 = 0.0;
  double pole1 = 0.0;
  double pole2 = 0.0;
  // rho[n] = D (1 - coeff1 z1^(n-N0) + coeff2 z2^(n-N0)) for n >= N0.
  // Fitted to the exact state at the end of the boundary interval N0-1; equal
  // to the textbook partial fractions when N0 = 0. Zero when D = 0.
  double coeff1 = 0.0;
  double coeff2 = 0.0;
  double rate_gap = 0.0;          // D = lambda0 - r_opt
  double boundary_drop = 0.0;     // rho[N0-1] (0 when N0 = 0)
  std::vector<double> drop_sequence;   // rho[n], bits/s
  std::vector<double> queue_sequence;  // q_n, bits (0 from N0 on)
};

// Requires 0 <= K < 1 and a stable gain pair; throws std::domain_error
// ("closed form diverges") otherwise.
StepResponse step_response_closed_form(const StepScenario& scenario,
                                       std::size_t horizon);

// `queue`, when given, receives q_n in bits.
std::vector<double> step_response_recurrence(const StepScenario& scenario,
                                             std::size_t horizon,
                                             std::vector<double>* queue = nullptr);

// Fabric output rate of one flow sharing a saturated fabric line:
// sc u / (u + v) when u + v > sc, else u.
double multiflow_initial_rate(double own_rate, double other_rate,
                              double fabric_capacity);

}  // namespace foq

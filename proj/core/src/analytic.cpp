#include "foq/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace foq {

void StepScenario::validate() const {
  if (!(arrival_rate > 0.0)) throw std::invalid_argument("arrival_rate must be > 0");
  if (!(desired_rate < fabric_capacity))
    throw std::invalid_argument("desired_rate must be below fabric_capacity");
  if (!(interval > 0.0)) throw std::invalid_argument("interval must be > 0");
}

Poles poles(double gain_p, double gain_i) {
  if (gain_p < 0.0) throw std::invalid_argument("gain_p must be >= 0");
  const double b = gain_p + gain_i - 1.0;
  const double root = std::sqrt(b * b + 4.0 * gain_p);
  return {(-b + root) / 2.0, (-b - root) / 2.0};
}

bool is_stable(double gain_p, double gain_i) {
  return gain_i > 0.0 && gain_i < 2.0 * (1.0 - gain_p);
}

double saturated_queue(const StepScenario& s, long n) {
  const double gap = s.fabric_capacity - s.desired_rate;
  const double nd = static_cast<double>(n);
  return s.interval * ((nd + 1.0) * (s.arrival_rate - s.fabric_capacity) -
                       nd * s.gain_p * gap -
                       nd * (nd + 1.0) / 2.0 * s.gain_i * gap);
}

InitialPeriod initial_period(const StepScenario& s) {
  InitialPeriod out;
  if (!(s.arrival_rate > s.fabric_capacity)) return out;
  if (!(s.gain_p + s.gain_i > 0.0))
    throw std::domain_error("saturation never ends with zero gains");

  // q_n is a concave quadratic with q_0 > 0, so a linear scan terminates.
  // A q that is zero up to the rounding of its terms counts as drained.
  const double gap = s.fabric_capacity - s.desired_rate;
  long n = 1;
  while (true) {
    const double m = static_cast<double>(n - 1);
    const double scale = s.interval * ((m + 1.0) * (s.arrival_rate - s.fabric_capacity) +
                                       m * s.gain_p * gap + m * (m + 1.0) / 2.0 * s.gain_i * gap);
    const double q = saturated_queue(s, n - 1);
    if (q <= 64.0 * std::numeric_limits<double>::epsilon() * scale) break;
    out.max_queue = std::max(out.max_queue, q);
    ++n;
  }
  out.n0 = static_cast<std::size_t>(n);
  out.s_n0 = s.gain_i * static_cast<double>(n) * (s.fabric_capacity - s.desired_rate);
  return out;
}

StepResponse step_response_closed_form(const StepScenario& s,
                                       std::size_t horizon) {
  s.validate();
  if (!(s.gain_p >= 0.0 && s.gain_p < 1.0) || !is_stable(s.gain_p, s.gain_i))
    throw std::domain_error("closed form diverges");

  const double k = s.gain_p;
  const double ki = s.gain_i;
  const double gap = s.fabric_capacity - s.desired_rate;
  const double d = s.arrival_rate - s.desired_rate;

  const InitialPeriod init = initial_period(s);
  const std::size_t n0 = init.n0;

  StepResponse out;
  out.n0 = n0;
  out.s_n0 = init.s_n0;
  out.rate_gap = d;
  const Poles z = poles(k, ki);
  out.pole1 = z.z1;
  out.pole2 = z.z2;

  // State entering the post-saturation regime: rho[N0-1] and the accumulator.
  double prev_drop = 0.0;
  double accumulator = 0.0;
  if (n0 > 0) {
    // Interval N0-1 drains what is left of the queue plus the admitted rate.
    const double ramp_before =
        (k + static_cast<double>(n0 - 1) * ki) * gap;  // rho[N0-2]
    const double residual = saturated_queue(s, static_cast<long>(n0) - 2);
    const double boundary_rate =
        residual / s.interval + s.arrival_rate - ramp_before;
    const double boundary_error = boundary_rate - s.desired_rate;
    accumulator = ki * (static_cast<double>(n0 - 1) * gap + boundary_error);
    prev_drop = k * boundary_error + accumulator;
  }
  out.boundary_drop = prev_drop;

  const double rho0 = (k + ki) * (d - prev_drop) + accumulator;
  const double rho1 = (1.0 - k - ki) * rho0 + k * prev_drop + ki * d;

  double amp1 = 0.0;
  double amp2 = 0.0;
  const bool repeated = std::abs(z.z1 - z.z2) < 1e-12;
  if (!repeated) {
    amp2 = (z.z1 * (rho0 - d) - (rho1 - d)) / (z.z1 - z.z2);
    amp1 = amp2 - (rho0 - d);
  }
  if (d != 0.0) {
    out.coeff1 = amp1 / d;
    out.coeff2 = amp2 / d;
  }

  out.drop_sequence.resize(horizon);
  out.queue_sequence.assign(horizon, 0.0);
  for (std::size_t n = 0; n < horizon; ++n) {
    if (n0 > 0 && n + 1 < n0) {
      out.drop_sequence[n] = (k + static_cast<double>(n + 1) * ki) * gap;
      out.queue_sequence[n] = saturated_queue(s, static_cast<long>(n));
      continue;
    }
    if (n0 > 0 && n + 1 == n0) {
      out.drop_sequence[n] = prev_drop;
      continue;
    }
    const auto m = static_cast<double>(n - n0);
    if (!repeated) {
      out.drop_sequence[n] =
          d - amp1 * std::pow(z.z1, m) + amp2 * std::pow(z.z2, m);
    } else if (z.z1 == 0.0) {
      // K = 0, K_I = 1: deadbeat, rho settles on D after one interval.
      out.drop_sequence[n] = (n == n0) ? rho0 : d;
    } else {
      // rho = D + (a + b m) z^m
      const double zr = z.z1;
      const double a = rho0 - d;
      const double b = (rho1 - d) / zr - a;
      out.drop_sequence[n] = d + (a + b * m) * std::pow(zr, m);
    }
  }
  return out;
}

std::vector<double> step_response_recurrence(const StepScenario& s,
                                             std::size_t horizon,
                                             std::vector<double>* queue_out) {
  std::vector<double> rho(horizon);
  if (queue_out) queue_out->assign(horizon, 0.0);
  double queue = 0.0;
  double prev = 0.0;
  double accumulator = 0.0;
  for (std::size_t n = 0; n < horizon; ++n) {
    const double admitted = s.arrival_rate - prev;
    const double available = queue / s.interval + admitted;
    double rate;
    if (available <= s.fabric_capacity) {
      rate = available;
      queue = 0.0;
    } else {
      rate = s.fabric_capacity;
      queue += (admitted - rate) * s.interval;
    }
    const double error = rate - s.desired_rate;
    accumulator += s.gain_i * error;
    rho[n] = s.gain_p * error + accumulator;
    prev = rho[n];
    if (queue_out) (*queue_out)[n] = queue;
  }
  return rho;
}

double multiflow_initial_rate(double own_rate, double other_rate,
                              double fabric_capacity) {
  const double total = own_rate + other_rate;
  if (!(total > 0.0)) throw std::invalid_argument("both rates are zero");
  if (total > fabric_capacity) return fabric_capacity * own_rate / total;
  return own_rate;
}

}  // namespace foq

#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "foq/control_law.hpp"

using namespace foq;

namespace {

PiParams gains(double k, double ki) {
  PiParams p;
  p.gain_p = k;
  p.gain_i = ki;
  return p;
}

}  // namespace

TEST(PiUpdate, FirstStepFromRest) {
  const PiOutput o = pi_update(PiState{}, 1.0, 0.5, gains(0.0, 0.5));
  EXPECT_DOUBLE_EQ(o.drop_rate, 0.25);
  EXPECT_DOUBLE_EQ(o.state.last_error, 0.5);
}

TEST(PiUpdate, ZeroErrorStaysZero) {
  PiState st;
  for (int n = 0; n < 50; ++n) {
    const PiOutput o = pi_update(st, 0.7, 0.7, gains(0.3, 0.4));
    EXPECT_EQ(o.drop_rate, 0.0);
    st = o.state;
  }
}

TEST(PiUpdate, LinearRampUnderSaturation) {
  const double sc = 1.28, r_opt = 1.0, k = 0.1, ki = 0.05;
  PiState st;
  for (int n = 0; n < 10; ++n) {
    const PiOutput o = pi_update(st, sc, r_opt, gains(k, ki));
    EXPECT_NEAR(o.drop_rate, k * (sc - r_opt) + (n + 1) * ki * (sc - r_opt), 1e-12) << n;
    st = o.state;
  }
}

TEST(PiUpdate, OutputClampedToArrivalEstimate) {
  PiState st;
  st.accumulator = 10.0;
  st.last_drop_prob = 0.5;
  const PiOutput o = pi_update(st, 1.0, 0.5, gains(0.0, 0.5));
  EXPECT_DOUBLE_EQ(o.drop_rate, 2.0);
  const PiOutput neg = pi_update(PiState{}, 0.0, 1.0, gains(0.0, 0.5));
  EXPECT_EQ(neg.drop_rate, 0.0);
}

TEST(PiUpdate, AccumulatorFrozenWhileSaturatedLow) {
  PiState st;
  for (int n = 0; n < 100; ++n) st = pi_update(st, 0.0, 1.0, gains(0.0, 0.5)).state;
  // Recovers on the first positive error instead of unwinding 100 steps.
  const PiOutput o = pi_update(st, 1.5, 1.0, gains(0.0, 0.5));
  EXPECT_GT(o.drop_rate, 0.0);
}

TEST(DropProbFromRate, Examples) {
  EXPECT_DOUBLE_EQ(drop_prob_from_rate(0.25, 1.0, 0.0), 0.25);
  EXPECT_DOUBLE_EQ(drop_prob_from_rate(0.2, 0.8, 0.5), 0.125);
  EXPECT_EQ(drop_prob_from_rate(0.0, 3.0, 0.0), 0.0);
  EXPECT_EQ(drop_prob_from_rate(0.3, 0.0, 0.4), 0.4);
  EXPECT_EQ(drop_prob_from_rate(5.0, 1.0, 0.0), 1.0);
}

TEST(GbDelta, Examples) {
  EXPECT_DOUBLE_EQ(gb_delta(0.1, 0.0, 1.0, gains(0.0, 0.5)), 0.05);
  EXPECT_EQ(gb_delta(0.0, 0.0, 1.0, gains(0.4, 0.3)), 0.0);
  EXPECT_DOUBLE_EQ(gb_delta(1.0, 1.0, 2.0, gains(0.5, 0.5)), 0.25);
  EXPECT_THROW(gb_delta(1.0, 0.0, 0.0, gains(0.0, 0.5)), std::domain_error);
}

TEST(QuantizeDelta, ThreeLevels) {
  EXPECT_DOUBLE_EQ(quantize_delta(0.3, 0.1, 0.1, 0.08), 0.08);
  EXPECT_EQ(quantize_delta(0.0, 0.1, 0.1, 0.08), 0.0);
  EXPECT_NEAR(quantize_delta(-0.3, 0.1, 0.1, 0.08), -0.0869565217, 1e-9);
}

TEST(GbSignal, Branches) {
  GbParams p;
  EXPECT_EQ(gb_signal_from_congestion(0.20, p), FeedbackSignal::Increase);
  EXPECT_EQ(gb_signal_from_congestion(0.01, p), FeedbackSignal::Decrease);
  EXPECT_EQ(gb_signal_from_congestion(0.10, p), FeedbackSignal::Hold);
  EXPECT_EQ(to_string(FeedbackSignal::Increase), "increase");
}

TEST(DropLevelTable, Examples) {
  const auto t = drop_level_table(0.0797, 64);
  ASSERT_EQ(t.size(), 64u);
  EXPECT_EQ(t[0], 0.0);
  EXPECT_NEAR(t[1], 0.0797, 1e-15);
  EXPECT_NEAR(t[2], 0.15305, 1e-5);
  EXPECT_THROW(drop_level_table(0.0, 4), std::invalid_argument);
  EXPECT_THROW(drop_level_table(0.5, 1), std::invalid_argument);
}

TEST(ApplyGbSignal, SaturatesAtBothEnds) {
  EXPECT_EQ(apply_gb_signal({0}, FeedbackSignal::Decrease, 10).level_index, 0u);
  EXPECT_EQ(apply_gb_signal({3}, FeedbackSignal::Increase, 10).level_index, 4u);
  EXPECT_EQ(apply_gb_signal({9}, FeedbackSignal::Increase, 10).level_index, 9u);
  EXPECT_EQ(apply_gb_signal({5}, FeedbackSignal::Hold, 10).level_index, 5u);
}

TEST(DeriveBeta, ExampleAndErrors) {
  const double beta = derive_beta(0.17, 0.02);
  EXPECT_NEAR(beta, 0.079707, 1e-6);
  EXPECT_NEAR(1.0 - (1.0 - 0.17) / (1.0 - beta), d_mid(0.02, 0.17), 1e-12);
  try {
    derive_beta(0.1, 0.1);
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_STREQ(e.what(), "degenerate hysteresis band");
  }
}

TEST(DeriveThresholds, Examples) {
  const Thresholds flat = derive_thresholds(1.0, 1.28, 1.0, 0.0, 0.0);
  EXPECT_NEAR(flat.d_max, 0.21875, 1e-12);
  EXPECT_NEAR(flat.d_min, 0.21875, 1e-12);
  EXPECT_TRUE(flat.degenerate);

  const Thresholds band = derive_thresholds(1.0, 1.28, 1.0, 0.064, 0.256);
  EXPECT_NEAR(band.d_max, 0.26875, 1e-12);
  EXPECT_NEAR(band.d_min, 0.01875, 1e-12);
  EXPECT_FALSE(band.degenerate);

  const Thresholds clamped = derive_thresholds(1.0, 1.28, 1.0, 0.064, 0.328);
  EXPECT_EQ(clamped.d_min, 0.0);

  try {
    derive_thresholds(0.5, 1.5, 1.0, 0.1, 0.1);
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_STREQ(e.what(), "no congestion headroom");
  }
}

TEST(DeriveThresholds, InverseRoundTrip) {
  const DeltaBounds d = delta_bounds_from_thresholds(0.95, 1.28, 0.5, 0.17, 0.02);
  const Thresholds t = derive_thresholds(0.95, 1.28, 0.5, d.delta_max, d.delta_min);
  EXPECT_NEAR(t.d_max, 0.17, 1e-12);
  EXPECT_NEAR(t.d_min, 0.02, 1e-12);
}

TEST(DMid, Examples) {
  EXPECT_NEAR(d_mid(0.02, 0.17), 0.0981, 1e-4);
  EXPECT_NEAR(d_mid(0.0, 0.3), 1.0 - std::sqrt(0.7), 1e-15);
  EXPECT_THROW(d_mid(0.0, 0.0), std::invalid_argument);
}

TEST(Params, Validation) {
  PiParams p;
  EXPECT_NO_THROW(p.validate());
  p.speedup = 1.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  GbParams g;
  EXPECT_NO_THROW(g.validate());
  g.table_size = 1;
  EXPECT_THROW(g.validate(), std::invalid_argument);
}

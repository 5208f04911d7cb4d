#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "shotfusion/sync.hpp"

using namespace shotfusion;

namespace {

// 100 Hz likelihood-like stream: small positive noise plus a narrow peak at
// each event time (ms, on the stream's own clock).
SampleSeries peaked(double seconds, const std::vector<double>& events, std::mt19937_64& rng,
                    double start = 0.0) {
  std::uniform_real_distribution<double> noise(0.0, 0.05), amp(1.0, 3.0);
  const auto n = static_cast<std::size_t>(seconds * 100.0);
  std::vector<double> v(n);
  for (auto& x : v) x = noise(rng);
  for (double t : events) {
    const double a = amp(rng);
    for (std::size_t i = 0; i < n; ++i) {
      const double dt = start + 10.0 * static_cast<double>(i) - t;
      if (std::abs(dt) < 60.0) v[i] += a * std::exp(-dt * dt / 400.0);
    }
  }
  return SampleSeries(100.0, start, std::move(v));
}

std::vector<double> event_times(double from_ms, double to_ms, std::size_t count, std::mt19937_64& rng) {
  std::vector<double> t;
  std::uniform_int_distribution<int> u(static_cast<int>(from_ms / 10), static_cast<int>(to_ms / 10));
  while (t.size() < count) {
    const double c = 10.0 * u(rng);
    bool ok = true;
    for (double x : t) ok = ok && std::abs(x - c) >= 700.0;
    if (ok) t.push_back(c);
  }
  std::sort(t.begin(), t.end());
  return t;
}

std::vector<double> shifted(std::vector<double> t, double by) {
  for (auto& x : t) x += by;
  return t;
}

QuantizerModel peak_quantizer() {
  return fit_quantizer({1.0, 1.5, 2.0, 2.5, 3.0, 1.2, 2.7}, {1.0, 1.5, 2.0, 2.5, 3.0, 1.1, 2.9});
}

}  // namespace

TEST(Percentile, LinearInterpolation) {
  EXPECT_DOUBLE_EQ(percentile({3.0, 1.0, 2.0}, 0.5), 2.0);
  EXPECT_DOUBLE_EQ(percentile({0.0, 10.0}, 0.25), 2.5);
  EXPECT_DOUBLE_EQ(percentile({7.0}, 0.8), 7.0);
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> p(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto v = oracle::random_vector(rng, 1 + static_cast<std::size_t>(trial));
    const double q = p(rng);
    EXPECT_NEAR(percentile(v, q), oracle::percentile(v, q), 1e-12);
  }
}

TEST(FitQuantizer, Examples) {
  std::vector<double> hundred;
  for (int i = 1; i <= 100; ++i) hundred.push_back(i);
  const auto q = fit_quantizer(hundred, {0, 1, 2, 3, 4});
  const Boundaries want_a{20.8, 40.6, 60.4, 80.2}, want_i{0.8, 1.6, 2.4, 3.2};
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_NEAR(q.apf_boundaries[k], want_a[k], 1e-12);
    EXPECT_NEAR(q.ipf_boundaries[k], want_i[k], 1e-12);
    EXPECT_NEAR(q.apf_boundaries[k], oracle::percentile(hundred, 0.2 * static_cast<double>(k + 1)), 1e-12);
  }
}

TEST(FitQuantizer, Errors) {
  try {
    fit_quantizer({1, 2, 3, 4}, {1, 2, 3, 4, 5});
    FAIL();
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "insufficient calibration data");
  }
  try {
    fit_quantizer({1, 2, 3, 4, 5}, std::vector<double>(9, 2.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "degenerate distribution");
  }
}

TEST(Quantize, BoundarySemantics) {
  const Boundaries b{1.0, 2.0, 3.0, 4.0};
  EXPECT_EQ(quantize_level(0.5, b), 0);
  EXPECT_EQ(quantize_level(1.0, b), 0);
  EXPECT_EQ(quantize_level(2.0, b), 1);
  EXPECT_EQ(quantize_level(2.5, b), 2);
  EXPECT_EQ(quantize_level(4.0, b), 3);
  EXPECT_EQ(quantize_level(9.0, b), 4);
  EXPECT_EQ(quantize_level(-INFINITY, b), 0);
  EXPECT_EQ(quantize_level(INFINITY, b), 4);
  const auto q = quantize(SampleSeries(100.0, 30.0, {0.0, 2.0, 5.0}), b);
  EXPECT_EQ(q.values, (std::vector<double>{0, 1, 4}));
  EXPECT_DOUBLE_EQ(q.start_time, 30.0);
}

TEST(Quantize, MatchesScanOracleProperty) {
  std::mt19937_64 rng(62);
  for (int trial = 0; trial < 100; ++trial) {
    auto bv = oracle::random_vector(rng, 4, -2.0, 2.0);
    std::sort(bv.begin(), bv.end());
    const Boundaries b{bv[0], bv[1], bv[2], bv[3]};
    auto values = oracle::random_vector(rng, 50, -3.0, 3.0);
    values.insert(values.end(), bv.begin(), bv.end());
    for (double v : values) EXPECT_EQ(quantize_level(v, b), oracle::level(v, bv));
  }
}

TEST(Quantize, MonotoneProperty) {
  std::mt19937_64 rng(63);
  for (int trial = 0; trial < 100; ++trial) {
    auto bv = oracle::random_vector(rng, 4);
    std::sort(bv.begin(), bv.end());
    const Boundaries b{bv[0], bv[1], bv[2], bv[3]};
    auto v = oracle::random_vector(rng, 40, -1.5, 1.5);
    std::sort(v.begin(), v.end());
    for (std::size_t i = 1; i < v.size(); ++i) EXPECT_LE(quantize_level(v[i - 1], b), quantize_level(v[i], b));
  }
}

TEST(EstimateOffset, IdenticalSeries) {
  std::mt19937_64 rng(64);
  const auto s = peaked(20.0, event_times(500, 19500, 15, rng), rng);
  const auto q = peak_quantizer();
  const QuantizerModel same{q.apf_boundaries, q.apf_boundaries};
  const auto e = estimate_offset(s, s, same);
  EXPECT_EQ(e.offset_ms, 0.0);
  EXPECT_NEAR(e.peak_correlation, 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(e.window_seconds, 20.0);
}

TEST(EstimateOffset, RecoversInjectedOffset) {
  std::mt19937_64 rng(65);
  for (double injected : {-270.0, 0.0, 130.0, -500.0, 480.0}) {
    const auto shots = event_times(600, 19400, 15, rng);
    const auto a = peaked(20.0, shots, rng);
    const auto i = peaked(20.0, shifted(shots, injected), rng, injected);
    const auto e = estimate_offset(a, i, peak_quantizer());
    EXPECT_NEAR(e.offset_ms, injected, 40.0);
    EXPECT_TRUE(e.reliable());
    EXPECT_LE(std::abs(e.offset_ms), kDefaultMaxLagMs);
  }
}

TEST(EstimateOffset, NoiseIsUnreliable) {
  std::mt19937_64 rng(66);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = peaked(20.0, {}, rng), i = peaked(20.0, {}, rng);
    const auto e = estimate_offset(a, i, self_calibrate_quantizer(a, i));
    EXPECT_LT(e.peak_correlation, 0.3);
    EXPECT_FALSE(e.reliable());
  }
}

TEST(EstimateOffset, Errors) {
  std::mt19937_64 rng(67);
  const auto a = peaked(4.0, {}, rng), b = peaked(20.0, {}, rng);
  EXPECT_THROW(estimate_offset(a, b, peak_quantizer()), Error);
  const SampleSeries c(50.0, 0.0, std::vector<double>(1000, 0.0));
  EXPECT_THROW(estimate_offset(b, c, peak_quantizer()), Error);
}

TEST(EstimateOffset, ShiftEquivarianceProperty) {
  std::mt19937_64 rng(68);
  std::uniform_int_distribution<int> k(-60, 60);
  const auto shots = event_times(600, 19400, 15, rng);
  const auto a = peaked(20.0, shots, rng);
  const auto i = peaked(20.0, shifted(shots, -270.0), rng);
  const auto q = peak_quantizer();
  const auto base = estimate_offset(a, i, q);
  for (int trial = 0; trial < 100; ++trial) {
    const int s = k(rng);
    const auto moved = estimate_offset(a, i.shifted(10.0 * s), q);
    EXPECT_DOUBLE_EQ(moved.offset_ms, base.offset_ms + 10.0 * s);
    EXPECT_DOUBLE_EQ(moved.peak_correlation, base.peak_correlation);
  }
}

TEST(EstimateOffset, SampleShiftEquivariance) {
  // Moving the IPF content itself by k samples, clock unchanged.
  std::mt19937_64 rng(69);
  const auto shots = event_times(1000, 19000, 15, rng);
  const auto a = peaked(20.0, shots, rng);
  const auto q = peak_quantizer();
  for (int s : {-30, -7, 0, 4, 25}) {
    std::mt19937_64 same(70);
    const auto i = peaked(20.0, shifted(shots, -270.0 + 10.0 * s), same);
    EXPECT_DOUBLE_EQ(estimate_offset(a, i, q).offset_ms, -270.0 + 10.0 * s);
  }
}

TEST(EstimateOffset, CubeTransformInvarianceProperty) {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 100; ++trial) {
    const auto shots = event_times(600, 9400, 8, rng);
    const auto a = peaked(10.0, shots, rng);
    const auto i = peaked(10.0, shifted(shots, 90.0), rng);
    const auto q = self_calibrate_quantizer(a, i);
    SampleSeries cubed = a;
    for (auto& v : cubed.values) v = v * v * v;
    QuantizerModel qc = q;
    for (auto& b : qc.apf_boundaries) b = b * b * b;
    const auto e1 = estimate_offset(a, i, q), e2 = estimate_offset(cubed, i, qc);
    EXPECT_EQ(e1.offset_ms, e2.offset_ms);
    EXPECT_EQ(e1.peak_correlation, e2.peak_correlation);
  }
}

TEST(EstimateOffset, Deterministic) {
  std::mt19937_64 rng(72);
  const auto shots = event_times(600, 19400, 15, rng);
  const auto a = peaked(20.0, shots, rng), i = peaked(20.0, shifted(shots, 40.0), rng);
  const auto e1 = estimate_offset(a, i, peak_quantizer()), e2 = estimate_offset(a, i, peak_quantizer());
  EXPECT_EQ(e1.offset_ms, e2.offset_ms);
  EXPECT_EQ(e1.peak_correlation, e2.peak_correlation);
}

TEST(ValidateOffset, StationaryDriftAndSilence) {
  std::mt19937_64 rng(73);
  const auto q = peak_quantizer();
  const auto first = event_times(600, 19400, 15, rng);
  const auto second = shifted(event_times(600, 19400, 15, rng), 20000.0);
  auto all = first;
  all.insert(all.end(), second.begin(), second.end());
  const auto a = peaked(40.0, all, rng);

  const auto steady = peaked(40.0, shifted(all, -270.0), rng);
  const auto e = estimate_offset(a.slice(0, 20000), steady.slice(0, 20000), q);
  EXPECT_TRUE(validate_offset(a, steady, q, e, 20.0));

  auto drifting_events = shifted(first, -270.0);
  for (double t : shifted(second, -70.0)) drifting_events.push_back(t);
  const auto drifting = peaked(40.0, drifting_events, rng);
  const auto ed = estimate_offset(a.slice(0, 20000), drifting.slice(0, 20000), q);
  EXPECT_NEAR(ed.offset_ms, -270.0, 40.0);
  EXPECT_FALSE(validate_offset(a, drifting, q, ed, 20.0));

  std::mt19937_64 rng2(74);
  const auto quiet_a = peaked(40.0, first, rng2);
  const auto quiet_i = peaked(40.0, shifted(first, -270.0), rng2);
  const auto eq = estimate_offset(quiet_a.slice(0, 20000), quiet_i.slice(0, 20000), q);
  EXPECT_FALSE(validate_offset(quiet_a, quiet_i, q, eq, 20.0));

  EXPECT_THROW(validate_offset(a, steady, q, e, 25.0), Error);
}

TEST(SelfCalibration, RefinementNeedsPseudoShots) {
  std::mt19937_64 rng(75);
  const auto a = peaked(20.0, {}, rng), i = peaked(20.0, {}, rng);
  EXPECT_FALSE(refine_quantizer(a, i, 0.0).has_value());
  const auto shots = event_times(600, 19400, 15, rng);
  const auto pa = peaked(20.0, shots, rng), pi = peaked(20.0, shifted(shots, -270.0), rng);
  const auto refined = refine_quantizer(pa, pi, -270.0);
  ASSERT_TRUE(refined.has_value());
  EXPECT_GT(refined->apf_boundaries[0], 0.5);
  const auto r = self_calibrated_estimate(pa, pi);
  EXPECT_NEAR(r.estimate.offset_ms, -270.0, 20.0);
}

TEST(SelfCalibration, StaysNearCoarseEstimateProperty) {
  std::mt19937_64 rng(76);
  std::uniform_real_distribution<double> offset(-500.0, 500.0);
  std::uniform_int_distribution<std::size_t> count(0, 18);
  for (int trial = 0; trial < 100; ++trial) {
    const double injected = 10.0 * std::round(offset(rng) / 10.0);
    const auto shots = event_times(1000, 19000, count(rng), rng);
    const auto a = peaked(20.0, shots, rng), i = peaked(20.0, shifted(shots, injected), rng);
    const auto coarse = estimate_offset(a, i, self_calibrate_quantizer(a, i));
    EXPECT_LE(std::abs(self_calibrated_estimate(a, i).estimate.offset_ms - coarse.offset_ms), 50.0);
  }
}

TEST(Synchronize, ValidatesOnPeakedStreams) {
  std::mt19937_64 rng(76);
  const auto shots = event_times(600, 59400, 45, rng);
  const auto a = peaked(60.0, shots, rng), i = peaked(60.0, shifted(shots, -270.0), rng);
  const auto r = synchronize(a, i);
  EXPECT_TRUE(r.validated);
  EXPECT_NEAR(r.estimate.offset_ms, -270.0, 20.0);
  EXPECT_DOUBLE_EQ(r.estimate.window_seconds, 20.0);

  SyncOptions fixed;
  fixed.quantizer = peak_quantizer();
  const auto rf = synchronize(a, i, fixed);
  EXPECT_TRUE(rf.validated);
  EXPECT_NEAR(rf.estimate.offset_ms, -270.0, 20.0);
}

TEST(Synchronize, FallsBackWithoutValidation) {
  std::mt19937_64 rng(77);
  const auto a = peaked(30.0, {}, rng), i = peaked(30.0, {}, rng);
  const auto r = synchronize(a, i);
  EXPECT_FALSE(r.validated);
  EXPECT_DOUBLE_EQ(r.estimate.window_seconds, 30.0);
}

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "shotfusion/fusion.hpp"

using namespace shotfusion;

namespace {

SampleSeries imu_series(std::vector<double> v, double start = 0.0) {
  return SampleSeries(100.0, start, std::move(v));
}

FusionStreams constant_streams(double c, std::size_t n = 200) {
  const auto s = imu_series(std::vector<double>(n, c));
  return {s, s, s, s, s};
}

// Brute force: strictly greater than every other sample within the window.
std::vector<std::size_t> local_maxima(const std::vector<double>& v, long half) {
  std::vector<std::size_t> out;
  const long n = static_cast<long>(v.size());
  for (long i = 0; i < n; ++i) {
    bool peak = n > 1;
    for (long j = 0; j < n; ++j) {
      if (j != i && std::abs(j - i) <= half && v[static_cast<std::size_t>(j)] >= v[static_cast<std::size_t>(i)]) peak = false;
    }
    if (peak) out.push_back(static_cast<std::size_t>(i));
  }
  return out;
}

std::vector<ShotEvent> events_at(std::initializer_list<double> t) {
  std::vector<ShotEvent> e;
  for (double x : t) e.push_back({x, 1.0});
  return e;
}

}  // namespace

TEST(SelectCandidates, Examples) {
  std::vector<double> v(200, 0.0);
  v[70] = 3.0;
  auto c = select_candidates(imu_series(v, 1000.0));
  ASSERT_EQ(c.size(), 1U);
  EXPECT_DOUBLE_EQ(c[0], 1700.0);

  EXPECT_TRUE(select_candidates(imu_series(std::vector<double>(200, 4.0))).empty());

  std::vector<double> two(150, 0.0);
  for (std::size_t i = 0; i < two.size(); ++i) {
    const double d = static_cast<double>(i) - 50.0;
    two[i] = 2.0 * std::exp(-d * d / 200.0);
  }
  two[80] += 1.0;
  c = select_candidates(imu_series(two));
  ASSERT_EQ(c.size(), 1U);
  EXPECT_DOUBLE_EQ(c[0], 500.0);
}

TEST(SelectCandidates, TruncatedWindowAtEdges) {
  std::vector<double> v(100, 0.0);
  v[0] = 1.0;
  v[99] = 2.0;
  const auto c = select_candidates(imu_series(v));
  ASSERT_EQ(c.size(), 2U);
  EXPECT_DOUBLE_EQ(c[0], 0.0);
  EXPECT_DOUBLE_EQ(c[1], 990.0);
}

TEST(SelectCandidates, MatchesScanOracleProperty) {
  std::mt19937_64 rng(91);
  for (int trial = 0; trial < 100; ++trial) {
    const auto v = oracle::random_vector(rng, 50 + static_cast<std::size_t>(trial) * 3);
    const auto got = select_candidates(imu_series(v, 20.0));
    const auto want = local_maxima(v, 25);
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t k = 0; k < got.size(); ++k) EXPECT_DOUBLE_EQ(got[k], 20.0 + 10.0 * static_cast<double>(want[k]));
  }
}

TEST(SelectCandidates, ScalingInvarianceProperty) {
  std::mt19937_64 rng(92);
  std::uniform_real_distribution<double> alpha(0.01, 100.0);
  for (int trial = 0; trial < 100; ++trial) {
    auto v = oracle::random_vector(rng, 300);
    const auto base = select_candidates(imu_series(v));
    const double a = alpha(rng);
    for (auto& x : v) x *= a;
    EXPECT_EQ(select_candidates(imu_series(v)), base);
  }
}

TEST(ExtractFeatures, Examples) {
  const auto c = extract_features(1000.0, constant_streams(2.5));
  for (double f : c.features) EXPECT_EQ(f, 2.5);
  EXPECT_DOUBLE_EQ(c.time_ms, 1000.0);

  auto s = constant_streams(0.0);
  std::vector<double> apf(200, 0.0);
  apf[110] = 7.0;
  s.apf = imu_series(apf);
  EXPECT_EQ(extract_features(1000.0, s).features[0], 7.0);
  EXPECT_EQ(extract_features(1000.0, s).features[1], 0.0);
  apf[110] = 0.0;
  apf[126] = 7.0;
  s.apf = imu_series(apf);
  EXPECT_EQ(extract_features(1000.0, s).features[0], 0.0);

  EXPECT_THROW(extract_features(5000.0, constant_streams(1.0)), Error);
}

TEST(ExtractFeatures, MissingSeriesContributesZero) {
  auto s = constant_streams(3.0);
  s.apf = s.apf.shifted(10000.0);
  const auto c = extract_features(500.0, s);
  EXPECT_EQ(c.features[0], 0.0);
  EXPECT_EQ(c.features[4], 3.0);
}

TEST(ExtractFeatures, MatchesScanOracleProperty) {
  std::mt19937_64 rng(93);
  std::uniform_real_distribution<double> when(-100.0, 2100.0), shift(-60.0, 60.0);
  for (int trial = 0; trial < 100; ++trial) {
    FusionStreams s;
    SampleSeries* all[] = {&s.apf, &s.ipf, &s.a_rad, &s.a_tan, &s.w_rad};
    for (auto* p : all) *p = imu_series(oracle::random_vector(rng, 200), shift(rng));
    const double t = when(rng);
    const auto c = extract_features(t, s);
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      double best = -INFINITY;
      for (std::size_t i = 0; i < all[f]->size(); ++i) {
        const double ti = all[f]->time_at(i);
        if (ti >= t - 250.0 - 1e-9 && ti <= t + 250.0 + 1e-9) best = std::max(best, all[f]->values[i]);
      }
      EXPECT_EQ(c.features[f], std::isinf(best) ? 0.0 : best);
    }
  }
}

TEST(Dedup, Examples) {
  auto kept = dedup(events_at({0, 300, 900}));
  ASSERT_EQ(kept.size(), 2U);
  EXPECT_EQ(kept[0].time_ms, 0.0);
  EXPECT_EQ(kept[1].time_ms, 900.0);
  EXPECT_EQ(dedup(events_at({42})).size(), 1U);
  EXPECT_EQ(dedup(events_at({0, 600, 1200})).size(), 3U);
  EXPECT_EQ(dedup(events_at({0, 500})).size(), 2U);
  EXPECT_EQ(dedup(events_at({0, 400, 800})).size(), 2U);
  EXPECT_TRUE(dedup({}).empty());
  EXPECT_THROW(dedup(events_at({10, 5})), Error);
}

TEST(Dedup, IdempotenceProperty) {
  std::mt19937_64 rng(94);
  std::uniform_real_distribution<double> gap(0.0, 900.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<ShotEvent> e;
    double t = 0.0;
    for (int i = 0; i < 40; ++i) e.push_back({t += gap(rng), gap(rng)});
    const auto once = dedup(e);
    EXPECT_EQ(dedup(once), once);
    for (std::size_t i = 1; i < once.size(); ++i) EXPECT_GE(once[i].time_ms - once[i - 1].time_ms, 500.0);
    EXPECT_EQ(once.front(), e.front());
  }
}

TEST(AlignStreams, MovesImuOntoAudioClock) {
  ImuAnalysis a;
  a.ipf = imu_series({1, 2, 3}, 40.0);
  a.a_rad_lowpass = a.raw.a_tan = a.raw.w_rad = imu_series({1, 2, 3, 4}, 0.0);
  const auto s = align_streams(imu_series({0}, 55.0), a, -270.0);
  EXPECT_DOUBLE_EQ(s.ipf.start_time, 310.0);
  EXPECT_DOUBLE_EQ(s.a_tan.start_time, 270.0);
  EXPECT_DOUBLE_EQ(s.apf.start_time, 55.0);
}

TEST(DetectFromStreams, EventsAreCandidatesProperty) {
  std::mt19937_64 rng(95);
  std::vector<LabeledCandidate> train;
  for (int i = 0; i < 100; ++i) {
    LabeledCandidate s;
    for (auto& f : s.candidate.features) f = oracle::random_vector(rng, 1)[0];
    s.shot = s.candidate.features[0] + s.candidate.features[1] > 0.0;
    train.push_back(s);
  }
  const auto forest = train_forest(train, 15, 2);
  for (int trial = 0; trial < 100; ++trial) {
    FusionStreams s;
    SampleSeries* all[] = {&s.apf, &s.ipf, &s.a_rad, &s.a_tan, &s.w_rad};
    for (auto* p : all) *p = imu_series(oracle::random_vector(rng, 300));
    const auto candidates = select_candidates(s.ipf);
    const auto events = detect_from_streams(s, forest);
    for (const auto& e : events) {
      EXPECT_NE(std::find(candidates.begin(), candidates.end(), e.time_ms), candidates.end());
      EXPECT_GT(e.score, 0.5);
    }
    EXPECT_EQ(dedup(events), events);
  }
}

TEST(DetectShots, SilenceAndStillnessIsEmpty) {
  std::vector<ImuRecord> imu(1000);
  for (std::size_t i = 0; i < imu.size(); ++i) imu[i].t = 10.0 * static_cast<double>(i);
  const SampleSeries audio(8000.0, 0.0, std::vector<double>(80000, 0.0));
  ForestModel always;
  DecisionTree t;
  t.nodes.push_back({-1, 0.0, -1, -1, 1});
  always.trees = {t};
  const OffsetEstimate offset;
  EXPECT_TRUE(detect_shots(audio, imu, FilterModel::identity(), always, offset).empty());
}

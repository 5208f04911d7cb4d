#include "shotfusion/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <future>

namespace shotfusion {

namespace {

constexpr double kTimeEps = 1e-6;

// Index range of samples with timestamps in [from, to].
std::pair<std::size_t, std::size_t> index_range(const SampleSeries& s, double from, double to) {
  if (s.empty()) return {0, 0};
  const double p = s.period_ms();
  const double lo = std::ceil((from - s.start_time) / p - kTimeEps);
  const double hi = std::floor((to - s.start_time) / p + kTimeEps);
  const double n = static_cast<double>(s.size());
  const double first = std::clamp(lo, 0.0, n);
  const double last = std::clamp(hi + 1.0, 0.0, n);
  if (last <= first) return {0, 0};
  return {static_cast<std::size_t>(first), static_cast<std::size_t>(last)};
}

}  // namespace

FusionStreams align_streams(const SampleSeries& apf, const ImuAnalysis& imu, double offset_ms) {
  return {apf, imu.ipf.shifted(-offset_ms), imu.a_rad_lowpass.shifted(-offset_ms),
          imu.raw.a_tan.shifted(-offset_ms), imu.raw.w_rad.shifted(-offset_ms)};
}

std::vector<double> select_candidates(const SampleSeries& ipf, double window_ms) {
  const auto half = static_cast<long>(std::llround(window_ms / 2.0 / ipf.period_ms()));
  const long n = static_cast<long>(ipf.size());
  std::vector<double> out;
  for (long i = 0; i < n; ++i) {
    const double v = ipf.values[static_cast<std::size_t>(i)];
    bool peak = true;
    for (long j = std::max(0L, i - half); j <= std::min(n - 1, i + half) && peak; ++j) {
      if (j != i && !(v > ipf.values[static_cast<std::size_t>(j)])) peak = false;
    }
    if (peak && n > 1) out.push_back(ipf.time_at(static_cast<std::size_t>(i)));
  }
  return out;
}

Candidate extract_features(double t, const FusionStreams& streams, double neighbourhood_ms) {
  const SampleSeries* sources[kFeatureCount] = {&streams.apf, &streams.ipf, &streams.a_rad,
                                                &streams.a_tan, &streams.w_rad};
  Candidate c;
  c.time_ms = t;
  bool any = false;
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    const auto [first, last] =
        index_range(*sources[f], t - neighbourhood_ms / 2.0, t + neighbourhood_ms / 2.0);
    if (first == last) {
      c.features[f] = 0.0;
      continue;
    }
    any = true;
    c.features[f] = *std::max_element(sources[f]->values.begin() + static_cast<long>(first),
                                      sources[f]->values.begin() + static_cast<long>(last));
  }
  if (!any) throw Error("candidate out of range");
  return c;
}

std::vector<ShotEvent> dedup(const std::vector<ShotEvent>& events, double window_ms) {
  std::vector<ShotEvent> kept;
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (i > 0 && events[i].time_ms < events[i - 1].time_ms) throw Error("unordered events");
    if (!kept.empty() && events[i].time_ms - kept.back().time_ms < window_ms) continue;
    kept.push_back(events[i]);
  }
  return kept;
}

std::vector<Candidate> candidates_for(const FusionStreams& streams) {
  std::vector<Candidate> out;
  for (double t : select_candidates(streams.ipf)) out.push_back(extract_features(t, streams));
  return out;
}

std::vector<ShotEvent> detect_from_streams(const FusionStreams& streams, const ForestModel& forest) {
  std::vector<ShotEvent> shots;
  for (const auto& c : candidates_for(streams)) {
    const auto verdict = classify(forest, c);
    if (verdict.shot) shots.push_back({c.time_ms, verdict.score});
  }
  return dedup(shots);
}

std::vector<ShotEvent> detect_shots(const SampleSeries& audio, const std::vector<ImuRecord>& imu,
                                    const FilterModel& filter, const ForestModel& forest,
                                    const OffsetEstimate& offset, const AudioConfig& cfg) {
  auto audio_task = std::async(std::launch::async,
                               [&] { return audio_likelihood(audio, filter, cfg); });
  const ImuAnalysis motion = analyze_imu(imu);
  const SampleSeries likelihood = audio_task.get();
  return detect_from_streams(align_streams(likelihood, motion, offset.offset_ms), forest);
}

}  // namespace shotfusion

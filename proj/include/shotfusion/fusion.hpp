#pragma once

#include <vector>

#include "shotfusion/audio.hpp"
#include "shotfusion/events.hpp"
#include "shotfusion/forest.hpp"
#include "shotfusion/imu.hpp"
#include "shotfusion/signal.hpp"
#include "shotfusion/sync.hpp"

namespace shotfusion {

inline constexpr double kNeighbourhoodMs = 500.0;

/// The five feature sources, all on the audio clock.
struct FusionStreams {
  SampleSeries apf, ipf, a_rad, a_tan, w_rad;
};

/// Moves the IMU-derived series onto the audio clock. a_rad is the
/// low-passed signal; a_tan and w_rad are unfiltered.
FusionStreams align_streams(const SampleSeries& apf, const ImuAnalysis& imu, double offset_ms);

/// Times of samples that strictly exceed every other sample within
/// +-window_ms/2; windows are truncated at the series ends.
std::vector<double> select_candidates(const SampleSeries& ipf, double window_ms = kNeighbourhoodMs);

/// Maximum of each series over [t - n/2, t + n/2]. A series with no samples
/// in range contributes 0; throws if none of them has any.
Candidate extract_features(double t, const FusionStreams& streams,
                           double neighbourhood_ms = kNeighbourhoodMs);

/// Drops every event closer than window_ms to the previously kept one.
std::vector<ShotEvent> dedup(const std::vector<ShotEvent>& events,
                             double window_ms = kNeighbourhoodMs);

std::vector<Candidate> candidates_for(const FusionStreams& streams);

/// Classify every candidate, keep the shots and dedup them.
std::vector<ShotEvent> detect_from_streams(const FusionStreams& streams, const ForestModel& forest);

std::vector<ShotEvent> detect_shots(const SampleSeries& audio, const std::vector<ImuRecord>& imu,
                                    const FilterModel& filter, const ForestModel& forest,
                                    const OffsetEstimate& offset, const AudioConfig& cfg = {});

}  // namespace shotfusion

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "shotfusion/eval.hpp"
#include "shotfusion/imu.hpp"
#include "shotfusion/signal.hpp"

namespace shotfusion {

inline constexpr double kSynthAudioRate = 8000.0;
inline constexpr double kSynthNoiseRms = 0.01;
inline constexpr double kBurstMs = 10.0;
inline constexpr double kSwingMs = 150.0;
inline constexpr double kMinShotGapMs = 1000.0;
inline constexpr double kMinDistractorGapMs = 700.0;

struct SynthConfig {
  double duration_s = 60.0;
  std::size_t shot_count = 20;
  double audio_snr_db = 20.0;
  double imu_noise_g = 0.05;
  double injected_offset_ms = -270.0;
  double distractor_rate_per_min = 0.0;  // per kind: audio-only and IMU-only
  std::uint64_t seed = 1;
};

struct SynthData {
  SampleSeries audio;             // audio clock, starts at 0
  std::vector<ImuRecord> imu;     // IMU clock = audio clock + injected offset
  LabelSet labels;                // audio clock
  std::vector<double> audio_distractors;  // audio clock
  std::vector<double> imu_distractors;    // audio clock
};

/// Pink-noise audio with 10 ms chirp bursts, IMU with gravity, sway, noise
/// and 150 ms half-sine swings on a_x and the tangential gyro axis.
SynthData synthesize(const SynthConfig& cfg);

}  // namespace shotfusion

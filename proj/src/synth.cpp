#include "shotfusion/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace shotfusion {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kSnrJitterDb = 2.0;

// Paul Kellet's refined pink-noise filter over unit white noise.
std::vector<double> pink_noise(std::size_t n, double rms, std::mt19937_64& rng) {
  std::normal_distribution<double> white(0.0, 1.0);
  std::vector<double> out(n);
  double b0 = 0, b1 = 0, b2 = 0, b3 = 0, b4 = 0, b5 = 0, b6 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = white(rng);
    b0 = 0.99886 * b0 + w * 0.0555179;
    b1 = 0.99332 * b1 + w * 0.0750759;
    b2 = 0.96900 * b2 + w * 0.1538520;
    b3 = 0.86650 * b3 + w * 0.3104856;
    b4 = 0.55000 * b4 + w * 0.5329522;
    b5 = -0.7616 * b5 - w * 0.0168980;
    out[i] = b0 + b1 + b2 + b3 + b4 + b5 + b6 + w * 0.5362;
    b6 = w * 0.115926;
  }
  double ss = 0.0;
  for (double v : out) ss += v * v;
  const double scale = n > 0 && ss > 0.0 ? rms / std::sqrt(ss / static_cast<double>(n)) : 0.0;
  for (double& v : out) v *= scale;
  return out;
}

// Hann-windowed linear chirp 1 -> 3 kHz, centred at centre_ms.
void add_burst(std::vector<double>& audio, double centre_ms, double amplitude, double phase) {
  const double rate = kSynthAudioRate;
  const double half = kBurstMs / 2.0;
  const auto first = static_cast<long>(std::ceil((centre_ms - half) * rate / 1000.0));
  const auto last = static_cast<long>(std::floor((centre_ms + half) * rate / 1000.0));
  const double f0 = 1000.0, f1 = 3000.0, dur = kBurstMs / 1000.0;
  for (long k = std::max(0L, first); k <= last && k < static_cast<long>(audio.size()); ++k) {
    const double tau = static_cast<double>(k) / rate - (centre_ms - half) / 1000.0;
    if (tau < 0.0 || tau > dur) continue;
    const double window = 0.5 * (1.0 - std::cos(kTwoPi * tau / dur));
    const double arg = kTwoPi * (f0 * tau + 0.5 * (f1 - f0) / dur * tau * tau) + phase;
    audio[static_cast<std::size_t>(k)] += amplitude * window * std::sin(arg);
  }
}

struct Swing {
  double centre_imu_ms;
  double accel_peak_g;
  double gyro_peak_dps;
};

double half_sine(double t, double centre) {
  const double u = (t - centre) / kSwingMs + 0.5;
  return (u > 0.0 && u < 1.0) ? std::sin(std::numbers::pi * u) : 0.0;
}

bool clear_of(double t, const std::vector<double>& taken, double gap) {
  return std::all_of(taken.begin(), taken.end(),
                     [&](double other) { return std::abs(other - t) >= gap; });
}

}  // namespace

SynthData synthesize(const SynthConfig& cfg) {
  if (!(cfg.duration_s > 0.0) || !std::isfinite(cfg.injected_offset_ms) ||
      !(cfg.imu_noise_g >= 0.0) || !(cfg.distractor_rate_per_min >= 0.0)) {
    throw Error("invalid synth config");
  }
  std::mt19937_64 rng(cfg.seed);
  const double duration_ms = 1000.0 * cfg.duration_s;
  const double margin = 500.0 + std::abs(cfg.injected_offset_ms);

  // Shots: uniform placement with a 1 s minimum gap, on whole milliseconds.
  const double span = duration_ms - 2.0 * margin;
  std::vector<double> shots;
  if (cfg.shot_count > 0) {
    const double slack = span - kMinShotGapMs * static_cast<double>(cfg.shot_count - 1);
    if (static_cast<double>(cfg.shot_count) * kMinShotGapMs > duration_ms || slack < 0.0) {
      throw Error("cannot place shots");
    }
    std::uniform_int_distribution<long> pick(0, static_cast<long>(std::floor(slack)));
    std::vector<long> offsets(cfg.shot_count);
    for (auto& o : offsets) o = pick(rng);
    std::sort(offsets.begin(), offsets.end());
    for (std::size_t i = 0; i < offsets.size(); ++i) {
      shots.push_back(std::ceil(margin) + static_cast<double>(offsets[i]) +
                      kMinShotGapMs * static_cast<double>(i));
    }
  }

  const auto per_kind =
      static_cast<std::size_t>(std::llround(cfg.distractor_rate_per_min * cfg.duration_s / 60.0));
  std::vector<double> occupied = shots;
  auto place = [&](std::vector<double>& out) {
    std::uniform_int_distribution<long> pick(static_cast<long>(std::ceil(margin)),
                                             static_cast<long>(std::floor(duration_ms - margin)));
    for (std::size_t i = 0; i < per_kind; ++i) {
      bool placed = false;
      for (int attempt = 0; attempt < 10000 && !placed; ++attempt) {
        const auto t = static_cast<double>(pick(rng));
        if (clear_of(t, occupied, kMinDistractorGapMs)) {
          out.push_back(t);
          occupied.push_back(t);
          placed = true;
        }
      }
      if (!placed) throw Error("cannot place distractors");
    }
    std::sort(out.begin(), out.end());
  };
  SynthData data;
  place(data.audio_distractors);
  place(data.imu_distractors);
  data.labels.shots = shots;

  // Audio.
  const auto audio_n = static_cast<std::size_t>(std::llround(cfg.duration_s * kSynthAudioRate));
  std::vector<double> audio = pink_noise(audio_n, kSynthNoiseRms, rng);
  std::uniform_real_distribution<double> jitter(-kSnrJitterDb, kSnrJitterDb);
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);
  // Hann-windowed sinusoid has mean square A^2 * 3/16 over the burst.
  auto burst_amplitude = [&] {
    const double snr = std::pow(10.0, (cfg.audio_snr_db + jitter(rng)) / 10.0);
    return std::sqrt(kSynthNoiseRms * kSynthNoiseRms * snr * 16.0 / 3.0);
  };
  std::vector<double> bursts = shots;
  bursts.insert(bursts.end(), data.audio_distractors.begin(), data.audio_distractors.end());
  std::sort(bursts.begin(), bursts.end());
  for (double t : bursts) {
    const double a = burst_amplitude();
    add_burst(audio, t, a, phase(rng));
  }
  for (double& v : audio) v = std::clamp(v, -1.0, 32767.0 / 32768.0);
  data.audio = SampleSeries(kSynthAudioRate, 0.0, std::move(audio));

  // IMU.
  std::vector<double> swings_at = shots;
  swings_at.insert(swings_at.end(), data.imu_distractors.begin(), data.imu_distractors.end());
  std::sort(swings_at.begin(), swings_at.end());
  std::uniform_real_distribution<double> accel_peak(2.0, 4.0);
  std::uniform_real_distribution<double> gyro_peak(300.0, 800.0);
  std::vector<Swing> swings;
  for (double t : swings_at) {
    const double a = accel_peak(rng);
    swings.push_back({t + cfg.injected_offset_ms, a, gyro_peak(rng)});
  }
  const double sway_phase_a = phase(rng);
  const double sway_phase_w = phase(rng);
  std::normal_distribution<double> accel_noise(0.0, 1.0);
  const double gyro_noise = 100.0 * cfg.imu_noise_g;
  const auto imu_n = static_cast<std::size_t>(std::llround(cfg.duration_s * kImuRateHz));
  data.imu.reserve(imu_n);
  std::size_t next_swing = 0;
  for (std::size_t k = 0; k < imu_n; ++k) {
    ImuRecord r;
    r.t = 10.0 * static_cast<double>(k);
    const double ts = r.t / 1000.0;
    r.ax = 0.3 + 0.1 * std::sin(kTwoPi * 0.3 * ts + sway_phase_a);
    r.ay = 0.4;
    r.az = 0.866;
    r.gx = 0.0;
    r.gy = 20.0 * std::sin(kTwoPi * 0.5 * ts + sway_phase_w);
    r.gz = 0.0;
    while (next_swing < swings.size() &&
           swings[next_swing].centre_imu_ms + kSwingMs < r.t) {
      ++next_swing;
    }
    for (std::size_t s = next_swing; s < swings.size() &&
                                     swings[s].centre_imu_ms - kSwingMs <= r.t; ++s) {
      const double shape = half_sine(r.t, swings[s].centre_imu_ms);
      r.ax += swings[s].accel_peak_g * shape;
      r.gy += swings[s].gyro_peak_dps * shape;
    }
    r.ax += cfg.imu_noise_g * accel_noise(rng);
    r.ay += cfg.imu_noise_g * accel_noise(rng);
    r.az += cfg.imu_noise_g * accel_noise(rng);
    r.gx += gyro_noise * accel_noise(rng);
    r.gy += gyro_noise * accel_noise(rng);
    r.gz += gyro_noise * accel_noise(rng);
    r.ax = std::clamp(r.ax, -kAccelRangeG, kAccelRangeG);
    r.ay = std::clamp(r.ay, -kAccelRangeG, kAccelRangeG);
    r.az = std::clamp(r.az, -kAccelRangeG, kAccelRangeG);
    r.gx = std::clamp(r.gx, -kGyroRangeDps, kGyroRangeDps);
    r.gy = std::clamp(r.gy, -kGyroRangeDps, kGyroRangeDps);
    r.gz = std::clamp(r.gz, -kGyroRangeDps, kGyroRangeDps);
    data.imu.push_back(r);
  }
  return data;
}

}  // namespace shotfusion

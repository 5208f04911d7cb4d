#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "shotfusion/events.hpp"
#include "shotfusion/signal.hpp"

namespace shotfusion {

struct AudioConfig {
  double sample_rate = 8000.0;
  double microframe_ms = 10.0;
  std::size_t macroframe_half = 5;  // microframes on each side of the APF centre

  /// Throws unless the microframe is a positive whole number of samples.
  std::size_t microframe_samples() const;
  double frame_rate() const { return 1000.0 / microframe_ms; }
  std::size_t macroframe_size() const { return 2 * macroframe_half + 1; }
};

/// Trainable front filter plus the decision offset added to APF.
struct FilterModel {
  static constexpr std::size_t kDefaultTaps = 23;

  std::vector<double> weights;
  double bias = 0.0;

  /// Pass-through filter: tap 0 is 1, the rest 0.
  static FilterModel identity(std::size_t taps = kDefaultTaps);
};

/// A training instance; its label applies to the centre microframe.
struct LabeledAudioWindow {
  std::vector<double> samples;
  bool shot = false;
};

struct TrainConfig {
  double learning_rate = 1e-3;
  std::size_t batch_size = 32;
  std::size_t max_epochs = 200;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double init_std = 0.20851441405707477;  // 1/sqrt(23)
  double neg_pos_ratio = 20.0;
  std::size_t taps = FilterModel::kDefaultTaps;
  std::uint64_t seed = 0;
};

struct TrainReport {
  std::size_t epochs_run = 0;
  std::size_t positives = 0;
  std::size_t negatives = 0;  // after subsampling
  std::size_t final_misclassified = 0;
  double final_epoch_loss = 0.0;
  std::vector<double> epoch_loss;
};

/// Sum of squares over each complete microframe; timestamps at frame centres.
SampleSeries short_time_energy(const SampleSeries& x, const AudioConfig& cfg);

/// Energy minus its centred macroframe mean; only full-window indices emitted.
SampleSeries apf(const SampleSeries& energy, const AudioConfig& cfg);

/// Filter -> energy -> APF. The bias is not applied.
SampleSeries audio_likelihood(const SampleSeries& x, const FilterModel& model,
                              const AudioConfig& cfg);

/// One event per microframe with APF + bias > 0.
std::vector<ShotEvent> detect_audio(const SampleSeries& x, const FilterModel& model,
                                    const AudioConfig& cfg);

/// Events from an already computed likelihood series.
std::vector<ShotEvent> threshold_likelihood(const SampleSeries& likelihood, double bias);

/// Shortest window from which the centre-frame APF is fully defined.
std::size_t min_window_samples(const AudioConfig& cfg, std::size_t taps);

/// Loss and analytic gradient for a single labeled window.
struct WindowLoss {
  double score = 0.0;  // APF at the centre microframe + bias
  double loss = 0.0;
  bool misclassified = false;
  std::vector<double> grad_weights;
  double grad_bias = 0.0;
};

/// The window is filtered as a whole; framing starts after the first
/// taps-1 samples so every frame sees a fully populated filter history.
WindowLoss window_loss(const LabeledAudioWindow& window, const FilterModel& model,
                       const AudioConfig& cfg);

/// Centre-frame score only (no gradient).
double window_score(const LabeledAudioWindow& window, const FilterModel& model,
                    const AudioConfig& cfg);

FilterModel train_filter(const std::vector<LabeledAudioWindow>& data, const TrainConfig& cfg,
                         const AudioConfig& audio_cfg, TrainReport* report = nullptr);

}  // namespace shotfusion

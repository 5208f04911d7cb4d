#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "shotfusion/audio.hpp"
#include "shotfusion/eval.hpp"
#include "shotfusion/forest.hpp"
#include "shotfusion/fusion.hpp"
#include "shotfusion/imu.hpp"
#include "shotfusion/sync.hpp"
#include "shotfusion/synth.hpp"

namespace shotfusion {

namespace fs = std::filesystem;

/// One capture session: audio.wav, optional imu.csv and labels.csv.
struct Recording {
  fs::path dir;
  SampleSeries audio;
  std::optional<std::vector<ImuRecord>> imu;
  LabelSet labels;
};

/// `dir` itself when it holds audio.wav, otherwise its subdirectories that
/// do, in name order.
std::vector<fs::path> find_recordings(const fs::path& dir);
Recording load_recording(const fs::path& dir);
std::vector<Recording> load_recordings(const fs::path& data_dir);
void save_recording(const fs::path& dir, const SynthData& data);

/// Seeded shuffle, then the first `train_fraction` go to training.
template <typename T>
std::pair<std::vector<T>, std::vector<T>> split_train_validation(std::vector<T> items,
                                                                 std::uint64_t seed,
                                                                 double train_fraction = 0.8) {
  std::mt19937_64 rng(seed);
  std::shuffle(items.begin(), items.end(), rng);
  const auto cut = static_cast<std::size_t>(
      std::llround(train_fraction * static_cast<double>(items.size())));
  std::vector<T> validation(items.begin() + static_cast<long>(cut), items.end());
  items.resize(cut);
  return {std::move(items), std::move(validation)};
}

/// Shot windows are centred on the microframe holding each label. Non-shot
/// windows are centred on random microframes farther than the match
/// tolerance from every label, neg_pos_ratio of them per shot.
std::vector<LabeledAudioWindow> extract_audio_windows(const SampleSeries& audio,
                                                      const LabelSet& labels,
                                                      const AudioConfig& cfg, std::size_t taps,
                                                      double neg_pos_ratio, std::uint64_t seed);

/// Window-level precision/recall of the centre-frame decision.
EvalReport score_windows(const std::vector<LabeledAudioWindow>& windows, const FilterModel& model,
                         const AudioConfig& cfg);

struct FilterTraining {
  FilterModel model;
  TrainReport report;
  EvalReport validation;
  std::size_t train_windows = 0;
  std::size_t validation_windows = 0;
};

FilterTraining train_filter_on(const std::vector<Recording>& recordings, const TrainConfig& cfg,
                               const AudioConfig& audio_cfg = {});

/// APF threshold detections, deduplicated like the fused output.
std::vector<ShotEvent> detect_audio_only(const SampleSeries& audio, const FilterModel& filter,
                                         const AudioConfig& cfg = {});

struct StreamAnalysis {
  SampleSeries apf;
  ImuAnalysis imu;
  SyncResult sync;
  FusionStreams streams;
};

StreamAnalysis analyze_streams(const SampleSeries& audio, const std::vector<ImuRecord>& imu,
                               const FilterModel& filter, const AudioConfig& cfg = {},
                               const SyncOptions& sync = {});

/// A candidate is a shot when some label lies within the match tolerance.
std::vector<LabeledCandidate> label_candidates(const std::vector<Candidate>& candidates,
                                               const LabelSet& labels,
                                               double tolerance_ms = kMatchToleranceMs);

/// IPF level maximizing candidate-level F on the given set.
double fit_ipf_threshold(const std::vector<LabeledCandidate>& candidates);

/// IPF-only baseline: candidates above the threshold, deduplicated.
std::vector<ShotEvent> detect_imu_only(const SampleSeries& ipf, double threshold);

struct ForestTraining {
  ForestModel forest;
  EvalReport validation;
  double ipf_threshold = 0.0;
  std::size_t train_candidates = 0;
  std::size_t validation_candidates = 0;
  std::vector<SyncResult> syncs;
};

ForestTraining train_forest_on(const std::vector<Recording>& recordings, const FilterModel& filter,
                               std::size_t tree_count, std::uint64_t seed,
                               const AudioConfig& cfg = {}, const SyncOptions& sync = {});

struct PipelineOptions {
  fs::path audio;
  std::optional<fs::path> imu;
  fs::path filter;
  std::optional<fs::path> forest;
  std::optional<fs::path> labels;
  fs::path out_dir = ".";
  bool audio_only = false;
  double tolerance_ms = kMatchToleranceMs;
  SyncOptions sync;
  AudioConfig audio_cfg;
};

struct PipelineResult {
  std::vector<ShotEvent> events;
  std::optional<SyncResult> sync;
  std::optional<EvalReport> report;
};

/// Ingest, detect, and write detections.csv, sync.json, apf.csv, ipf.csv
/// and eval.json (when labels are given) under out_dir.
PipelineResult run_pipeline(const PipelineOptions& options);

}  // namespace shotfusion

#include "shotfusion/pipeline.hpp"

#include <cmath>
#include <future>

#include "shotfusion/io.hpp"

namespace shotfusion {

std::vector<fs::path> find_recordings(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error("data directory not found: " + dir.string());
  if (fs::exists(dir / "audio.wav")) return {dir};
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory() && fs::exists(entry.path() / "audio.wav")) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) throw Error("no recordings under " + dir.string());
  return out;
}

Recording load_recording(const fs::path& dir) {
  Recording r;
  r.dir = dir;
  r.audio = io::read_wav(dir / "audio.wav");
  if (fs::exists(dir / "imu.csv")) r.imu = io::read_imu_csv(dir / "imu.csv");
  if (fs::exists(dir / "labels.csv")) r.labels = io::read_labels(dir / "labels.csv");
  return r;
}

std::vector<Recording> load_recordings(const fs::path& data_dir) {
  std::vector<Recording> out;
  for (const auto& dir : find_recordings(data_dir)) out.push_back(load_recording(dir));
  return out;
}

void save_recording(const fs::path& dir, const SynthData& data) {
  fs::create_directories(dir);
  io::write_wav(dir / "audio.wav", data.audio);
  io::write_imu_csv(dir / "imu.csv", data.imu);
  io::write_labels(dir / "labels.csv", data.labels);
}

std::vector<LabeledAudioWindow> extract_audio_windows(const SampleSeries& audio,
                                                      const LabelSet& labels,
                                                      const AudioConfig& cfg, std::size_t taps,
                                                      double neg_pos_ratio, std::uint64_t seed) {
  const std::size_t frame = cfg.microframe_samples();
  const std::size_t half = cfg.macroframe_half;
  const std::size_t frames = audio.size() / frame;
  const std::size_t lead = taps - 1;

  // Frame c is usable when its whole macroframe and filter history fit.
  auto usable = [&](std::size_t c) {
    return c >= half && (c - half) * frame >= lead && c + half < frames;
  };
  auto window_at = [&](std::size_t c, bool shot) {
    const std::size_t begin = (c - half) * frame - lead;
    const std::size_t end = (c + half + 1) * frame;
    return LabeledAudioWindow{
        std::vector<double>(audio.values.begin() + static_cast<long>(begin),
                            audio.values.begin() + static_cast<long>(end)),
        shot};
  };
  auto frame_of = [&](double t_ms) {
    return static_cast<long>(std::floor((t_ms - audio.start_time) / cfg.microframe_ms));
  };

  std::vector<LabeledAudioWindow> out;
  for (double t : labels.shots) {
    const long c = frame_of(t);
    if (c >= 0 && usable(static_cast<std::size_t>(c))) out.push_back(window_at(c, true));
  }
  const std::size_t positives = out.size();

  std::vector<std::size_t> pool;
  for (std::size_t c = 0; c < frames; ++c) {
    if (!usable(c)) continue;
    const double centre = audio.start_time + cfg.microframe_ms * (static_cast<double>(c) + 0.5);
    const bool near = std::any_of(labels.shots.begin(), labels.shots.end(), [&](double t) {
      return std::abs(t - centre) <= kMatchToleranceMs;
    });
    if (!near) pool.push_back(c);
  }
  std::mt19937_64 rng(seed);
  std::shuffle(pool.begin(), pool.end(), rng);
  const auto wanted = static_cast<std::size_t>(
      std::ceil(neg_pos_ratio * static_cast<double>(std::max<std::size_t>(positives, 1))));
  pool.resize(std::min(pool.size(), wanted));
  std::sort(pool.begin(), pool.end());
  for (std::size_t c : pool) out.push_back(window_at(c, false));
  return out;
}

EvalReport score_windows(const std::vector<LabeledAudioWindow>& windows, const FilterModel& model,
                         const AudioConfig& cfg) {
  std::size_t tp = 0, fp = 0, fn = 0;
  for (const auto& w : windows) {
    const bool predicted = window_score(w, model, cfg) > 0.0;
    if (predicted && w.shot) ++tp;
    else if (predicted) ++fp;
    else if (w.shot) ++fn;
  }
  return make_report(tp, fp, fn, 0.0);
}

FilterTraining train_filter_on(const std::vector<Recording>& recordings, const TrainConfig& cfg,
                               const AudioConfig& audio_cfg) {
  std::vector<LabeledAudioWindow> windows;
  for (std::size_t i = 0; i < recordings.size(); ++i) {
    auto w = extract_audio_windows(recordings[i].audio, recordings[i].labels, audio_cfg, cfg.taps,
                                   cfg.neg_pos_ratio, cfg.seed + i);
    windows.insert(windows.end(), std::make_move_iterator(w.begin()),
                   std::make_move_iterator(w.end()));
  }
  auto [train, validation] = split_train_validation(std::move(windows), cfg.seed);
  FilterTraining out;
  out.model = train_filter(train, cfg, audio_cfg, &out.report);
  out.validation = score_windows(validation, out.model, audio_cfg);
  out.train_windows = train.size();
  out.validation_windows = validation.size();
  return out;
}

std::vector<ShotEvent> detect_audio_only(const SampleSeries& audio, const FilterModel& filter,
                                         const AudioConfig& cfg) {
  return dedup(detect_audio(audio, filter, cfg));
}

StreamAnalysis analyze_streams(const SampleSeries& audio, const std::vector<ImuRecord>& imu,
                               const FilterModel& filter, const AudioConfig& cfg,
                               const SyncOptions& sync) {
  auto audio_task =
      std::async(std::launch::async, [&] { return audio_likelihood(audio, filter, cfg); });
  StreamAnalysis out;
  out.imu = analyze_imu(imu);
  out.apf = audio_task.get();
  out.sync = synchronize(out.apf, out.imu.ipf, sync);
  out.streams = align_streams(out.apf, out.imu, out.sync.estimate.offset_ms);
  return out;
}

std::vector<LabeledCandidate> label_candidates(const std::vector<Candidate>& candidates,
                                               const LabelSet& labels, double tolerance_ms) {
  std::vector<LabeledCandidate> out;
  out.reserve(candidates.size());
  for (const auto& c : candidates) {
    const bool shot = std::any_of(labels.shots.begin(), labels.shots.end(), [&](double t) {
      return std::abs(t - c.time_ms) <= tolerance_ms;
    });
    out.push_back({c, shot});
  }
  return out;
}

double fit_ipf_threshold(const std::vector<LabeledCandidate>& candidates) {
  if (candidates.empty()) throw Error("degenerate training set");
  std::vector<std::pair<double, bool>> scored;
  std::size_t positives = 0;
  for (const auto& c : candidates) {
    scored.emplace_back(c.candidate.features[1], c.shot);
    positives += c.shot ? 1 : 0;
  }
  std::sort(scored.begin(), scored.end(), std::greater<>());
  // Sweep thresholds just below each distinct value, highest first.
  double best_threshold = scored.front().first + 1.0;
  double best_f = make_report(0, 0, positives, 0.0).f_score;
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < scored.size(); ++i) {
    (scored[i].second ? tp : fp) += 1;
    if (i + 1 < scored.size() && scored[i + 1].first == scored[i].first) continue;
    const double f = make_report(tp, fp, positives - tp, 0.0).f_score;
    if (f > best_f) {
      best_f = f;
      best_threshold = i + 1 < scored.size()
                           ? scored[i + 1].first + 0.5 * (scored[i].first - scored[i + 1].first)
                           : scored[i].first - 1.0;
    }
  }
  return best_threshold;
}

std::vector<ShotEvent> detect_imu_only(const SampleSeries& ipf, double threshold) {
  std::vector<ShotEvent> events;
  for (double t : select_candidates(ipf)) {
    const auto k = static_cast<std::size_t>(std::llround((t - ipf.start_time) / ipf.period_ms()));
    if (k < ipf.size() && ipf.values[k] > threshold) events.push_back({t, ipf.values[k]});
  }
  return dedup(events);
}

ForestTraining train_forest_on(const std::vector<Recording>& recordings, const FilterModel& filter,
                               std::size_t tree_count, std::uint64_t seed, const AudioConfig& cfg,
                               const SyncOptions& sync) {
  ForestTraining out;
  std::vector<LabeledCandidate> all;
  for (const auto& rec : recordings) {
    if (!rec.imu) throw Error("recording without imu.csv: " + rec.dir.string());
    const auto analysis = analyze_streams(rec.audio, *rec.imu, filter, cfg, sync);
    out.syncs.push_back(analysis.sync);
    auto labeled = label_candidates(candidates_for(analysis.streams), rec.labels);
    all.insert(all.end(), labeled.begin(), labeled.end());
  }
  auto [train, validation] = split_train_validation(std::move(all), seed);
  out.forest = train_forest(train, tree_count, seed);
  out.ipf_threshold = fit_ipf_threshold(train);
  std::size_t tp = 0, fp = 0, fn = 0;
  for (const auto& c : validation) {
    const bool predicted = classify(out.forest, c.candidate).shot;
    if (predicted && c.shot) ++tp;
    else if (predicted) ++fp;
    else if (c.shot) ++fn;
  }
  out.validation = make_report(tp, fp, fn, kMatchToleranceMs);
  out.train_candidates = train.size();
  out.validation_candidates = validation.size();
  return out;
}

PipelineResult run_pipeline(const PipelineOptions& options) {
  // Models first, so a bad path fails before any heavy work.
  const FilterModel filter = io::load_filter(options.filter);
  std::optional<ForestModel> forest;
  if (!options.audio_only) {
    if (!options.forest) throw Error("model not found: no forest given");
    if (!options.imu) throw Error("imu input required unless audio-only");
    forest = io::load_forest(*options.forest);
  }
  std::optional<LabelSet> labels;
  if (options.labels) labels = io::read_labels(*options.labels);

  auto audio_task = std::async(std::launch::async, [&] { return io::read_wav(options.audio); });
  std::optional<std::vector<ImuRecord>> imu;
  if (!options.audio_only) imu = io::read_imu_csv(*options.imu);
  const SampleSeries audio = audio_task.get();

  PipelineResult result;
  std::optional<StreamAnalysis> analysis;
  SampleSeries apf_series;
  if (options.audio_only) {
    apf_series = audio_likelihood(audio, filter, options.audio_cfg);
    result.events = dedup(threshold_likelihood(apf_series, filter.bias));
  } else {
    analysis = analyze_streams(audio, *imu, filter, options.audio_cfg, options.sync);
    result.sync = analysis->sync;
    result.events = detect_from_streams(analysis->streams, *forest);
    apf_series = analysis->apf;
  }
  if (labels) result.report = evaluate(result.events, *labels, options.tolerance_ms);

  fs::create_directories(options.out_dir);
  io::write_events(options.out_dir / "detections.csv", result.events);
  io::write_series_csv(options.out_dir / "apf.csv", apf_series);
  if (analysis) {
    io::write_series_csv(options.out_dir / "ipf.csv", analysis->imu.ipf);
    io::write_json(options.out_dir / "sync.json",
                   io::sync_json(analysis->sync.estimate, analysis->sync.validated));
  }
  if (result.report) io::write_json(options.out_dir / "eval.json", io::to_json(*result.report));
  return result;
}

}  // namespace shotfusion

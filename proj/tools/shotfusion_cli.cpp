// Command-line front end: synth, train-filter, train-forest, sync, detect, eval.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "shotfusion/io.hpp"
#include "shotfusion/pipeline.hpp"

namespace sf = shotfusion;
namespace fs = std::filesystem;

namespace {

struct SynthArgs {
  std::string config;
  std::string out_dir;
};

struct TrainFilterArgs {
  std::string data;
  std::string out;
  sf::TrainConfig train;
};

struct TrainForestArgs {
  std::string data;
  std::string filter;
  std::string out;
  std::size_t trees = sf::ForestModel::kDefaultTrees;
  std::uint64_t seed = 0;
};

struct SyncArgs {
  std::string audio, imu, filter;
  std::string out;
  sf::SyncOptions sync;
};

struct DetectArgs {
  std::string audio, imu, filter, forest, labels;
  std::string out_dir = ".";
  bool audio_only = false;
  sf::SyncOptions sync;
};

struct EvalArgs {
  std::string events, labels;
  double tolerance_ms = sf::kMatchToleranceMs;
};

int run_synth(const SynthArgs& a) {
  const auto cfg = sf::io::synth_config_from_json(sf::io::read_json(a.config));
  const auto data = sf::synthesize(cfg);
  sf::save_recording(a.out_dir, data);
  sf::io::write_json(fs::path(a.out_dir) / "config.json", sf::io::to_json(cfg));
  std::cout << nlohmann::json{{"shots", data.labels.shots.size()},
                              {"audio_distractors", data.audio_distractors.size()},
                              {"imu_distractors", data.imu_distractors.size()},
                              {"out_dir", a.out_dir}}
                   .dump()
            << "\n";
  return 0;
}

int run_train_filter(const TrainFilterArgs& a) {
  const auto recordings = sf::load_recordings(a.data);
  const auto result = sf::train_filter_on(recordings, a.train);
  sf::io::write_json(a.out, sf::io::to_json(result.model));
  std::cout << nlohmann::json{{"epochs", result.report.epochs_run},
                              {"train_windows", result.train_windows},
                              {"train_misclassified", result.report.final_misclassified},
                              {"validation_windows", result.validation_windows},
                              {"validation", sf::io::to_json(result.validation)}}
                   .dump()
            << "\n";
  return 0;
}

int run_train_forest(const TrainForestArgs& a) {
  const auto recordings = sf::load_recordings(a.data);
  const auto filter = sf::io::load_filter(a.filter);
  const auto result = sf::train_forest_on(recordings, filter, a.trees, a.seed);
  sf::io::write_json(a.out, sf::io::to_json(result.forest));
  nlohmann::json offsets = nlohmann::json::array();
  for (const auto& s : result.syncs) offsets.push_back(sf::io::sync_json(s.estimate, s.validated));
  std::cout << nlohmann::json{{"train_candidates", result.train_candidates},
                              {"validation_candidates", result.validation_candidates},
                              {"validation", sf::io::to_json(result.validation)},
                              {"sync", offsets}}
                   .dump()
            << "\n";
  return 0;
}

int run_sync(const SyncArgs& a) {
  const auto filter = sf::io::load_filter(a.filter);
  const auto audio = sf::io::read_wav(a.audio);
  const auto imu = sf::io::read_imu_csv(a.imu);
  const auto analysis = sf::analyze_streams(audio, imu, filter, {}, a.sync);
  const auto j = sf::io::sync_json(analysis.sync.estimate, analysis.sync.validated);
  if (!a.out.empty()) sf::io::write_json(a.out, j);
  std::cout << j.dump() << "\n";
  return 0;
}

int run_detect(const DetectArgs& a) {
  sf::PipelineOptions options;
  options.audio = a.audio;
  if (!a.imu.empty()) options.imu = a.imu;
  options.filter = a.filter;
  if (!a.forest.empty()) options.forest = a.forest;
  if (!a.labels.empty()) options.labels = a.labels;
  options.out_dir = a.out_dir;
  options.audio_only = a.audio_only;
  options.sync = a.sync;
  const auto result = sf::run_pipeline(options);
  nlohmann::json summary{{"events", result.events.size()}, {"out_dir", a.out_dir}};
  if (result.sync) {
    summary["sync"] = sf::io::sync_json(result.sync->estimate, result.sync->validated);
  }
  if (result.report) summary["eval"] = sf::io::to_json(*result.report);
  std::cout << summary.dump() << "\n";
  return 0;
}

int run_eval(const EvalArgs& a) {
  const auto events = sf::io::read_events(a.events);
  const auto labels = sf::io::read_labels(a.labels);
  std::cout << sf::io::to_json(sf::evaluate(events, labels, a.tolerance_ms)).dump() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wrist-wearable shot detection from audio and IMU streams"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic recording with labels");
  synth_cmd->add_option("--config", synth.config, "SynthConfig JSON")->required();
  synth_cmd->add_option("--out-dir", synth.out_dir, "Output directory")->required();

  TrainFilterArgs tf;
  auto* tf_cmd = app.add_subcommand("train-filter", "Train the audio front filter and bias");
  tf_cmd->add_option("--data", tf.data, "Recording directory")->required();
  tf_cmd->add_option("--out", tf.out, "Output model JSON")->required();
  tf_cmd->add_option("--seed", tf.train.seed, "Random seed");
  tf_cmd->add_option("--epochs", tf.train.max_epochs, "Maximum epochs");
  tf_cmd->add_option("--learning-rate", tf.train.learning_rate, "Adam learning rate");
  tf_cmd->add_option("--batch-size", tf.train.batch_size, "Mini-batch size");

  TrainForestArgs tr;
  auto* tr_cmd = app.add_subcommand("train-forest", "Train the fusion random forest");
  tr_cmd->add_option("--data", tr.data, "Recording directory")->required();
  tr_cmd->add_option("--filter", tr.filter, "Filter model JSON")->required();
  tr_cmd->add_option("--out", tr.out, "Output forest JSON")->required();
  tr_cmd->add_option("--trees", tr.trees, "Tree count");
  tr_cmd->add_option("--seed", tr.seed, "Random seed");

  SyncArgs sy;
  auto* sy_cmd = app.add_subcommand("sync", "Estimate the audio/IMU clock offset");
  sy_cmd->add_option("--audio", sy.audio, "PCM16 mono 8 kHz WAV")->required();
  sy_cmd->add_option("--imu", sy.imu, "IMU CSV")->required();
  sy_cmd->add_option("--filter", sy.filter, "Filter model JSON")->required();
  sy_cmd->add_option("--out", sy.out, "Also write the result to this file");
  sy_cmd->add_option("--snippet-seconds", sy.sync.snippet_seconds, "Initial estimation snippet");
  sy_cmd->add_option("--max-lag-ms", sy.sync.max_lag_ms, "Largest offset searched");

  DetectArgs de;
  auto* de_cmd = app.add_subcommand("detect", "Run the full detection pipeline");
  de_cmd->add_option("--audio", de.audio, "PCM16 mono 8 kHz WAV")->required();
  de_cmd->add_option("--imu", de.imu, "IMU CSV");
  de_cmd->add_option("--filter", de.filter, "Filter model JSON")->required();
  de_cmd->add_option("--forest", de.forest, "Forest model JSON");
  de_cmd->add_option("--labels", de.labels, "Ground-truth labels CSV");
  de_cmd->add_option("--out-dir", de.out_dir, "Output directory");
  de_cmd->add_flag("--audio-only", de.audio_only, "APF threshold detection, no sync");
  de_cmd->add_option("--snippet-seconds", de.sync.snippet_seconds, "Initial estimation snippet");
  de_cmd->add_option("--max-lag-ms", de.sync.max_lag_ms, "Largest offset searched");

  EvalArgs ev;
  auto* ev_cmd = app.add_subcommand("eval", "Score detections against labels");
  ev_cmd->add_option("--events", ev.events, "Detections CSV")->required();
  ev_cmd->add_option("--labels", ev.labels, "Labels CSV")->required();
  ev_cmd->add_option("--tolerance-ms", ev.tolerance_ms, "Match tolerance");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth_cmd) return run_synth(synth);
    if (*tf_cmd) return run_train_filter(tf);
    if (*tr_cmd) return run_train_forest(tr);
    if (*sy_cmd) return run_sync(sy);
    if (*de_cmd) {
      if (!de.audio_only && (de.imu.empty() || de.forest.empty())) {
        throw sf::Error("detect needs --imu and --forest unless --audio-only");
      }
      return run_detect(de);
    }
    if (*ev_cmd) return run_eval(ev);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "shotfusion/audio.hpp"
#include "shotfusion/eval.hpp"
#include "shotfusion/events.hpp"
#include "shotfusion/forest.hpp"
#include "shotfusion/imu.hpp"
#include "shotfusion/signal.hpp"
#include "shotfusion/sync.hpp"
#include "shotfusion/synth.hpp"

namespace shotfusion::io {

namespace fs = std::filesystem;

// PCM16 mono 8 kHz WAV. Reading rejects any other encoding, naming the
// property that differs.
SampleSeries read_wav(const fs::path& path, double start_time_ms = 0.0);
void write_wav(const fs::path& path, const SampleSeries& audio);

// t_ms,ax,ay,az,gx,gy,gz
std::vector<ImuRecord> read_imu_csv(const fs::path& path);
void write_imu_csv(const fs::path& path, const std::vector<ImuRecord>& records);

// single column t_ms
LabelSet read_labels(const fs::path& path);
void write_labels(const fs::path& path, const LabelSet& labels);

// time_ms,score
std::vector<ShotEvent> read_events(const fs::path& path);
void write_events(const fs::path& path, const std::vector<ShotEvent>& events);

// time_ms,value
void write_series_csv(const fs::path& path, const SampleSeries& series);

/// Shortest round-trip decimal form.
std::string format_number(double v);

nlohmann::json to_json(const FilterModel& model, const AudioConfig& cfg = {});
FilterModel filter_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ForestModel& model);
ForestModel forest_from_json(const nlohmann::json& j);
nlohmann::json to_json(const EvalReport& report);
nlohmann::json sync_json(const OffsetEstimate& estimate, bool validated);
SynthConfig synth_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SynthConfig& cfg);

/// Throw "model not found" for a missing path.
FilterModel load_filter(const fs::path& path);
ForestModel load_forest(const fs::path& path);
nlohmann::json read_json(const fs::path& path);
void write_json(const fs::path& path, const nlohmann::json& j);
void write_text(const fs::path& path, const std::string& text);

}  // namespace shotfusion::io

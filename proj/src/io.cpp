#include "shotfusion/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

namespace shotfusion::io {

namespace {

constexpr double kWavScale = 32768.0;

std::ifstream open_in(const fs::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

std::uint32_t le32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t le16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put32(std::string& s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put16(std::string& s, std::uint16_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(trim(std::string_view(line).substr(
        start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& column) {
  double v = 0.0;
  const char* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, v);
  if (cell.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw Error("row " + std::to_string(row) + ": non-numeric " + column + " '" + cell + "'");
  }
  return v;
}

// Parses a headed numeric CSV into rows ordered as `header`; `lines`
// receives the 1-based file line of each row.
std::vector<std::vector<double>> read_numeric(const fs::path& path,
                                              const std::vector<std::string>& header,
                                              std::vector<std::size_t>* lines = nullptr) {
  auto in = open_in(path);
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::size_t> column;
  std::vector<std::vector<double>> out;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split_row(line);
    if (column.empty()) {
      for (const auto& name : header) {
        const auto it = std::find(cells.begin(), cells.end(), name);
        if (it == cells.end()) {
          throw Error("row " + std::to_string(lineno) + ": missing column " + name);
        }
        column.push_back(static_cast<std::size_t>(it - cells.begin()));
      }
      continue;
    }
    std::vector<double> values;
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (column[c] >= cells.size()) {
        throw Error("row " + std::to_string(lineno) + ": missing column " + header[c]);
      }
      values.push_back(parse_cell(cells[column[c]], lineno, header[c]));
    }
    out.push_back(std::move(values));
    if (lines) lines->push_back(lineno);
  }
  if (column.empty()) throw Error("row 1: missing header");
  return out;
}

}  // namespace

std::string format_number(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw Error("number format failure");
  return std::string(buf.data(), ptr);
}

SampleSeries read_wav(const fs::path& path, double start_time_ms) {
  auto in = open_in(path, std::ios::binary);
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (bytes.size() < 12 || bytes.compare(0, 4, "RIFF") != 0 || bytes.compare(8, 4, "WAVE") != 0) {
    throw Error("not a RIFF/WAVE file: " + path.string());
  }
  bool have_fmt = false;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::string id = bytes.substr(pos, 4);
    const std::size_t size = le32(p + pos + 4);
    const std::size_t body = pos + 8;
    if (body + size > bytes.size() && id != "data") throw Error("truncated WAV chunk " + id);
    if (id == "fmt ") {
      if (size < 16) throw Error("truncated WAV fmt chunk");
      const auto format = le16(p + body);
      const auto channels = le16(p + body + 2);
      const auto rate = le32(p + body + 4);
      const auto bits = le16(p + body + 14);
      if (format != 1) throw Error("unsupported WAV encoding: format " + std::to_string(format));
      if (bits != 16) throw Error("unsupported WAV bit depth: " + std::to_string(bits));
      if (channels != 1) throw Error("unsupported WAV channel count: " + std::to_string(channels));
      if (rate != 8000) throw Error("unsupported WAV sample rate: " + std::to_string(rate));
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw Error("WAV data before fmt chunk");
      const std::size_t avail = std::min(size, bytes.size() - body);
      std::vector<double> samples(avail / 2);
      for (std::size_t k = 0; k < samples.size(); ++k) {
        const auto raw = static_cast<std::int16_t>(le16(p + body + 2 * k));
        samples[k] = static_cast<double>(raw) / kWavScale;
      }
      return SampleSeries(8000.0, start_time_ms, std::move(samples));
    }
    pos = body + size + (size & 1);
  }
  throw Error("WAV file has no data chunk");
}

void write_wav(const fs::path& path, const SampleSeries& audio) {
  if (audio.rate != 8000.0) throw Error("unsupported WAV sample rate");
  const auto n = static_cast<std::uint32_t>(audio.size());
  std::string s;
  s.reserve(44 + 2 * n);
  s += "RIFF";
  put32(s, 36 + 2 * n);
  s += "WAVEfmt ";
  put32(s, 16);
  put16(s, 1);
  put16(s, 1);
  put32(s, 8000);
  put32(s, 16000);
  put16(s, 2);
  put16(s, 16);
  s += "data";
  put32(s, 2 * n);
  for (double v : audio.values) {
    const double scaled = std::clamp(std::round(v * kWavScale), -32768.0, 32767.0);
    put16(s, static_cast<std::uint16_t>(static_cast<std::int16_t>(scaled)));
  }
  auto out = open_out(path, std::ios::binary);
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::vector<ImuRecord> read_imu_csv(const fs::path& path) {
  std::vector<std::size_t> lines;
  const auto rows = read_numeric(path, {"t_ms", "ax", "ay", "az", "gx", "gy", "gz"}, &lines);
  std::vector<ImuRecord> out;
  out.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& v = rows[i];
    ImuRecord r{v[0], v[1], v[2], v[3], v[4], v[5], v[6]};
    try {
      check_range(r);
    } catch (const Error& e) {
      throw Error("row " + std::to_string(lines[i]) + ": " + e.what());
    }
    if (!out.empty() && !(r.t > out.back().t)) {
      throw Error("row " + std::to_string(lines[i]) + ": unordered stream");
    }
    out.push_back(r);
  }
  return out;
}

void write_imu_csv(const fs::path& path, const std::vector<ImuRecord>& records) {
  std::string s = "t_ms,ax,ay,az,gx,gy,gz\n";
  for (const auto& r : records) {
    for (double v : {r.t, r.ax, r.ay, r.az, r.gx, r.gy}) {
      s += format_number(v);
      s += ',';
    }
    s += format_number(r.gz);
    s += '\n';
  }
  write_text(path, s);
}

LabelSet read_labels(const fs::path& path) {
  std::vector<std::size_t> lines;
  const auto rows = read_numeric(path, {"t_ms"}, &lines);
  LabelSet labels;
  for (const auto& r : rows) labels.shots.push_back(r[0]);
  labels.check();
  return labels;
}

void write_labels(const fs::path& path, const LabelSet& labels) {
  std::string s = "t_ms\n";
  for (double t : labels.shots) s += format_number(t) + "\n";
  write_text(path, s);
}

std::vector<ShotEvent> read_events(const fs::path& path) {
  const auto rows = read_numeric(path, {"time_ms", "score"});
  std::vector<ShotEvent> out;
  for (const auto& r : rows) out.push_back({r[0], r[1]});
  return out;
}

void write_events(const fs::path& path, const std::vector<ShotEvent>& events) {
  std::string s = "time_ms,score\n";
  for (const auto& e : events) s += format_number(e.time_ms) + "," + format_number(e.score) + "\n";
  write_text(path, s);
}

void write_series_csv(const fs::path& path, const SampleSeries& series) {
  std::string s = "time_ms,value\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    s += format_number(series.time_at(k)) + "," + format_number(series.values[k]) + "\n";
  }
  write_text(path, s);
}

nlohmann::json to_json(const FilterModel& model, const AudioConfig& cfg) {
  return {{"weights", model.weights},
          {"bias", model.bias},
          {"sample_rate", cfg.sample_rate},
          {"microframe_ms", cfg.microframe_ms}};
}

FilterModel filter_from_json(const nlohmann::json& j) {
  try {
    FilterModel m;
    m.weights = j.at("weights").get<std::vector<double>>();
    m.bias = j.at("bias").get<double>();
    if (m.weights.empty()) throw Error("filter model has no weights");
    if (j.contains("sample_rate") && j.at("sample_rate").get<double>() != 8000.0) {
      throw Error("filter model sample_rate must be 8000");
    }
    if (j.contains("microframe_ms") && j.at("microframe_ms").get<double>() != 10.0) {
      throw Error("filter model microframe_ms must be 10");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("invalid filter model: ") + e.what());
  }
}

nlohmann::json to_json(const ForestModel& model) {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& tree : model.trees) {
    std::vector<int> feature, left, right, leaf;
    std::vector<double> threshold;
    for (const auto& n : tree.nodes) {
      feature.push_back(n.feature);
      threshold.push_back(n.threshold);
      left.push_back(n.left);
      right.push_back(n.right);
      leaf.push_back(n.leaf_class);
    }
    trees.push_back({{"feature", feature},
                     {"threshold", threshold},
                     {"left", left},
                     {"right", right},
                     {"leaf_class", leaf}});
  }
  return {{"tree_count", model.trees.size()}, {"seed", model.seed}, {"trees", trees}};
}

ForestModel forest_from_json(const nlohmann::json& j) {
  try {
    ForestModel m;
    m.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& t : j.at("trees")) {
      const auto feature = t.at("feature").get<std::vector<int>>();
      const auto threshold = t.at("threshold").get<std::vector<double>>();
      const auto left = t.at("left").get<std::vector<int>>();
      const auto right = t.at("right").get<std::vector<int>>();
      const auto leaf = t.at("leaf_class").get<std::vector<int>>();
      const std::size_t n = feature.size();
      if (threshold.size() != n || left.size() != n || right.size() != n || leaf.size() != n) {
        throw Error("forest node arrays differ in length");
      }
      DecisionTree tree;
      for (std::size_t i = 0; i < n; ++i) {
        tree.nodes.push_back({feature[i], threshold[i], left[i], right[i], leaf[i]});
      }
      m.trees.push_back(std::move(tree));
    }
    if (j.at("tree_count").get<std::size_t>() != m.trees.size()) {
      throw Error("forest tree_count does not match trees");
    }
    check_model(m);
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("invalid forest model: ") + e.what());
  }
}

nlohmann::json to_json(const EvalReport& r) {
  return {{"precision", r.precision},
          {"recall", r.recall},
          {"f_score", r.f_score},
          {"true_positives", r.true_positives},
          {"false_positives", r.false_positives},
          {"false_negatives", r.false_negatives},
          {"match_tolerance_ms", r.match_tolerance_ms}};
}

nlohmann::json sync_json(const OffsetEstimate& e, bool validated) {
  return {{"offset_ms", e.offset_ms},
          {"peak_correlation", e.peak_correlation},
          {"validated", validated},
          {"window_seconds", e.window_seconds}};
}

SynthConfig synth_config_from_json(const nlohmann::json& j) {
  try {
    SynthConfig c;
    c.duration_s = j.value("duration_s", c.duration_s);
    c.shot_count = j.value("shot_count", c.shot_count);
    c.audio_snr_db = j.value("audio_snr_db", c.audio_snr_db);
    c.imu_noise_g = j.value("imu_noise_g", c.imu_noise_g);
    c.injected_offset_ms = j.value("injected_offset_ms", c.injected_offset_ms);
    c.distractor_rate_per_min = j.value("distractor_rate_per_min", c.distractor_rate_per_min);
    c.seed = j.value("seed", c.seed);
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("invalid synth config: ") + e.what());
  }
}

nlohmann::json to_json(const SynthConfig& c) {
  return {{"duration_s", c.duration_s},
          {"shot_count", c.shot_count},
          {"audio_snr_db", c.audio_snr_db},
          {"imu_noise_g", c.imu_noise_g},
          {"injected_offset_ms", c.injected_offset_ms},
          {"distractor_rate_per_min", c.distractor_rate_per_min},
          {"seed", c.seed}};
}

nlohmann::json read_json(const fs::path& path) {
  auto in = open_in(path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

FilterModel load_filter(const fs::path& path) {
  if (!fs::exists(path)) throw Error("model not found: " + path.string());
  return filter_from_json(read_json(path));
}

ForestModel load_forest(const fs::path& path) {
  if (!fs::exists(path)) throw Error("model not found: " + path.string());
  return forest_from_json(read_json(path));
}

void write_json(const fs::path& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_out(path, std::ios::binary);
  out << text;
  if (!out) throw Error("cannot write " + path.string());
}

}  // namespace shotfusion::io

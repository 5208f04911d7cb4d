#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "shotfusion/io.hpp"
#include "shotfusion/pipeline.hpp"

namespace py = pybind11;
using namespace shotfusion;

namespace {

LabelSet labels_from(const std::vector<double>& shots) {
  LabelSet l{shots};
  l.check();
  return l;
}

}  // namespace

PYBIND11_MODULE(_shotfusion, m) {
  m.doc() = "Racquet-sport shot detection from wrist audio and IMU streams";
  py::register_exception<Error>(m, "Error", PyExc_ValueError);

  py::class_<SampleSeries>(m, "SampleSeries")
      .def(py::init<double, double, std::vector<double>>(), py::arg("rate"), py::arg("start_time"),
           py::arg("values"))
      .def_readwrite("rate", &SampleSeries::rate)
      .def_readwrite("start_time", &SampleSeries::start_time)
      .def_readwrite("values", &SampleSeries::values)
      .def("time_at", &SampleSeries::time_at)
      .def("times", [](const SampleSeries& s) {
        std::vector<double> t(s.size());
        for (std::size_t k = 0; k < t.size(); ++k) t[k] = s.time_at(k);
        return t;
      })
      .def("__len__", &SampleSeries::size)
      .def("__repr__", [](const SampleSeries& s) {
        return "<SampleSeries " + std::to_string(s.size()) + " samples @ " + io::format_number(s.rate) +
               " Hz from " + io::format_number(s.start_time) + " ms>";
      });

  py::class_<ImuRecord>(m, "ImuRecord")
      .def(py::init([](double t, double ax, double ay, double az, double gx, double gy, double gz) {
             return ImuRecord{t, ax, ay, az, gx, gy, gz};
           }),
           py::arg("t"), py::arg("ax") = 0.0, py::arg("ay") = 0.0, py::arg("az") = 0.0,
           py::arg("gx") = 0.0, py::arg("gy") = 0.0, py::arg("gz") = 0.0)
      .def_readwrite("t", &ImuRecord::t)
      .def_readwrite("ax", &ImuRecord::ax)
      .def_readwrite("ay", &ImuRecord::ay)
      .def_readwrite("az", &ImuRecord::az)
      .def_readwrite("gx", &ImuRecord::gx)
      .def_readwrite("gy", &ImuRecord::gy)
      .def_readwrite("gz", &ImuRecord::gz);

  py::class_<ShotEvent>(m, "ShotEvent")
      .def(py::init([](double t, double score) { return ShotEvent{t, score}; }), py::arg("time_ms"),
           py::arg("score") = 1.0)
      .def_readwrite("time_ms", &ShotEvent::time_ms)
      .def_readwrite("score", &ShotEvent::score)
      .def("__repr__", [](const ShotEvent& e) {
        return "<ShotEvent " + io::format_number(e.time_ms) + " ms score " + io::format_number(e.score) + ">";
      });

  py::class_<EvalReport>(m, "EvalReport")
      .def_readonly("precision", &EvalReport::precision)
      .def_readonly("recall", &EvalReport::recall)
      .def_readonly("f_score", &EvalReport::f_score)
      .def_readonly("true_positives", &EvalReport::true_positives)
      .def_readonly("false_positives", &EvalReport::false_positives)
      .def_readonly("false_negatives", &EvalReport::false_negatives)
      .def_readonly("match_tolerance_ms", &EvalReport::match_tolerance_ms);

  py::class_<FilterModel>(m, "FilterModel")
      .def(py::init([](std::vector<double> w, double bias) { return FilterModel{std::move(w), bias}; }),
           py::arg("weights"), py::arg("bias") = 0.0)
      .def_static("identity", &FilterModel::identity, py::arg("taps") = FilterModel::kDefaultTaps)
      .def_readwrite("weights", &FilterModel::weights)
      .def_readwrite("bias", &FilterModel::bias);

  py::class_<ForestModel>(m, "ForestModel")
      .def_property_readonly("tree_count", &ForestModel::tree_count)
      .def_readonly("seed", &ForestModel::seed)
      .def("classify", [](const ForestModel& f, const FeatureVector& x) {
        const auto c = classify(f, x);
        return py::make_tuple(c.shot, c.score);
      });

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_readwrite("batch_size", &TrainConfig::batch_size)
      .def_readwrite("max_epochs", &TrainConfig::max_epochs)
      .def_readwrite("neg_pos_ratio", &TrainConfig::neg_pos_ratio)
      .def_readwrite("init_std", &TrainConfig::init_std)
      .def_readwrite("seed", &TrainConfig::seed);

  py::class_<TrainReport>(m, "TrainReport")
      .def_readonly("epochs_run", &TrainReport::epochs_run)
      .def_readonly("positives", &TrainReport::positives)
      .def_readonly("negatives", &TrainReport::negatives)
      .def_readonly("final_misclassified", &TrainReport::final_misclassified)
      .def_readonly("epoch_loss", &TrainReport::epoch_loss);

  py::class_<FilterTraining>(m, "FilterTraining")
      .def_readonly("model", &FilterTraining::model)
      .def_readonly("report", &FilterTraining::report)
      .def_readonly("validation", &FilterTraining::validation);

  py::class_<OffsetEstimate>(m, "OffsetEstimate")
      .def_readonly("offset_ms", &OffsetEstimate::offset_ms)
      .def_readonly("peak_correlation", &OffsetEstimate::peak_correlation)
      .def_readonly("window_seconds", &OffsetEstimate::window_seconds)
      .def("reliable", &OffsetEstimate::reliable);

  py::class_<QuantizerModel>(m, "QuantizerModel")
      .def_readonly("apf_boundaries", &QuantizerModel::apf_boundaries)
      .def_readonly("ipf_boundaries", &QuantizerModel::ipf_boundaries);

  py::class_<SyncResult>(m, "SyncResult")
      .def_readonly("estimate", &SyncResult::estimate)
      .def_readonly("quantizer", &SyncResult::quantizer)
      .def_readonly("validated", &SyncResult::validated);

  py::class_<ForestTraining>(m, "ForestTraining")
      .def_readonly("forest", &ForestTraining::forest)
      .def_readonly("validation", &ForestTraining::validation)
      .def_readonly("ipf_threshold", &ForestTraining::ipf_threshold)
      .def_readonly("syncs", &ForestTraining::syncs);

  py::class_<SynthConfig>(m, "SynthConfig")
      .def(py::init<>())
      .def_readwrite("duration_s", &SynthConfig::duration_s)
      .def_readwrite("shot_count", &SynthConfig::shot_count)
      .def_readwrite("audio_snr_db", &SynthConfig::audio_snr_db)
      .def_readwrite("imu_noise_g", &SynthConfig::imu_noise_g)
      .def_readwrite("injected_offset_ms", &SynthConfig::injected_offset_ms)
      .def_readwrite("distractor_rate_per_min", &SynthConfig::distractor_rate_per_min)
      .def_readwrite("seed", &SynthConfig::seed);

  py::class_<SynthData>(m, "SynthData")
      .def_readonly("audio", &SynthData::audio)
      .def_readonly("imu", &SynthData::imu)
      .def_property_readonly("labels", [](const SynthData& d) { return d.labels.shots; })
      .def_readonly("audio_distractors", &SynthData::audio_distractors)
      .def_readonly("imu_distractors", &SynthData::imu_distractors);

  py::class_<Recording>(m, "Recording")
      .def_readonly("dir", &Recording::dir)
      .def_readonly("audio", &Recording::audio)
      .def_readonly("imu", &Recording::imu)
      .def_property_readonly("labels", [](const Recording& r) { return r.labels.shots; });

  py::class_<PipelineResult>(m, "PipelineResult")
      .def_readonly("events", &PipelineResult::events)
      .def_readonly("sync", &PipelineResult::sync)
      .def_readonly("report", &PipelineResult::report);

  m.def("synthesize", &synthesize, py::arg("config"));
  m.def("save_recording", &save_recording, py::arg("dir"), py::arg("data"));
  m.def("load_recording", &load_recording, py::arg("dir"));
  m.def("load_recordings", &load_recordings, py::arg("data_dir"));

  m.def("audio_likelihood",
        [](const SampleSeries& x, const FilterModel& f) { return audio_likelihood(x, f, AudioConfig{}); },
        py::arg("audio"), py::arg("filter"));
  m.def("short_time_energy", [](const SampleSeries& x) { return short_time_energy(x, AudioConfig{}); },
        py::arg("audio"));
  m.def("apf", [](const SampleSeries& e) { return apf(e, AudioConfig{}); }, py::arg("energy"));
  m.def("imu_likelihood", &imu_likelihood, py::arg("records"));

  m.def("fit_quantizer", &fit_quantizer, py::arg("apf_peaks"), py::arg("ipf_peaks"));
  m.def("estimate_offset", &estimate_offset, py::arg("apf"), py::arg("ipf"), py::arg("quantizer"),
        py::arg("max_lag_ms") = kDefaultMaxLagMs);
  m.def("self_calibrated_estimate", &self_calibrated_estimate, py::arg("apf"), py::arg("ipf"),
        py::arg("max_lag_ms") = kDefaultMaxLagMs);
  m.def(
      "synchronize",
      [](const SampleSeries& a, const SampleSeries& i, double snippet_seconds, double max_lag_ms) {
        SyncOptions o;
        o.snippet_seconds = snippet_seconds;
        o.max_lag_ms = max_lag_ms;
        return synchronize(a, i, o);
      },
      py::arg("apf"), py::arg("ipf"), py::arg("snippet_seconds") = 20.0,
      py::arg("max_lag_ms") = kDefaultMaxLagMs);

  m.def(
      "train_filter",
      [](const std::vector<Recording>& recordings, const TrainConfig& cfg) {
        return train_filter_on(recordings, cfg);
      },
      py::arg("recordings"), py::arg("config") = TrainConfig{});
  m.def(
      "train_forest",
      [](const std::vector<Recording>& recordings, const FilterModel& filter, std::size_t trees,
         std::uint64_t seed) { return train_forest_on(recordings, filter, trees, seed); },
      py::arg("recordings"), py::arg("filter"), py::arg("trees") = ForestModel::kDefaultTrees,
      py::arg("seed") = 0);

  m.def(
      "detect_shots",
      [](const SampleSeries& audio, const std::vector<ImuRecord>& imu, const FilterModel& filter,
         const ForestModel& forest, double offset_ms) {
        OffsetEstimate o;
        o.offset_ms = offset_ms;
        return detect_shots(audio, imu, filter, forest, o);
      },
      py::arg("audio"), py::arg("imu"), py::arg("filter"), py::arg("forest"), py::arg("offset_ms"));
  m.def(
      "detect_audio_only",
      [](const SampleSeries& audio, const FilterModel& f) { return detect_audio_only(audio, f); },
      py::arg("audio"), py::arg("filter"));
  m.def(
      "evaluate",
      [](const std::vector<ShotEvent>& events, const std::vector<double>& labels, double tolerance) {
        return evaluate(events, labels_from(labels), tolerance);
      },
      py::arg("events"), py::arg("labels"), py::arg("tolerance_ms") = kMatchToleranceMs);

  m.def(
      "run_pipeline",
      [](const fs::path& audio, const fs::path& filter, std::optional<fs::path> imu,
         std::optional<fs::path> forest, std::optional<fs::path> labels, const fs::path& out_dir,
         bool audio_only) {
        PipelineOptions o;
        o.audio = audio;
        o.filter = filter;
        o.imu = std::move(imu);
        o.forest = std::move(forest);
        o.labels = std::move(labels);
        o.out_dir = out_dir;
        o.audio_only = audio_only;
        return run_pipeline(o);
      },
      py::arg("audio"), py::arg("filter"), py::arg("imu") = std::nullopt,
      py::arg("forest") = std::nullopt, py::arg("labels") = std::nullopt, py::arg("out_dir") = ".",
      py::arg("audio_only") = false);

  m.def("read_wav", &io::read_wav, py::arg("path"), py::arg("start_time_ms") = 0.0);
  m.def("write_wav", &io::write_wav, py::arg("path"), py::arg("audio"));
  m.def("read_imu_csv", &io::read_imu_csv, py::arg("path"));
  m.def("write_imu_csv", &io::write_imu_csv, py::arg("path"), py::arg("records"));
  m.def("read_labels", [](const fs::path& p) { return io::read_labels(p).shots; }, py::arg("path"));
  m.def(
      "write_labels",
      [](const fs::path& p, const std::vector<double>& shots) { io::write_labels(p, labels_from(shots)); },
      py::arg("path"), py::arg("labels"));
  m.def("read_events", &io::read_events, py::arg("path"));
  m.def("write_events", &io::write_events, py::arg("path"), py::arg("events"));
  m.def("load_filter", &io::load_filter, py::arg("path"));
  m.def("load_forest", &io::load_forest, py::arg("path"));
  m.def(
      "save_filter",
      [](const fs::path& p, const FilterModel& f) { io::write_json(p, io::to_json(f)); },
      py::arg("path"), py::arg("filter"));
  m.def(
      "save_forest",
      [](const fs::path& p, const ForestModel& f) { io::write_json(p, io::to_json(f)); },
      py::arg("path"), py::arg("forest"));
}

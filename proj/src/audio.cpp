#include "shotfusion/audio.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <random>

namespace shotfusion {

std::size_t AudioConfig::microframe_samples() const {
  const double n = sample_rate * microframe_ms / 1000.0;
  if (!(n >= 1.0) || std::abs(n - std::round(n)) > 1e-9) throw Error("invalid microframe");
  if (macroframe_half < 1) throw Error("invalid macroframe");
  return static_cast<std::size_t>(std::round(n));
}

FilterModel FilterModel::identity(std::size_t taps) {
  FilterModel m;
  m.weights.assign(taps, 0.0);
  m.weights.at(0) = 1.0;
  return m;
}

SampleSeries short_time_energy(const SampleSeries& x, const AudioConfig& cfg) {
  const std::size_t frame = cfg.microframe_samples();
  if (x.size() < frame) throw Error("insufficient samples");
  const std::size_t frames = x.size() / frame;
  std::vector<double> energy(frames, 0.0);
  for (std::size_t i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (std::size_t k = i * frame; k < (i + 1) * frame; ++k) acc += x.values[k] * x.values[k];
    energy[i] = acc;
  }
  return SampleSeries(cfg.frame_rate(), x.start_time + cfg.microframe_ms / 2.0,
                      std::move(energy));
}

SampleSeries apf(const SampleSeries& energy, const AudioConfig& cfg) {
  const std::size_t half = cfg.macroframe_half;
  const std::size_t width = cfg.macroframe_size();
  if (energy.size() < width) throw Error("insufficient context");
  const std::size_t count = energy.size() - 2 * half;
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    double window = 0.0;
    for (std::size_t j = i; j < i + width; ++j) window += energy.values[j];
    out[i] = energy.values[i + half] - window / static_cast<double>(width);
  }
  return SampleSeries(energy.rate, energy.time_at(half), std::move(out));
}

SampleSeries audio_likelihood(const SampleSeries& x, const FilterModel& model,
                              const AudioConfig& cfg) {
  const auto filtered = fir_convolve(x, FirKernel(model.weights));
  return apf(short_time_energy(filtered, cfg), cfg);
}

std::vector<ShotEvent> threshold_likelihood(const SampleSeries& likelihood, double bias) {
  std::vector<ShotEvent> events;
  for (std::size_t i = 0; i < likelihood.size(); ++i) {
    const double score = likelihood.values[i] + bias;
    if (score > 0.0) events.push_back({likelihood.time_at(i), score});
  }
  return events;
}

std::vector<ShotEvent> detect_audio(const SampleSeries& x, const FilterModel& model,
                                    const AudioConfig& cfg) {
  return threshold_likelihood(audio_likelihood(x, model, cfg), model.bias);
}

std::size_t min_window_samples(const AudioConfig& cfg, std::size_t taps) {
  return cfg.macroframe_size() * cfg.microframe_samples() + (taps - 1);
}

namespace {

struct WindowGeometry {
  std::size_t frame;       // samples per microframe
  std::size_t first;       // first sample of the macroframe
  std::size_t centre;      // index of the centre frame relative to `first`
  std::size_t width;       // frames in the macroframe
};

WindowGeometry geometry(const LabeledAudioWindow& window, std::size_t taps,
                        const AudioConfig& cfg) {
  const std::size_t frame = cfg.microframe_samples();
  if (taps == 0) throw Error("empty kernel");
  if (window.samples.size() < min_window_samples(cfg, taps)) throw Error("window too short");
  const std::size_t frames = (window.samples.size() - (taps - 1)) / frame;
  const std::size_t centre = frames / 2;
  const std::size_t half = cfg.macroframe_half;
  return {frame, (taps - 1) + (centre - half) * frame, half, cfg.macroframe_size()};
}

template <bool kWithGradient>
WindowLoss evaluate(const LabeledAudioWindow& window, const FilterModel& model,
                    const AudioConfig& cfg) {
  const auto& w = model.weights;
  const auto& x = window.samples;
  const std::size_t taps = w.size();
  const WindowGeometry g = geometry(window, taps, cfg);
  const double mean_coef = 1.0 / static_cast<double>(g.width);

  WindowLoss out;
  if constexpr (kWithGradient) out.grad_weights.assign(taps, 0.0);
  // d(APF)/dw accumulated alongside the APF value itself.
  std::vector<double> grad(kWithGradient ? taps : 0, 0.0);
  double value = 0.0;
  for (std::size_t j = 0; j < g.width; ++j) {
    const double coef = (j == g.centre ? 1.0 : 0.0) - mean_coef;
    const std::size_t begin = g.first + j * g.frame;
    for (std::size_t k = begin; k < begin + g.frame; ++k) {
      const std::size_t reach = std::min(taps, k + 1);
      double s = 0.0;
      for (std::size_t t = 0; t < reach; ++t) s += w[t] * x[k - t];
      value += coef * s * s;
      if constexpr (kWithGradient) {
        const double scale = 2.0 * coef * s;
        for (std::size_t t = 0; t < reach; ++t) grad[t] += scale * x[k - t];
      }
    }
  }
  out.score = value + model.bias;
  const bool predicted = out.score > 0.0;
  out.misclassified = predicted != window.shot;
  if (out.misclassified) {
    // Shot missed: loss = -(APF + bias). False alarm: loss = APF + bias.
    const double sign = window.shot ? -1.0 : 1.0;
    out.loss = sign * out.score;
    if constexpr (kWithGradient) {
      for (std::size_t t = 0; t < taps; ++t) out.grad_weights[t] = sign * grad[t];
      out.grad_bias = sign;
    }
  }
  return out;
}

class Adam {
 public:
  Adam(std::size_t n, const TrainConfig& cfg) : cfg_(cfg), m_(n, 0.0), v_(n, 0.0) {}

  void step(std::vector<double>& params, const std::vector<double>& grad) {
    ++t_;
    const double b1t = 1.0 - std::pow(cfg_.adam_beta1, static_cast<double>(t_));
    const double b2t = 1.0 - std::pow(cfg_.adam_beta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i] = cfg_.adam_beta1 * m_[i] + (1.0 - cfg_.adam_beta1) * grad[i];
      v_[i] = cfg_.adam_beta2 * v_[i] + (1.0 - cfg_.adam_beta2) * grad[i] * grad[i];
      const double m_hat = m_[i] / b1t;
      const double v_hat = v_[i] / b2t;
      params[i] -= cfg_.learning_rate * m_hat / (std::sqrt(v_hat) + cfg_.adam_epsilon);
    }
  }

 private:
  const TrainConfig& cfg_;
  std::vector<double> m_, v_;
  std::size_t t_ = 0;
};

void validate(const TrainConfig& cfg) {
  if (!(cfg.learning_rate > 0.0) || cfg.batch_size == 0 || !(cfg.adam_beta1 > 0.0) ||
      !(cfg.adam_beta2 > 0.0) || !(cfg.adam_epsilon > 0.0) || !(cfg.init_std > 0.0) ||
      !(cfg.neg_pos_ratio >= 1.0) || cfg.taps == 0 || cfg.adam_beta1 >= 1.0 ||
      cfg.adam_beta2 >= 1.0) {
    throw Error("invalid training config");
  }
}

}  // namespace

WindowLoss window_loss(const LabeledAudioWindow& window, const FilterModel& model,
                       const AudioConfig& cfg) {
  return evaluate<true>(window, model, cfg);
}

double window_score(const LabeledAudioWindow& window, const FilterModel& model,
                    const AudioConfig& cfg) {
  return evaluate<false>(window, model, cfg).score;
}

FilterModel train_filter(const std::vector<LabeledAudioWindow>& data, const TrainConfig& cfg,
                         const AudioConfig& audio_cfg, TrainReport* report) {
  validate(cfg);
  std::vector<std::size_t> positives, negatives;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i].samples.size() < min_window_samples(audio_cfg, cfg.taps)) {
      throw Error("window too short");
    }
    (data[i].shot ? positives : negatives).push_back(i);
  }
  if (positives.empty() || negatives.empty()) throw Error("degenerate training set");

  std::mt19937_64 rng(cfg.seed);
  FilterModel model;
  model.weights.resize(cfg.taps);
  std::normal_distribution<double> init(0.0, cfg.init_std);
  for (double& w : model.weights) w = init(rng);
  model.bias = 0.0;

  // Subsample the non-shot pool without replacement.
  const auto wanted = static_cast<std::size_t>(
      std::floor(cfg.neg_pos_ratio * static_cast<double>(positives.size())));
  if (negatives.size() > wanted) {
    std::shuffle(negatives.begin(), negatives.end(), rng);
    negatives.resize(std::max<std::size_t>(wanted, 1));
    std::sort(negatives.begin(), negatives.end());
  }
  std::vector<std::size_t> order = positives;
  order.insert(order.end(), negatives.begin(), negatives.end());

  TrainReport local;
  local.positives = positives.size();
  local.negatives = negatives.size();

  // Parameters packed as [weights..., bias] for the optimizer.
  std::vector<double> params(model.weights);
  params.push_back(model.bias);
  Adam adam(params.size(), cfg);
  std::vector<double> grad(params.size());

  for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    std::size_t epoch_errors = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), begin + cfg.batch_size);
      std::fill(grad.begin(), grad.end(), 0.0);
      std::size_t errors = 0;
      double batch_loss = 0.0;
      for (std::size_t b = begin; b < end; ++b) {
        const WindowLoss wl = window_loss(data[order[b]], model, audio_cfg);
        assert(wl.loss >= 0.0);
        if (wl.loss < 0.0) throw Error("negative loss");
        if (!wl.misclassified) continue;
        ++errors;
        batch_loss += wl.loss;
        for (std::size_t t = 0; t < cfg.taps; ++t) grad[t] += wl.grad_weights[t];
        grad.back() += wl.grad_bias;
      }
      epoch_loss += batch_loss;
      epoch_errors += errors;
      // A batch with no misclassification has zero gradient; the optimizer is
      // not stepped so that momentum cannot undo a correct solution.
      if (errors == 0) continue;
      const double scale = 1.0 / static_cast<double>(end - begin);
      for (double& g : grad) g *= scale;
      adam.step(params, grad);
      std::copy(params.begin(), params.end() - 1, model.weights.begin());
      model.bias = params.back();
    }
    local.epoch_loss.push_back(epoch_loss);
    local.epochs_run = epoch + 1;
    if (epoch_errors == 0) break;
  }

  for (std::size_t idx : order) {
    const WindowLoss wl = window_loss(data[idx], model, audio_cfg);
    if (wl.misclassified) ++local.final_misclassified;
    local.final_epoch_loss += wl.loss;
  }
  if (report) *report = std::move(local);
  return model;
}

}  // namespace shotfusion

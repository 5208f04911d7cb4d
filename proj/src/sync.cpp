#include "shotfusion/sync.hpp"

#include <algorithm>
#include <cmath>

#include "shotfusion/fusion.hpp"

namespace shotfusion {

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw Error("empty distribution");
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

namespace {

constexpr double kOutlierMads = 5.0;

Boundaries quintiles(const std::vector<double>& values) {
  if (values.size() < 5) throw Error("insufficient calibration data");
  Boundaries b{};
  for (std::size_t k = 0; k < 4; ++k) b[k] = percentile(values, 0.2 * static_cast<double>(k + 1));
  for (std::size_t k = 1; k < 4; ++k) {
    if (!(b[k] > b[k - 1])) throw Error("degenerate distribution");
  }
  return b;
}

std::vector<double> upper_decile(const SampleSeries& x) {
  const double cut = percentile(x.values, 0.9);
  std::vector<double> out;
  for (double v : x.values) {
    if (v >= cut) out.push_back(v);
  }
  return out;
}

// Robust outlier level: median + k * scaled MAD.
double outlier_cut(const std::vector<double>& values) {
  const double median = percentile(values, 0.5);
  std::vector<double> dev(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) dev[i] = std::abs(values[i] - median);
  return median + kOutlierMads * 1.4826 * percentile(std::move(dev), 0.5);
}

SampleSeries prepare(const SampleSeries& x, const Boundaries& b) {
  return triangle_smooth(quantize(x, b));
}

SampleSeries leading(const SampleSeries& x, double seconds) {
  return x.slice(x.start_time, x.start_time + 1000.0 * seconds);
}

SampleSeries following(const SampleSeries& x, double skip_seconds, double seconds) {
  const double from = x.start_time + 1000.0 * skip_seconds;
  return x.slice(from, from + 1000.0 * seconds);
}

}  // namespace

QuantizerModel fit_quantizer(const std::vector<double>& apf_peak_values,
                             const std::vector<double>& ipf_peak_values) {
  return {quintiles(apf_peak_values), quintiles(ipf_peak_values)};
}

QuantizerModel self_calibrate_quantizer(const SampleSeries& apf, const SampleSeries& ipf) {
  if (apf.empty() || ipf.empty()) throw Error("insufficient calibration data");
  return fit_quantizer(upper_decile(apf), upper_decile(ipf));
}

std::optional<QuantizerModel> refine_quantizer(const SampleSeries& apf, const SampleSeries& ipf,
                                               double offset_ms) {
  if (apf.empty() || ipf.empty()) return std::nullopt;
  const double apf_cut = outlier_cut(apf.values);
  const double ipf_cut = outlier_cut(ipf.values);
  std::vector<double> apf_peaks, ipf_peaks;
  for (double t : select_candidates(ipf)) {
    const auto k = static_cast<std::size_t>(std::llround((t - ipf.start_time) / ipf.period_ms()));
    const double ipf_value = ipf.values[k];
    if (!(ipf_value > ipf_cut)) continue;
    const auto window = apf.slice(t - offset_ms - kValidationToleranceMs,
                                  t - offset_ms + kValidationToleranceMs + 1e-3);
    if (window.empty()) continue;
    const double apf_value = *std::max_element(window.values.begin(), window.values.end());
    if (!(apf_value > apf_cut)) continue;
    apf_peaks.push_back(apf_value);
    ipf_peaks.push_back(ipf_value);
  }
  if (apf_peaks.size() < 5) return std::nullopt;
  try {
    return fit_quantizer(apf_peaks, ipf_peaks);
  } catch (const Error&) {
    return std::nullopt;
  }
}

SyncResult self_calibrated_estimate(const SampleSeries& apf, const SampleSeries& ipf,
                                    double max_lag_ms) {
  SyncResult out;
  out.quantizer = self_calibrate_quantizer(apf, ipf);
  out.estimate = estimate_offset(apf, ipf, out.quantizer, max_lag_ms);
  if (auto refined = refine_quantizer(apf, ipf, out.estimate.offset_ms)) {
    // Pseudo-shots were picked at the coarse lag; a jump elsewhere means the
    // sparser levels locked onto a rhythm alias.
    const auto polished = estimate_offset(apf, ipf, *refined, max_lag_ms);
    if (std::abs(polished.offset_ms - out.estimate.offset_ms) <= kValidationToleranceMs) {
      out.quantizer = *refined;
      out.estimate = polished;
    }
  }
  return out;
}

int quantize_level(double value, const Boundaries& b) {
  int level = 0;
  for (double boundary : b) {
    if (value > boundary) ++level;
  }
  return level;
}

SampleSeries quantize(const SampleSeries& x, const Boundaries& b) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = quantize_level(x.values[i], b);
  return SampleSeries(x.rate, x.start_time, std::move(out));
}

OffsetEstimate estimate_offset(const SampleSeries& apf, const SampleSeries& ipf,
                               const QuantizerModel& q, double max_lag_ms) {
  if (apf.rate != ipf.rate) throw Error("rate mismatch");
  const auto min_overlap = static_cast<long>(std::ceil(kMinSnippetSeconds * apf.rate - 1e-9));
  const long na = static_cast<long>(apf.size());
  const long nb = static_cast<long>(ipf.size());
  if (std::min(na, nb) < min_overlap) throw Error("snippet too short");

  // Pairing apf[n] with ipf[n + lag] implies offset = base + lag * period.
  const double period = apf.period_ms();
  const double base = ipf.start_time - apf.start_time;
  long lo = static_cast<long>(std::ceil((-max_lag_ms - base) / period - 1e-9));
  long hi = static_cast<long>(std::floor((max_lag_ms - base) / period + 1e-9));
  lo = std::max(lo, min_overlap - na);
  hi = std::min(hi, nb - min_overlap);
  if (lo > hi) throw Error("snippet too short");

  const auto corr = cross_correlate_range(prepare(apf, q.apf_boundaries),
                                          prepare(ipf, q.ipf_boundaries), lo, hi);
  OffsetEstimate best;
  bool have = false;
  for (const auto& [lag, r] : corr) {
    const double offset = base + period * static_cast<double>(lag);
    if (!have || r > best.peak_correlation ||
        (r == best.peak_correlation && std::abs(offset) < std::abs(best.offset_ms))) {
      best.offset_ms = offset;
      best.peak_correlation = r;
      have = true;
    }
  }
  best.window_seconds = static_cast<double>(std::min(na, nb)) / apf.rate;
  return best;
}

bool validate_offset(const SampleSeries& apf, const SampleSeries& ipf, const QuantizerModel& q,
                     const OffsetEstimate& candidate, double validation_seconds,
                     double max_lag_ms) {
  const double needed = (candidate.window_seconds + validation_seconds) * apf.rate;
  if (!(validation_seconds > 0.0) || static_cast<double>(apf.size()) + 1e-9 < needed ||
      static_cast<double>(ipf.size()) + 1e-9 < needed) {
    throw Error("validation window unavailable");
  }
  const auto fresh = estimate_offset(following(apf, candidate.window_seconds, validation_seconds),
                                     following(ipf, candidate.window_seconds, validation_seconds),
                                     q, max_lag_ms);
  return std::abs(fresh.offset_ms - candidate.offset_ms) <= kValidationToleranceMs &&
         fresh.peak_correlation >= kMinReliableCorrelation;
}

SyncResult synchronize(const SampleSeries& apf, const SampleSeries& ipf,
                       const SyncOptions& options) {
  auto estimate = [&](const SampleSeries& a, const SampleSeries& b) {
    if (!options.quantizer) return self_calibrated_estimate(a, b, options.max_lag_ms);
    return SyncResult{estimate_offset(a, b, *options.quantizer, options.max_lag_ms),
                      *options.quantizer, false};
  };
  const double available = static_cast<double>(std::min(apf.size(), ipf.size())) / apf.rate;
  for (double snippet = std::max(options.snippet_seconds, kMinSnippetSeconds);
       2.0 * snippet <= available + 1e-9; snippet *= 2.0) {
    try {
      SyncResult r = estimate(leading(apf, snippet), leading(ipf, snippet));
      if (r.estimate.reliable() &&
          validate_offset(apf, ipf, r.quantizer, r.estimate, snippet, options.max_lag_ms)) {
        r.validated = true;
        return r;
      }
    } catch (const Error&) {
      // Featureless snippet; try a longer one.
    }
  }
  return estimate(apf, ipf);
}

}  // namespace shotfusion

#pragma once

#include <array>
#include <optional>
#include <vector>

#include "shotfusion/signal.hpp"

namespace shotfusion {

inline constexpr double kDefaultMaxLagMs = 2000.0;
inline constexpr double kMinSnippetSeconds = 5.0;
inline constexpr double kValidationToleranceMs = 50.0;
inline constexpr double kMinReliableCorrelation = 0.4;

using Boundaries = std::array<double, 4>;

/// Quintile boundaries for the two likelihood streams.
struct QuantizerModel {
  Boundaries apf_boundaries{};
  Boundaries ipf_boundaries{};
};

struct OffsetEstimate {
  double offset_ms = 0.0;  // IMU clock minus audio clock for the same instant
  double peak_correlation = 0.0;
  double window_seconds = 0.0;

  bool reliable() const { return peak_correlation >= kMinReliableCorrelation; }
};

/// p-th percentile (p in [0,1]) by linear interpolation between order
/// statistics at position p*(n-1).
double percentile(std::vector<double> values, double p);

/// 20/40/60/80 percentiles of each shot-conditional peak distribution.
QuantizerModel fit_quantizer(const std::vector<double>& apf_peak_values,
                             const std::vector<double>& ipf_peak_values);

/// Fits the quantizer on the upper decile of each live series.
QuantizerModel self_calibrate_quantizer(const SampleSeries& apf, const SampleSeries& ipf);

/// Re-fits the quantizer on pseudo-shots: IPF candidate peaks that are
/// robust outliers (median + 5 MAD) and whose aligned APF maximum within the
/// validation tolerance is an outlier too. Empty when fewer than five exist.
std::optional<QuantizerModel> refine_quantizer(const SampleSeries& apf, const SampleSeries& ipf,
                                               double offset_ms);

/// Level k in {0..4}: value in (b[k-1], b[k]] with open outer intervals.
int quantize_level(double value, const Boundaries& b);
SampleSeries quantize(const SampleSeries& x, const Boundaries& b);

/// Quantize -> triangle smooth -> cross-correlate; offsets are searched over
/// |offset| <= max_lag_ms with at least five seconds of overlap per lag.
/// Equal maxima resolve to the smallest |offset|.
OffsetEstimate estimate_offset(const SampleSeries& apf, const SampleSeries& ipf,
                               const QuantizerModel& q,
                               double max_lag_ms = kDefaultMaxLagMs);

/// Re-estimates on the validation_seconds that follow the candidate's
/// snippet (which is taken to start at each series' first sample).
bool validate_offset(const SampleSeries& apf, const SampleSeries& ipf,
                     const QuantizerModel& q, const OffsetEstimate& candidate,
                     double validation_seconds, double max_lag_ms = kDefaultMaxLagMs);

struct SyncOptions {
  double snippet_seconds = 20.0;
  double max_lag_ms = kDefaultMaxLagMs;
  std::optional<QuantizerModel> quantizer;  // self-calibrated when empty
};

struct SyncResult {
  OffsetEstimate estimate;
  QuantizerModel quantizer;
  bool validated = false;
};

/// Self-calibration: upper-decile quantizer, coarse estimate, then one
/// refinement pass when enough pseudo-shots are found. The refined estimate
/// is kept only if it stays within the validation tolerance of the coarse one.
SyncResult self_calibrated_estimate(const SampleSeries& apf, const SampleSeries& ipf,
                                    double max_lag_ms = kDefaultMaxLagMs);

/// Estimates on a leading snippet and validates on the next window of the
/// same length, doubling the snippet until validation succeeds. Falls back
/// to an unvalidated estimate over the whole streams.
SyncResult synchronize(const SampleSeries& apf, const SampleSeries& ipf,
                       const SyncOptions& options = {});

}  // namespace shotfusion

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace shotfusion {

/// Error raised by every library operation on contract violations.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Uniformly sampled scalar series. Timestamps are milliseconds on the
/// clock of the stream the series was derived from.
struct SampleSeries {
  double rate = 1.0;        // Hz
  double start_time = 0.0;  // ms
  std::vector<double> values;

  SampleSeries() = default;
  SampleSeries(double rate_hz, double start_ms, std::vector<double> v);

  std::size_t size() const { return values.size(); }
  bool empty() const { return values.empty(); }
  double period_ms() const { return 1000.0 / rate; }
  double time_at(std::size_t k) const {
    return start_time + 1000.0 * static_cast<double>(k) / rate;
  }
  /// One period past the last sample.
  double end_time() const { return time_at(values.size()); }

  /// Samples whose timestamps fall in [from_ms, to_ms).
  SampleSeries slice(double from_ms, double to_ms) const;
  /// Same samples, timestamps moved by delta_ms.
  SampleSeries shifted(double delta_ms) const;
};

class FirKernel {
 public:
  explicit FirKernel(std::vector<double> taps);

  const std::vector<double>& taps() const { return taps_; }
  std::size_t size() const { return taps_.size(); }

 private:
  std::vector<double> taps_;
};

/// Direct-form IIR coefficients; feedback[0] is always 1.
struct IirCoefficients {
  std::vector<double> feedforward;
  std::vector<double> feedback;

  /// Normalizes both polynomials by feedback[0].
  static IirCoefficients make(std::vector<double> b, std::vector<double> a);
  /// True iff every pole lies strictly inside the unit circle.
  bool stable() const;
  /// Group delay at DC in samples: sum(k*b_k)/sum(b_k) - sum(k*a_k)/sum(a_k).
  double dc_group_delay() const;
};

/// Causal convolution with "same" output length: out[k] = sum_t w[t]*x[k-t].
SampleSeries fir_convolve(const SampleSeries& x, const FirKernel& w);

/// Second-order Butterworth low-pass via the prewarped bilinear transform.
IirCoefficients design_lowpass(double cutoff_hz, double rate_hz);

/// Zero-initial-state direct-form recursion.
SampleSeries iir_filter(const SampleSeries& x, const IirCoefficients& c);

/// Centered convolution with (1,2,3,4,3,2,1)/16, zero padded.
SampleSeries triangle_smooth(const SampleSeries& x);

struct LagCorrelation {
  long lag;
  double correlation;
};

/// Normalized correlation of a[n] against b[n + lag] over the overlap, for
/// every lag in [-max_lag, max_lag], ascending. Each overlap is mean-removed
/// and norm-scaled; a zero-variance overlap yields 0.
std::vector<LagCorrelation> cross_correlate(const SampleSeries& a,
                                            const SampleSeries& b,
                                            long max_lag);

/// Same as cross_correlate over an arbitrary lag range [min_lag, max_lag].
/// Every lag in the range must leave an overlap of at least two samples.
std::vector<LagCorrelation> cross_correlate_range(const SampleSeries& a,
                                                  const SampleSeries& b,
                                                  long min_lag, long max_lag);

}  // namespace shotfusion

#include "shotfusion/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace shotfusion {

namespace {

void require_finite(const std::vector<double>& v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw Error(std::string("non-finite ") + what);
  }
}

}  // namespace

SampleSeries::SampleSeries(double rate_hz, double start_ms, std::vector<double> v)
    : rate(rate_hz), start_time(start_ms), values(std::move(v)) {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw Error("invalid rate");
}

SampleSeries SampleSeries::slice(double from_ms, double to_ms) const {
  // Tolerance absorbs rounding in the timestamp arithmetic.
  const double eps = 1e-6 * period_ms();
  std::size_t first = 0;
  while (first < values.size() && time_at(first) < from_ms - eps) ++first;
  std::size_t last = first;
  while (last < values.size() && time_at(last) < to_ms - eps) ++last;
  return SampleSeries(rate, first < values.size() ? time_at(first) : std::max(from_ms, start_time),
                      std::vector<double>(values.begin() + first, values.begin() + last));
}

SampleSeries SampleSeries::shifted(double delta_ms) const {
  SampleSeries out = *this;
  out.start_time += delta_ms;
  return out;
}

FirKernel::FirKernel(std::vector<double> taps) : taps_(std::move(taps)) {
  if (taps_.empty()) throw Error("empty kernel");
  require_finite(taps_, "kernel tap");
}

IirCoefficients IirCoefficients::make(std::vector<double> b, std::vector<double> a) {
  if (a.empty() || b.empty() || a.front() == 0.0) throw Error("invalid coefficients");
  require_finite(a, "coefficient");
  require_finite(b, "coefficient");
  const double a0 = a.front();
  for (double& v : a) v /= a0;
  for (double& v : b) v /= a0;
  return IirCoefficients{std::move(b), std::move(a)};
}

bool IirCoefficients::stable() const {
  if (feedback.empty() || feedback.front() == 0.0) return false;
  // Schur-Cohn step-down: every reflection coefficient must satisfy |k| < 1.
  std::vector<double> a(feedback.begin(), feedback.end());
  for (double& v : a) v /= feedback.front();
  for (std::size_t m = a.size() - 1; m >= 1; --m) {
    const double k = a[m];
    if (!std::isfinite(k) || std::abs(k) >= 1.0) return false;
    const double denom = 1.0 - k * k;
    std::vector<double> next(m);
    next[0] = 1.0;
    for (std::size_t i = 1; i < m; ++i) next[i] = (a[i] - k * a[m - i]) / denom;
    a = std::move(next);
  }
  return true;
}

SampleSeries fir_convolve(const SampleSeries& x, const FirKernel& w) {
  if (x.empty()) throw Error("empty signal");
  const auto& taps = w.taps();
  const std::size_t n = x.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t reach = std::min(taps.size(), k + 1);
    double acc = 0.0;
    for (std::size_t t = 0; t < reach; ++t) acc += taps[t] * x.values[k - t];
    out[k] = acc;
  }
  return SampleSeries(x.rate, x.start_time, std::move(out));
}

double IirCoefficients::dc_group_delay() const {
  auto centroid = [](const std::vector<double>& p) {
    double moment = 0.0, sum = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      moment += static_cast<double>(k) * p[k];
      sum += p[k];
    }
    if (sum == 0.0) throw Error("no DC response");
    return moment / sum;
  };
  return centroid(feedforward) - centroid(feedback);
}

IirCoefficients design_lowpass(double cutoff_hz, double rate_hz) {
  if (!(rate_hz > 0.0) || !(cutoff_hz > 0.0) || !(cutoff_hz < rate_hz / 2.0)) {
    throw Error("invalid cutoff");
  }
  const double k = std::tan(std::numbers::pi * cutoff_hz / rate_hz);
  const double k2 = k * k;
  const double norm = 1.0 / (1.0 + std::numbers::sqrt2 * k + k2);
  const double b0 = k2 * norm;
  return IirCoefficients::make({b0, 2.0 * b0, b0},
                               {1.0, 2.0 * (k2 - 1.0) * norm,
                                (1.0 - std::numbers::sqrt2 * k + k2) * norm});
}

SampleSeries iir_filter(const SampleSeries& x, const IirCoefficients& c) {
  if (x.empty()) throw Error("empty signal");
  if (!c.stable()) throw Error("unstable filter");
  const auto& b = c.feedforward;
  const auto& a = c.feedback;
  const std::size_t n = x.size();
  std::vector<double> y(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < b.size() && i <= k; ++i) acc += b[i] * x.values[k - i];
    for (std::size_t i = 1; i < a.size() && i <= k; ++i) acc -= a[i] * y[k - i];
    y[k] = acc;
  }
  return SampleSeries(x.rate, x.start_time, std::move(y));
}

SampleSeries triangle_smooth(const SampleSeries& x) {
  if (x.empty()) throw Error("empty signal");
  static constexpr double kKernel[7] = {1, 2, 3, 4, 3, 2, 1};
  const long n = static_cast<long>(x.size());
  std::vector<double> out(x.size(), 0.0);
  for (long k = 0; k < n; ++k) {
    double acc = 0.0;
    for (long d = -3; d <= 3; ++d) {
      const long j = k + d;
      if (j >= 0 && j < n) acc += kKernel[d + 3] * x.values[j];
    }
    out[k] = acc / 16.0;
  }
  return SampleSeries(x.rate, x.start_time, std::move(out));
}

std::vector<LagCorrelation> cross_correlate_range(const SampleSeries& a,
                                                  const SampleSeries& b,
                                                  long min_lag, long max_lag) {
  if (a.empty() || b.empty()) throw Error("empty signal");
  if (a.rate != b.rate) throw Error("rate mismatch");
  const long na = static_cast<long>(a.size());
  const long nb = static_cast<long>(b.size());
  if (min_lag > max_lag || max_lag > nb - 2 || min_lag < -(na - 2)) {
    throw Error("lag out of range");
  }
  std::vector<LagCorrelation> out;
  out.reserve(static_cast<std::size_t>(max_lag - min_lag + 1));
  for (long lag = min_lag; lag <= max_lag; ++lag) {
    const long lo = std::max(0L, -lag);
    const long hi = std::min(na, nb - lag);
    const double count = static_cast<double>(hi - lo);
    double mean_a = 0.0, mean_b = 0.0;
    for (long n = lo; n < hi; ++n) {
      mean_a += a.values[n];
      mean_b += b.values[n + lag];
    }
    mean_a /= count;
    mean_b /= count;
    double cross = 0.0, ssa = 0.0, ssb = 0.0;
    for (long n = lo; n < hi; ++n) {
      const double da = a.values[n] - mean_a;
      const double db = b.values[n + lag] - mean_b;
      cross += da * db;
      ssa += da * da;
      ssb += db * db;
    }
    const double denom = std::sqrt(ssa * ssb);
    const double r = denom > 0.0 ? std::clamp(cross / denom, -1.0, 1.0) : 0.0;
    out.push_back({lag, r});
  }
  return out;
}

std::vector<LagCorrelation> cross_correlate(const SampleSeries& a, const SampleSeries& b,
                                            long max_lag) {
  if (a.empty() || b.empty()) throw Error("empty signal");
  if (a.rate != b.rate) throw Error("rate mismatch");
  const long shortest = static_cast<long>(std::min(a.size(), b.size()));
  if (max_lag < 0 || max_lag >= shortest) throw Error("lag out of range");
  if (shortest < 2) {
    return {{0, 0.0}};
  }
  // max_lag < min length still guarantees one overlapping sample; widen the
  // two-sample guard of the range variant by handling the extremes as 0.
  const long safe = std::min(max_lag, shortest - 2);
  auto inner = cross_correlate_range(a, b, -safe, safe);
  std::vector<LagCorrelation> out;
  out.reserve(static_cast<std::size_t>(2 * max_lag + 1));
  for (long lag = -max_lag; lag < -safe; ++lag) out.push_back({lag, 0.0});
  out.insert(out.end(), inner.begin(), inner.end());
  for (long lag = safe + 1; lag <= max_lag; ++lag) out.push_back({lag, 0.0});
  return out;
}

}  // namespace shotfusion

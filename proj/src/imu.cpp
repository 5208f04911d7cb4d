#include "shotfusion/imu.hpp"

#include <cmath>
#include <string>

namespace shotfusion {

namespace {

constexpr double kPeriodMs = 1000.0 / kImuRateHz;
constexpr double kMinGapMs = 5.0;
constexpr double kMaxGapMs = 2.0 * kPeriodMs;
constexpr std::size_t kPast = 4;
constexpr std::size_t kFuture = 5;
constexpr std::size_t kWindow = kPast + kFuture + 1;

}  // namespace

void check_range(const ImuRecord& r) {
  for (double a : {r.ax, r.ay, r.az}) {
    if (!std::isfinite(a) || std::abs(a) > kAccelRangeG) throw Error("acceleration out of range");
  }
  for (double g : {r.gx, r.gy, r.gz}) {
    if (!std::isfinite(g) || std::abs(g) > kGyroRangeDps) {
      throw Error("angular velocity out of range");
    }
  }
}

ImuComponents decompose(const std::vector<ImuRecord>& records) {
  if (records.empty()) throw Error("empty stream");
  for (std::size_t i = 1; i < records.size(); ++i) {
    const double gap = records[i].t - records[i - 1].t;
    if (!(gap > 0.0)) throw Error("unordered stream");
    if (gap > kMaxGapMs) throw Error("stream gap");
    if (gap < kMinGapMs) throw Error("stream jitter");
  }
  const double t0 = records.front().t;
  const auto count =
      static_cast<std::size_t>(std::llround((records.back().t - t0) / kPeriodMs)) + 1;

  std::vector<double> a_rad(count), a_tan(count), w_rad(count), w_tan(count);
  std::size_t src = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const double t = t0 + kPeriodMs * static_cast<double>(k);
    while (src + 1 < records.size() &&
           std::abs(records[src + 1].t - t) <= std::abs(records[src].t - t)) {
      ++src;
    }
    const ImuRecord& r = records[src];
    a_rad[k] = r.ax;
    a_tan[k] = std::sqrt(r.ay * r.ay + r.az * r.az);
    w_rad[k] = r.gx;
    w_tan[k] = std::sqrt(r.gy * r.gy + r.gz * r.gz);
  }
  return {SampleSeries(kImuRateHz, t0, std::move(a_rad)),
          SampleSeries(kImuRateHz, t0, std::move(a_tan)),
          SampleSeries(kImuRateHz, t0, std::move(w_rad)),
          SampleSeries(kImuRateHz, t0, std::move(w_tan))};
}

SampleSeries ipf(const ImuComponents& c) {
  const auto& a = c.a_rad.values;
  const auto& w = c.w_tan.values;
  if (a.size() != w.size()) throw Error("component length mismatch");
  if (a.size() < kWindow) throw Error("insufficient context");
  const std::size_t count = a.size() - (kWindow - 1);
  std::vector<double> out(count);
  for (std::size_t n = 0; n < count; ++n) {
    const std::size_t i = n + kPast;
    double sum_a = 0.0, sum_w = 0.0;
    for (std::size_t j = i - kPast; j <= i + kFuture; ++j) {
      sum_a += a[j];
      sum_w += w[j];
    }
    out[n] = (a[i] - sum_a / kWindow) * (w[i] - sum_w / kWindow);
  }
  return SampleSeries(c.a_rad.rate, c.a_rad.time_at(kPast), std::move(out));
}

ImuAnalysis analyze_imu(const std::vector<ImuRecord>& records) {
  ImuAnalysis out;
  out.raw = decompose(records);
  const auto lowpass = design_lowpass(kImuLowpassHz, kImuRateHz);
  out.a_rad_lowpass = iir_filter(out.raw.a_rad, lowpass);
  out.w_tan_lowpass = iir_filter(out.raw.w_tan, lowpass);
  // Filtered peaks trail the motion; restamp by the delay in whole samples.
  const double lag_ms = std::round(lowpass.dc_group_delay()) * kPeriodMs;
  out.a_rad_lowpass.start_time -= lag_ms;
  out.w_tan_lowpass.start_time -= lag_ms;
  ImuComponents filtered = out.raw;
  filtered.a_rad = out.a_rad_lowpass;
  filtered.w_tan = out.w_tan_lowpass;
  out.ipf = ipf(filtered);
  return out;
}

SampleSeries imu_likelihood(const std::vector<ImuRecord>& records) {
  return analyze_imu(records).ipf;
}

}  // namespace shotfusion

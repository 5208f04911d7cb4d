#pragma once

#include <vector>

#include "shotfusion/signal.hpp"

namespace shotfusion {

inline constexpr double kImuRateHz = 100.0;
inline constexpr double kImuLowpassHz = 10.0;
inline constexpr double kAccelRangeG = 8.0;
inline constexpr double kGyroRangeDps = 2000.0;

/// One accelerometer (g) + gyroscope (deg/s) sample; t in ms on the IMU clock.
struct ImuRecord {
  double t = 0.0;
  double ax = 0.0, ay = 0.0, az = 0.0;
  double gx = 0.0, gy = 0.0, gz = 0.0;
};

/// Throws if the record exceeds the sensor range.
void check_range(const ImuRecord& r);

/// Radial/tangential split on a uniform 100 Hz grid.
struct ImuComponents {
  SampleSeries a_rad, a_tan, w_rad, w_tan;
};

/// Everything the fusion stage needs from one IMU stream.
struct ImuAnalysis {
  ImuComponents raw;
  SampleSeries a_rad_lowpass;
  SampleSeries w_tan_lowpass;
  SampleSeries ipf;
};

/// Accepts 5-20 ms sample spacing and re-grids to exact 10 ms steps by
/// nearest-sample assignment before splitting.
ImuComponents decompose(const std::vector<ImuRecord>& records);

/// Product of macroframe-mean-removed a_rad and w_tan. The window spans
/// 4 past and 5 future samples, so the output is 9 samples shorter.
/// The caller is responsible for low-passing a_rad and w_tan first.
SampleSeries ipf(const ImuComponents& components);

/// decompose -> 10 Hz low-pass on a_rad and w_tan -> ipf. The low-passed
/// series are shifted earlier by the filter's DC group delay, rounded to
/// whole samples, so IPF peaks line up with the motion that caused them.
ImuAnalysis analyze_imu(const std::vector<ImuRecord>& records);

SampleSeries imu_likelihood(const std::vector<ImuRecord>& records);

}  // namespace shotfusion

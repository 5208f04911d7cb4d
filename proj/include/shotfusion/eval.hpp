#pragma once

#include <cstddef>
#include <vector>

#include "shotfusion/events.hpp"

namespace shotfusion {

inline constexpr double kMatchToleranceMs = 100.0;

/// Ground-truth shot times on the audio clock, strictly ascending.
struct LabelSet {
  std::vector<double> shots;

  void check() const;
};

struct EvalReport {
  double precision = 1.0;
  double recall = 1.0;
  double f_score = 1.0;
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  double match_tolerance_ms = kMatchToleranceMs;
};

EvalReport make_report(std::size_t tp, std::size_t fp, std::size_t fn, double tolerance_ms);

/// Labels are visited in time order; each takes the nearest unmatched event
/// within tolerance (the earlier one on a distance tie).
EvalReport evaluate(const std::vector<ShotEvent>& events, const LabelSet& labels,
                    double tolerance_ms = kMatchToleranceMs);

}  // namespace shotfusion

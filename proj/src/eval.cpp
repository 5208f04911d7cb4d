#include "shotfusion/eval.hpp"

#include <algorithm>
#include <cmath>

#include "shotfusion/signal.hpp"

namespace shotfusion {

void LabelSet::check() const {
  for (std::size_t i = 0; i < shots.size(); ++i) {
    if (!std::isfinite(shots[i]) || shots[i] < 0.0) throw Error("invalid label time");
    if (i > 0 && !(shots[i] > shots[i - 1])) throw Error("labels not ascending");
  }
}

EvalReport make_report(std::size_t tp, std::size_t fp, std::size_t fn, double tolerance_ms) {
  EvalReport r;
  r.true_positives = tp;
  r.false_positives = fp;
  r.false_negatives = fn;
  r.match_tolerance_ms = tolerance_ms;
  r.precision = tp + fp == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  r.recall = tp + fn == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  const double sum = r.precision + r.recall;
  r.f_score = sum > 0.0 ? 2.0 * r.precision * r.recall / sum : 0.0;
  return r;
}

EvalReport evaluate(const std::vector<ShotEvent>& events, const LabelSet& labels,
                    double tolerance_ms) {
  std::vector<bool> used(events.size(), false);
  std::size_t tp = 0;
  // Events are time-ordered, so the scan window only moves forward.
  std::size_t start = 0;
  for (double label : labels.shots) {
    while (start < events.size() && events[start].time_ms < label - tolerance_ms) ++start;
    std::size_t best = events.size();
    double best_distance = 0.0;
    for (std::size_t e = start; e < events.size() && events[e].time_ms <= label + tolerance_ms;
         ++e) {
      if (used[e]) continue;
      const double d = std::abs(events[e].time_ms - label);
      if (best == events.size() || d < best_distance) {
        best = e;
        best_distance = d;
      }
    }
    if (best != events.size()) {
      used[best] = true;
      ++tp;
    }
  }
  return make_report(tp, events.size() - tp, labels.shots.size() - tp, tolerance_ms);
}

}  // namespace shotfusion

#pragma once

namespace shotfusion {

/// A detected or labeled shot. time_ms is on the audio clock.
struct ShotEvent {
  double time_ms = 0.0;
  double score = 0.0;

  friend bool operator==(const ShotEvent&, const ShotEvent&) = default;
};

}  // namespace shotfusion

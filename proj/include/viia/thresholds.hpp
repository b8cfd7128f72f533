#pragma once

namespace viia {

// Range gates shared by guidance (phase changes) and control (grasp judgement).
struct Thresholds {
  double accessible_distance = 0.7;  // m, avatar to target
  double graspable_aim = 8.0;        // deg
  double graspable_band_min = 0.05;  // m, wrist to target
  double graspable_band_max = 0.25;
  double dwell = 0.5;                // s
  double timeout = 120.0;            // s

  void validate() const;

  bool in_band(double distance) const {
    return distance >= graspable_band_min && distance <= graspable_band_max;
  }
  double band_center() const { return 0.5 * (graspable_band_min + graspable_band_max); }
  double band_half_width() const { return 0.5 * (graspable_band_max - graspable_band_min); }
};

}  // namespace viia

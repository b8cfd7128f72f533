#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "viia/perception.hpp"
#include "viia/thresholds.hpp"
#include "viia/world.hpp"

namespace viia::control {

enum class GraspGesture { cylindrical_power, spherical, lateral_pinch, precision_pinch };

std::string_view to_string(GraspGesture gesture);

struct ProsthesisState {
  double aperture = 1.0;  // 1 = fully open
  double wrist_rotation = 0.0;
  GraspGesture gesture = GraspGesture::cylindrical_power;
  bool holding = false;
};

enum class GraspReason { ok, aim_error, distance, gesture_mismatch, dropped };

std::string_view to_string(GraspReason reason);

struct GraspOutcome {
  bool success = false;
  GraspReason reason = GraspReason::ok;
  // True geometry at the close instant.
  double aim_error = 0.0;
  double distance = 0.0;
  double axis_angle = 0.0;
};

struct ControlParams {
  double axis_tolerance = 25.0;     // deg
  double wrist_rate_limit = 90.0;   // deg/s
  double lateral_tilt = 45.0;       // deg from vertical before a lying object is pinched
};

struct GestureChoice {
  GraspGesture gesture = GraspGesture::precision_pinch;
  std::optional<std::string> warning;
};

GestureChoice select_gesture(std::string_view category, Vec3 principal_axis,
                             const ControlParams& params = {});
GestureChoice select_gesture(world::ObjectKind category, Vec3 principal_axis,
                             const ControlParams& params = {});

// Per-tick wrist rotation command (deg) that turns the hand axis onto the
// object axis, limited to `wrist_rate_limit * dt`.
double wrist_setpoint(const perception::LocalDetection& local, double dt,
                      const ControlParams& params = {});

// Judged on the true geometry of the current world, not on detections.
GraspOutcome attempt_grasp(const world::WorldState& state, const ProsthesisState& prosthesis,
                           const Thresholds& thresholds, const ControlParams& params = {});

}  // namespace viia::control

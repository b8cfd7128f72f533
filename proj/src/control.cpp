#include "viia/control.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <utility>

namespace viia::control {

std::string_view to_string(GraspGesture gesture) {
  switch (gesture) {
    case GraspGesture::cylindrical_power: return "cylindrical_power";
    case GraspGesture::spherical: return "spherical";
    case GraspGesture::lateral_pinch: return "lateral_pinch";
    case GraspGesture::precision_pinch: return "precision_pinch";
  }
  return "unknown";
}

std::string_view to_string(GraspReason reason) {
  switch (reason) {
    case GraspReason::ok: return "ok";
    case GraspReason::aim_error: return "aim_error";
    case GraspReason::distance: return "distance";
    case GraspReason::gesture_mismatch: return "gesture_mismatch";
    case GraspReason::dropped: return "dropped";
  }
  return "unknown";
}

namespace {

// Upright gesture per graspable category.
constexpr std::array<std::pair<std::string_view, GraspGesture>, 3> kGestureTable{{
    {"bottle", GraspGesture::cylindrical_power},
    {"ball", GraspGesture::spherical},
    {"sound_source", GraspGesture::lateral_pinch},
}};

}  // namespace

GestureChoice select_gesture(std::string_view category, Vec3 principal_axis, const ControlParams& params) {
  const auto it = std::find_if(kGestureTable.begin(), kGestureTable.end(),
                               [&](const auto& entry) { return entry.first == category; });
  if (it == kGestureTable.end()) {
    return {GraspGesture::precision_pinch,
            "no grasp gesture for '" + std::string(category) + "', using precision pinch"};
  }
  GraspGesture gesture = it->second;
  const double tilt = angle_between_deg(principal_axis, {0.0, 0.0, 1.0});
  // Axes are unsigned: an upside-down bottle is still upright for grasping.
  const double tilt_from_vertical = std::min(tilt, 180.0 - tilt);
  if (gesture == GraspGesture::cylindrical_power && tilt_from_vertical > params.lateral_tilt) {
    gesture = GraspGesture::lateral_pinch;
  }
  return {gesture, std::nullopt};
}

GestureChoice select_gesture(world::ObjectKind category, Vec3 principal_axis, const ControlParams& params) {
  return select_gesture(world::to_string(category), principal_axis, params);
}

double wrist_setpoint(const perception::LocalDetection& local, double dt, const ControlParams& params) {
  const double limit = params.wrist_rate_limit * dt;
  return std::clamp(local.object_axis_angle, -limit, limit);
}

GraspOutcome attempt_grasp(const world::WorldState& state, const ProsthesisState& prosthesis,
                           const Thresholds& thresholds, const ControlParams& params) {
  GraspOutcome outcome;
  const auto* target = world::find_object(state, world::ObjectKind::bottle);
  if (target == nullptr) {
    outcome.reason = GraspReason::distance;
    outcome.distance = std::numeric_limits<double>::infinity();
    return outcome;
  }
  const auto g = world::wrist_geometry(world::wrist_frame(state), *target);
  outcome.aim_error = g.aim_error;
  outcome.distance = g.distance;
  outcome.axis_angle = g.axis_angle;

  const auto expected = select_gesture(target->kind, target->principal_axis, params);
  if (g.aim_error > thresholds.graspable_aim) {
    outcome.reason = GraspReason::aim_error;
  } else if (!thresholds.in_band(g.distance)) {
    outcome.reason = GraspReason::distance;
  } else if (std::abs(g.axis_angle) > params.axis_tolerance || prosthesis.gesture != expected.gesture) {
    outcome.reason = GraspReason::gesture_mismatch;
  } else {
    outcome.success = true;
    outcome.reason = GraspReason::ok;
  }
  return outcome;
}

}  // namespace viia::control

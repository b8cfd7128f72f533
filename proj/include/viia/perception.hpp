#pragma once

#include <optional>
#include <vector>

#include "viia/world.hpp"

namespace viia::perception {

struct CameraModel {
  double fov_half_angle = 30.0;  // deg
  double max_range = 6.0;        // m
  double range_noise_sigma = 0.05;
  double bearing_noise_sigma = 2.0;

  void validate() const;
};

// Head-mounted camera defaults.
inline CameraModel default_global_camera() { return {30.0, 6.0, 0.05, 2.0}; }
// Wrist-mounted camera defaults.
inline CameraModel default_local_camera() { return {35.0, 0.5, 0.01, 1.0}; }

struct GlobalDetection {
  world::ObjectKind category = world::ObjectKind::bottle;
  double distance = 0.0;
  double azimuth = 0.0;
};

struct LocalDetection {
  double distance = 0.0;
  double aim_error = 0.0;
  double object_axis_angle = 0.0;
};

// Frustum tests are closed intervals on both angle and range.
bool in_frustum(double off_axis_deg, double distance, const CameraModel& camera);

std::vector<GlobalDetection> global_detect(const world::WorldState& state, const CameraModel& camera,
                                           Rng& rng);

// Detects the grasp target (the bottle) from the wrist camera.
std::optional<LocalDetection> local_detect(const world::WorldState& state, const CameraModel& camera,
                                           Rng& rng);

}  // namespace viia::perception

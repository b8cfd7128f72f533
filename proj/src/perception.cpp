#include "viia/perception.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace viia::perception {

void CameraModel::validate() const {
  if (!(fov_half_angle > 0.0 && fov_half_angle <= 90.0)) {
    throw std::invalid_argument("camera: fov_half_angle must be in (0, 90]");
  }
  if (!(max_range > 0.0)) throw std::invalid_argument("camera: max_range must be > 0");
  if (!(range_noise_sigma >= 0.0 && bearing_noise_sigma >= 0.0)) {
    throw std::invalid_argument("camera: noise sigmas must be >= 0");
  }
}

bool in_frustum(double off_axis_deg, double distance, const CameraModel& camera) {
  return std::abs(off_axis_deg) <= camera.fov_half_angle && distance <= camera.max_range;
}

namespace {

double add_noise(double value, double sigma, Rng& rng) {
  if (sigma <= 0.0) return value;
  return value + std::normal_distribution<double>(0.0, sigma)(rng);
}

}  // namespace

std::vector<GlobalDetection> global_detect(const world::WorldState& state, const CameraModel& camera,
                                           Rng& rng) {
  std::vector<GlobalDetection> detections;
  for (const auto& object : state.objects) {
    const auto truth = world::relative_polar(state.avatar, object.position);
    if (!in_frustum(truth.azimuth, truth.distance, camera)) continue;
    GlobalDetection d;
    d.category = object.kind;
    d.distance = std::max(0.0, add_noise(truth.distance, camera.range_noise_sigma, rng));
    d.azimuth = normalize_degrees(add_noise(truth.azimuth, camera.bearing_noise_sigma, rng));
    detections.push_back(d);
  }
  return detections;
}

std::optional<LocalDetection> local_detect(const world::WorldState& state, const CameraModel& camera,
                                           Rng& rng) {
  const auto* target = world::find_object(state, world::ObjectKind::bottle);
  if (target == nullptr) return std::nullopt;
  const auto truth = world::wrist_geometry(world::wrist_frame(state), *target);
  if (!in_frustum(truth.aim_error, truth.distance, camera)) return std::nullopt;
  LocalDetection d;
  d.distance = std::max(0.0, add_noise(truth.distance, camera.range_noise_sigma, rng));
  d.aim_error = std::abs(add_noise(truth.aim_error, camera.bearing_noise_sigma, rng));
  d.object_axis_angle = add_noise(truth.axis_angle, camera.bearing_noise_sigma, rng);
  return d;
}

}  // namespace viia::perception

#include "viia/feedback.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace viia::feedback {

std::string_view to_string(CueSource source) {
  return source == CueSource::beacon ? "beacon" : "proximity";
}

double attenuation(double distance, const CueParams& params) {
  return std::min(1.0, params.reference_distance / std::max(distance, params.min_distance));
}

double woodworth_itd_us(double azimuth_deg, const CueParams& params) {
  const double theta = deg_to_rad(normalize_degrees(azimuth_deg));
  const double scale = params.head_radius / params.speed_of_sound * 1e6;
  const double magnitude = std::abs(theta);
  if (magnitude <= std::numbers::pi / 2.0) return scale * (theta + std::sin(theta));
  const double lateral = std::numbers::pi - magnitude + std::sin(magnitude);
  return std::copysign(scale * lateral, theta);
}

AudioCue spatial_cue(double azimuth_deg, double distance, const CueParams& params) {
  AudioCue cue;
  const double a = attenuation(distance, params);
  const double pan = std::sin(deg_to_rad(azimuth_deg));
  cue.attenuation = a;
  cue.left_gain = a * std::sqrt(std::max(0.0, (1.0 - pan) / 2.0));
  cue.right_gain = a * std::sqrt(std::max(0.0, (1.0 + pan) / 2.0));
  cue.itd_us = woodworth_itd_us(azimuth_deg, params);
  return cue;
}

double proximity_cue(double alignment_error, const CueParams& params) {
  const double e = std::isnan(alignment_error) ? 1.0 : std::clamp(alignment_error, 0.0, 1.0);
  return params.period_min_ms + (params.period_max_ms - params.period_min_ms) * e;
}

std::optional<AudioCue> cue_for_phase(guidance::Phase phase, const world::WorldState& state,
                                      double alignment_error, const CueParams& params) {
  using guidance::Phase;
  switch (phase) {
    case Phase::detecting:
    case Phase::navigating: {
      const auto* beacon = world::find_object(state, world::ObjectKind::sound_source);
      if (beacon == nullptr) return std::nullopt;
      const auto polar = world::relative_polar(state.avatar, beacon->position);
      AudioCue cue = spatial_cue(polar.azimuth, polar.distance, params);
      cue.source = CueSource::beacon;
      return cue;
    }
    case Phase::aligning:
    case Phase::graspable: {
      const auto* target = world::find_object(state, world::ObjectKind::bottle);
      if (target == nullptr) return std::nullopt;
      const auto g = world::wrist_geometry(world::wrist_frame(state), *target);
      AudioCue cue = spatial_cue(g.planar_azimuth, g.distance, params);
      cue.source = CueSource::proximity;
      cue.beep_period_ms = proximity_cue(alignment_error, params);
      return cue;
    }
    default:
      return std::nullopt;
  }
}

}  // namespace viia::feedback

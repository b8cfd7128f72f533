#include "viia/serialization.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace viia::io {

namespace {

Json vec(Vec3 v) { return Json::array({v.x, v.y, v.z}); }

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json optional_number(const std::optional<double>& v) { return v ? finite_or_null(*v) : Json(nullptr); }

void check_keys_impl(const Json& j, const std::vector<std::string_view>& allowed, std::string_view where) {
  if (!j.is_object()) throw std::invalid_argument(std::string(where) + ": expected a JSON object");
  for (const auto& item : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      throw std::invalid_argument(std::string(where) + ": unknown key '" + item.key() + "'");
    }
  }
}

template <class T>
void read(const Json& j, const char* key, T& out, std::string_view where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string(where) + "." + key + ": " + e.what());
  }
}

void read_vec(const Json& j, const char* key, Vec3& out, std::string_view where) {
  if (!j.contains(key)) return;
  const auto& a = j.at(key);
  if (!a.is_array() || a.size() != 3 || !std::all_of(a.begin(), a.end(), [](const Json& x) { return x.is_number(); })) {
    throw std::invalid_argument(std::string(where) + "." + key + ": expected [x, y, z]");
  }
  out = {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

perception::CameraModel camera_from_json(const Json& j, perception::CameraModel camera, std::string_view where) {
  check_keys_impl(j, {"fov_half_angle", "max_range", "range_noise_sigma", "bearing_noise_sigma"}, where);
  read(j, "fov_half_angle", camera.fov_half_angle, where);
  read(j, "max_range", camera.max_range, where);
  read(j, "range_noise_sigma", camera.range_noise_sigma, where);
  read(j, "bearing_noise_sigma", camera.bearing_noise_sigma, where);
  return camera;
}

Json camera_json(const perception::CameraModel& c) {
  return {{"fov_half_angle", c.fov_half_angle},
          {"max_range", c.max_range},
          {"range_noise_sigma", c.range_noise_sigma},
          {"bearing_noise_sigma", c.bearing_noise_sigma}};
}

Json wrist_json(const world::WristPose& w) {
  return {{"offset", vec(w.offset)},
          {"aim_azimuth", w.aim_azimuth},
          {"aim_elevation", w.aim_elevation},
          {"rotation", w.rotation}};
}

}  // namespace

void check_keys(const Json& j, std::initializer_list<std::string_view> allowed, std::string_view where) {
  check_keys_impl(j, std::vector<std::string_view>(allowed), where);
}

Json to_json(const feedback::AudioCue& cue) {
  return {{"left_gain", cue.left_gain},
          {"right_gain", cue.right_gain},
          {"itd_us", cue.itd_us},
          {"beep_period_ms", optional_number(cue.beep_period_ms)},
          {"source", feedback::to_string(cue.source)}};
}

Json to_json(const world::SceneObject& object) {
  return {{"kind", world::to_string(object.kind)},
          {"position", vec(object.position)},
          {"principal_axis", vec(object.principal_axis)},
          {"placement_index", object.placement_index}};
}

Json to_json(const guidance::Event& event) {
  return {{"kind", guidance::to_string(event.kind)}, {"text", event.text}, {"tick", event.tick}};
}

Json to_json(const control::ProsthesisState& p) {
  return {{"aperture", p.aperture},
          {"wrist_rotation", p.wrist_rotation},
          {"gesture", control::to_string(p.gesture)},
          {"holding", p.holding}};
}

Json to_json(const sim::Frame& frame) {
  Json j = {
      {"schema_version", kSchemaVersion},
      {"type", "frame"},
      {"tick", frame.tick},
      {"phase", guidance::to_string(frame.phase)},
      {"avatar", {{"x", frame.avatar.x}, {"y", frame.avatar.y}, {"heading", frame.avatar.heading}}},
      {"wrist", wrist_json(frame.wrist)},
      {"prosthesis", to_json(frame.prosthesis)},
      {"trial_clocks", {{"t1_s", optional_number(frame.clocks.t1)}, {"t2_s", optional_number(frame.clocks.t2)}}},
      {"placement_index", frame.placement_index},
  };
  if (frame.audio_cue) j["audio_cue"] = to_json(*frame.audio_cue);
  if (frame.prompt) j["prompt"] = *frame.prompt;
  if (!frame.events.empty()) {
    Json events = Json::array();
    for (const auto& e : frame.events) events.push_back(to_json(e));
    j["events"] = std::move(events);
  }
  if (frame.alignment_error) j["alignment_error"] = *frame.alignment_error;
  Json objects = Json::array();
  for (const auto& o : frame.objects) objects.push_back(to_json(o));
  j["objects"] = std::move(objects);
  return j;
}

Json to_json(const world::WorldState& state) {
  std::ostringstream rng;
  rng << state.rng;
  Json objects = Json::array();
  for (const auto& o : state.objects) objects.push_back(to_json(o));
  const auto& a = state.arena;
  return {
      {"arena",
       {{"radius", a.radius},
        {"span", a.span},
        {"segment_count", a.segment_count},
        {"tick", a.tick},
        {"table_height", a.table_height},
        {"grasp_height", a.grasp_height},
        {"table_clearance", a.table_clearance},
        {"max_forward_speed", a.max_forward_speed},
        {"max_turn_rate", a.max_turn_rate}}},
      {"avatar", {{"x", state.avatar.x}, {"y", state.avatar.y}, {"heading", state.avatar.heading}}},
      {"wrist", wrist_json(state.wrist)},
      {"tremor",
       {{"sigma", state.tremor.sigma},
        {"correlation", state.tremor.correlation},
        {"azimuth_offset", state.tremor.azimuth_offset},
        {"elevation_offset", state.tremor.elevation_offset}}},
      {"objects", std::move(objects)},
      {"tick_index", state.tick_index},
      {"attached_object", state.attached_object ? Json(*state.attached_object) : Json(nullptr)},
      {"rng_state", rng.str()},
  };
}

sim::SimConfig sim_config_from_json(const Json& j, std::initializer_list<std::string_view> extra) {
  std::vector<std::string_view> allowed{"arena",   "thresholds",    "global_camera", "local_camera",
                                        "control", "cue",           "initial_wrist", "bottle_axis",
                                        "tremor_correlation"};
  allowed.insert(allowed.end(), extra.begin(), extra.end());
  check_keys_impl(j, allowed, "config");

  sim::SimConfig c;
  if (j.contains("arena")) {
    const auto& a = j.at("arena");
    check_keys(a,
               {"radius", "span", "segment_count", "tick", "table_height", "grasp_height", "table_clearance",
                "max_forward_speed", "max_turn_rate"},
               "arena");
    read(a, "radius", c.arena.radius, "arena");
    read(a, "span", c.arena.span, "arena");
    read(a, "segment_count", c.arena.segment_count, "arena");
    read(a, "tick", c.arena.tick, "arena");
    read(a, "table_height", c.arena.table_height, "arena");
    read(a, "grasp_height", c.arena.grasp_height, "arena");
    read(a, "table_clearance", c.arena.table_clearance, "arena");
    read(a, "max_forward_speed", c.arena.max_forward_speed, "arena");
    read(a, "max_turn_rate", c.arena.max_turn_rate, "arena");
  }
  if (j.contains("thresholds")) {
    const auto& t = j.at("thresholds");
    check_keys(t, {"accessible_distance", "graspable_aim", "graspable_band", "dwell", "timeout"}, "thresholds");
    read(t, "accessible_distance", c.thresholds.accessible_distance, "thresholds");
    read(t, "graspable_aim", c.thresholds.graspable_aim, "thresholds");
    read(t, "dwell", c.thresholds.dwell, "thresholds");
    read(t, "timeout", c.thresholds.timeout, "thresholds");
    if (t.contains("graspable_band")) {
      const auto& band = t.at("graspable_band");
      if (!band.is_array() || band.size() != 2 || !band[0].is_number() || !band[1].is_number()) {
        throw std::invalid_argument("thresholds.graspable_band: expected [min, max]");
      }
      c.thresholds.graspable_band_min = band[0].get<double>();
      c.thresholds.graspable_band_max = band[1].get<double>();
    }
  }
  if (j.contains("global_camera")) c.global_camera = camera_from_json(j.at("global_camera"), c.global_camera, "global_camera");
  if (j.contains("local_camera")) c.local_camera = camera_from_json(j.at("local_camera"), c.local_camera, "local_camera");
  if (j.contains("control")) {
    const auto& k = j.at("control");
    check_keys(k, {"axis_tolerance", "wrist_rate_limit", "lateral_tilt"}, "control");
    read(k, "axis_tolerance", c.control.axis_tolerance, "control");
    read(k, "wrist_rate_limit", c.control.wrist_rate_limit, "control");
    read(k, "lateral_tilt", c.control.lateral_tilt, "control");
  }
  if (j.contains("cue")) {
    const auto& k = j.at("cue");
    check_keys(k,
               {"reference_distance", "min_distance", "head_radius", "speed_of_sound", "period_min_ms",
                "period_max_ms"},
               "cue");
    read(k, "reference_distance", c.cue.reference_distance, "cue");
    read(k, "min_distance", c.cue.min_distance, "cue");
    read(k, "head_radius", c.cue.head_radius, "cue");
    read(k, "speed_of_sound", c.cue.speed_of_sound, "cue");
    read(k, "period_min_ms", c.cue.period_min_ms, "cue");
    read(k, "period_max_ms", c.cue.period_max_ms, "cue");
  }
  if (j.contains("initial_wrist")) {
    const auto& w = j.at("initial_wrist");
    check_keys(w, {"offset", "aim_azimuth", "aim_elevation", "rotation"}, "initial_wrist");
    read_vec(w, "offset", c.initial_wrist.offset, "initial_wrist");
    read(w, "aim_azimuth", c.initial_wrist.aim_azimuth, "initial_wrist");
    read(w, "aim_elevation", c.initial_wrist.aim_elevation, "initial_wrist");
    read(w, "rotation", c.initial_wrist.rotation, "initial_wrist");
  }
  read_vec(j, "bottle_axis", c.bottle_axis, "config");
  read(j, "tremor_correlation", c.tremor_correlation, "config");
  if (norm(c.bottle_axis) == 0.0) throw std::invalid_argument("config.bottle_axis: must be non-zero");
  c.validate();
  return c;
}

agent::AgentParams agent_params_from_json(const Json& j) {
  check_keys(j, {"azimuth_estimate_sigma", "tremor_sigma", "reaction_delay", "gait_speed", "holds_arm", "familiar"},
             "agent");
  agent::AgentParams p;
  read(j, "azimuth_estimate_sigma", p.azimuth_estimate_sigma, "agent");
  read(j, "tremor_sigma", p.tremor_sigma, "agent");
  read(j, "reaction_delay", p.reaction_delay, "agent");
  read(j, "gait_speed", p.gait_speed, "agent");
  read(j, "holds_arm", p.holds_arm, "agent");
  read(j, "familiar", p.familiar, "agent");
  return p;
}

Json to_json(const agent::AgentParams& p) {
  return {{"azimuth_estimate_sigma", p.azimuth_estimate_sigma},
          {"tremor_sigma", p.tremor_sigma},
          {"reaction_delay", p.reaction_delay},
          {"gait_speed", p.gait_speed},
          {"holds_arm", p.holds_arm},
          {"familiar", p.familiar}};
}

Json to_json(const sim::SimConfig& c) {
  return {
      {"arena",
       {{"radius", c.arena.radius},
        {"span", c.arena.span},
        {"segment_count", c.arena.segment_count},
        {"tick", c.arena.tick},
        {"table_height", c.arena.table_height},
        {"grasp_height", c.arena.grasp_height},
        {"table_clearance", c.arena.table_clearance},
        {"max_forward_speed", c.arena.max_forward_speed},
        {"max_turn_rate", c.arena.max_turn_rate}}},
      {"thresholds",
       {{"accessible_distance", c.thresholds.accessible_distance},
        {"graspable_aim", c.thresholds.graspable_aim},
        {"graspable_band", {c.thresholds.graspable_band_min, c.thresholds.graspable_band_max}},
        {"dwell", c.thresholds.dwell},
        {"timeout", c.thresholds.timeout}}},
      {"global_camera", camera_json(c.global_camera)},
      {"local_camera", camera_json(c.local_camera)},
      {"control",
       {{"axis_tolerance", c.control.axis_tolerance},
        {"wrist_rate_limit", c.control.wrist_rate_limit},
        {"lateral_tilt", c.control.lateral_tilt}}},
      {"cue",
       {{"reference_distance", c.cue.reference_distance},
        {"min_distance", c.cue.min_distance},
        {"head_radius", c.cue.head_radius},
        {"speed_of_sound", c.cue.speed_of_sound},
        {"period_min_ms", c.cue.period_min_ms},
        {"period_max_ms", c.cue.period_max_ms}}},
      {"initial_wrist", wrist_json(c.initial_wrist)},
      {"bottle_axis", vec(c.bottle_axis)},
      {"tremor_correlation", c.tremor_correlation},
  };
}

}  // namespace viia::io

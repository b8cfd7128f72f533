#include "viia/world.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace viia {

Rng make_rng(std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32), stream};
  return Rng(seq);
}

}  // namespace viia

namespace viia::world {

void ArenaConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("arena: " + what); };
  if (!(radius > 0.0)) fail("radius must be > 0");
  if (!(span > 0.0 && span <= 360.0)) fail("span must be in (0, 360]");
  if (segment_count < 2) fail("segment_count must be >= 2");
  if (!(tick > 0.0)) fail("tick must be > 0");
  if (!(table_height > 0.0 && grasp_height >= table_height)) fail("grasp_height must be >= table_height > 0");
  if (!(table_clearance >= 0.0)) fail("table_clearance must be >= 0");
  if (!(max_forward_speed > 0.0 && max_turn_rate > 0.0)) fail("speed limits must be > 0");
}

std::string_view to_string(ObjectKind kind) {
  switch (kind) {
    case ObjectKind::table: return "table";
    case ObjectKind::bottle: return "bottle";
    case ObjectKind::sound_source: return "sound_source";
  }
  return "unknown";
}

std::optional<ObjectKind> object_kind_from_string(std::string_view name) {
  if (name == "table") return ObjectKind::table;
  if (name == "bottle") return ObjectKind::bottle;
  if (name == "sound_source") return ObjectKind::sound_source;
  return std::nullopt;
}

std::vector<int> allowed_placements(std::optional<int> previous, int segment_count) {
  std::vector<int> allowed;
  for (int i = 0; i < segment_count; ++i) {
    if (!previous || std::abs(i - *previous) >= 2) allowed.push_back(i);
  }
  return allowed;
}

int sample_placement(std::optional<int> previous, int segment_count, Rng& rng) {
  const auto allowed = allowed_placements(previous, segment_count);
  if (allowed.empty()) throw std::invalid_argument("no placement satisfies the spacing rule");
  std::uniform_int_distribution<std::size_t> pick(0, allowed.size() - 1);
  return allowed[pick(rng)];
}

double placement_bearing(int index, const ArenaConfig& arena) {
  if (index < 0 || index >= arena.segment_count) {
    throw std::out_of_range("placement index " + std::to_string(index) + " outside 0.." +
                            std::to_string(arena.segment_count - 1));
  }
  return -arena.span / 2.0 + (2.0 * index + 1.0) * arena.span / (2.0 * arena.segment_count);
}

Vec3 placement_pose(int index, const ArenaConfig& arena) {
  const double phi = deg_to_rad(placement_bearing(index, arena));
  return {arena.radius * std::cos(phi), arena.radius * std::sin(phi), arena.table_height};
}

WorldState make_world(const ArenaConfig& arena, Rng rng) {
  arena.validate();
  WorldState state;
  state.arena = arena;
  state.rng = std::move(rng);
  return state;
}

void reset_trial(WorldState& state, int index, const WristPose& initial_wrist, Vec3 bottle_axis) {
  const Vec3 table = placement_pose(index, state.arena);
  state.objects = {
      {ObjectKind::table, table, {0.0, 0.0, 1.0}, index},
      {ObjectKind::bottle, {table.x, table.y, state.arena.grasp_height}, normalized(bottle_axis), index},
      {ObjectKind::sound_source, {table.x, table.y, state.arena.table_height}, {0.0, 0.0, 1.0}, index},
  };
  state.avatar = {};
  state.wrist = initial_wrist;
  state.tremor.azimuth_offset = 0.0;
  state.tremor.elevation_offset = 0.0;
  state.attached_object.reset();
}

namespace {

void clamp_to_sector(AvatarPose& pose, const ArenaConfig& arena) {
  double r = std::hypot(pose.x, pose.y);
  if (r == 0.0) return;
  const double raw = rad_to_deg(std::atan2(pose.y, pose.x));
  double bearing = raw;
  if (arena.span < 360.0) bearing = std::clamp(bearing, -arena.span / 2.0, arena.span / 2.0);
  if (bearing == raw && r <= arena.radius) return;
  r = std::min(r, arena.radius);
  pose.x = r * std::cos(deg_to_rad(bearing));
  pose.y = r * std::sin(deg_to_rad(bearing));
}

double advance_tremor(double offset, const Tremor& tremor, Rng& rng) {
  offset *= tremor.correlation;
  if (tremor.sigma > 0.0) offset += std::normal_distribution<double>(0.0, tremor.sigma)(rng);
  return offset;
}

WristPose clamp_wrist(WristPose wrist) {
  constexpr double kMaxReach = 0.8;
  const double planar = planar_norm(wrist.offset);
  if (planar > kMaxReach) {
    wrist.offset.x *= kMaxReach / planar;
    wrist.offset.y *= kMaxReach / planar;
  }
  wrist.offset.z = std::clamp(wrist.offset.z, 0.3, 1.8);
  wrist.aim_azimuth = normalize_degrees(wrist.aim_azimuth);
  wrist.aim_elevation = std::clamp(wrist.aim_elevation, -90.0, 90.0);
  return wrist;
}

}  // namespace

void step_avatar(WorldState& state, const StepInput& input, double dt) {
  const ArenaConfig& arena = state.arena;
  const double v = std::clamp(input.forward_speed, -arena.max_forward_speed, arena.max_forward_speed);
  const double w = std::clamp(input.turn_rate, -arena.max_turn_rate, arena.max_turn_rate);

  AvatarPose next = state.avatar;
  next.heading = normalize_degrees(next.heading + w * dt);
  const double h = deg_to_rad(next.heading);
  next.x += v * dt * std::cos(h);
  next.y += v * dt * std::sin(h);
  clamp_to_sector(next, arena);

  for (const auto& object : state.objects) {
    if (object.kind != ObjectKind::table) continue;
    if (std::hypot(next.x - object.position.x, next.y - object.position.y) < arena.table_clearance) {
      next.x = state.avatar.x;
      next.y = state.avatar.y;
      break;
    }
  }
  state.avatar = next;

  WristPose wrist = state.wrist;
  wrist.offset += input.wrist.offset;
  wrist.aim_azimuth += input.wrist.aim_azimuth;
  wrist.aim_elevation += input.wrist.aim_elevation;
  wrist.rotation = normalize_degrees(wrist.rotation + input.wrist.rotation);
  state.wrist = clamp_wrist(wrist);

  state.tremor.azimuth_offset = advance_tremor(state.tremor.azimuth_offset, state.tremor, state.rng);
  state.tremor.elevation_offset = advance_tremor(state.tremor.elevation_offset, state.tremor, state.rng);

  if (state.attached_object) {
    state.objects[*state.attached_object].position = wrist_frame(state).position;
  }
  ++state.tick_index;
}

Polar relative_polar(const AvatarPose& listener, Vec3 source) {
  const double dx = source.x - listener.x;
  const double dy = source.y - listener.y;
  const double bearing = rad_to_deg(std::atan2(dy, dx));
  return {std::hypot(dx, dy), normalize_degrees(bearing - listener.heading)};
}

const SceneObject* find_object(const WorldState& state, ObjectKind kind) {
  for (const auto& object : state.objects) {
    if (object.kind == kind) return &object;
  }
  return nullptr;
}

WristFrame wrist_frame(const WorldState& state) {
  const Vec3 offset = rotate_planar(state.wrist.offset, state.avatar.heading);
  WristFrame frame;
  frame.position = {state.avatar.x + offset.x, state.avatar.y + offset.y, offset.z};
  frame.bearing = normalize_degrees(state.avatar.heading + state.wrist.aim_azimuth +
                                    state.tremor.azimuth_offset);
  frame.elevation = std::clamp(state.wrist.aim_elevation + state.tremor.elevation_offset, -90.0, 90.0);
  frame.aim = direction_from_angles(frame.bearing, frame.elevation);

  const double b = deg_to_rad(frame.bearing);
  const double e = deg_to_rad(frame.elevation);
  const Vec3 base_up{-std::sin(e) * std::cos(b), -std::sin(e) * std::sin(b), std::cos(e)};
  const Vec3 side = cross(frame.aim, base_up);
  const double r = deg_to_rad(state.wrist.rotation);
  frame.up = std::cos(r) * base_up + std::sin(r) * side;
  return frame;
}

WristGeometry wrist_geometry(const WristFrame& wrist, const SceneObject& object) {
  const Vec3 to_object = object.position - wrist.position;
  WristGeometry g;
  g.distance = norm(to_object);
  g.aim_error = g.distance > 0.0 ? angle_between_deg(wrist.aim, to_object) : 0.0;
  g.planar_azimuth =
      normalize_degrees(rad_to_deg(std::atan2(to_object.y, to_object.x)) - wrist.bearing);

  const Vec3 axis = object.principal_axis;
  const Vec3 projected = axis - dot(axis, wrist.aim) * wrist.aim;
  if (norm(projected) > 1e-12) {
    const Vec3 side = cross(wrist.aim, wrist.up);
    double angle = rad_to_deg(std::atan2(dot(projected, side), dot(projected, wrist.up)));
    if (angle > 90.0) angle -= 180.0;
    if (angle <= -90.0) angle += 180.0;
    g.axis_angle = angle;
  }
  return g;
}

}  // namespace viia::world

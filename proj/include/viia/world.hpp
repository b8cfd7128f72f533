#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "viia/geometry.hpp"

namespace viia {

using Rng = std::mt19937_64;

// Builds an independent generator for one stream of a seeded run.
Rng make_rng(std::uint64_t seed, std::uint32_t stream);

}  // namespace viia

namespace viia::world {

struct ArenaConfig {
  double radius = 5.0;      // m
  double span = 120.0;      // deg
  int segment_count = 10;
  double tick = 0.02;       // s
  double table_height = 0.75;
  double grasp_height = 0.85;
  double table_clearance = 0.3;  // minimum avatar-to-table-center distance
  double max_forward_speed = 1.2;  // m/s
  double max_turn_rate = 120.0;    // deg/s

  // Throws std::invalid_argument describing the first violated invariant.
  void validate() const;
};

struct AvatarPose {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;  // deg, (-180, 180]
};

// Commanded wrist pose, expressed in the avatar frame.
struct WristPose {
  Vec3 offset{0.2, 0.15, 0.85};
  double aim_azimuth = 0.0;    // deg relative to avatar heading
  double aim_elevation = 0.0;  // deg, [-90, 90]
  double rotation = -40.0;     // deg, pronation/supination
};

// First-order autoregressive aim jitter layered over the commanded pose.
struct Tremor {
  double sigma = 0.0;        // deg per tick innovation
  double correlation = 0.9;  // per-tick carry-over of the previous offset
  double azimuth_offset = 0.0;
  double elevation_offset = 0.0;
};

enum class ObjectKind { table, bottle, sound_source };

std::string_view to_string(ObjectKind kind);
std::optional<ObjectKind> object_kind_from_string(std::string_view name);

struct SceneObject {
  ObjectKind kind = ObjectKind::bottle;
  Vec3 position;
  Vec3 principal_axis{0.0, 0.0, 1.0};
  int placement_index = 0;
};

struct WorldState {
  ArenaConfig arena;
  AvatarPose avatar;
  WristPose wrist;
  Tremor tremor;
  std::vector<SceneObject> objects;
  std::int64_t tick_index = 0;
  std::optional<std::size_t> attached_object;  // held by the hand
  Rng rng;
};

struct WristDelta {
  Vec3 offset;  // avatar frame, m
  double aim_azimuth = 0.0;
  double aim_elevation = 0.0;
  double rotation = 0.0;
};

struct StepInput {
  double forward_speed = 0.0;  // m/s
  double turn_rate = 0.0;      // deg/s
  WristDelta wrist;
};

struct Polar {
  double distance = 0.0;
  double azimuth = 0.0;
};

// Effective wrist frame in world coordinates after tremor.
struct WristFrame {
  Vec3 position;
  Vec3 aim;   // unit aim ray
  Vec3 up;    // unit hand axis, perpendicular to aim, turned by rotation
  double bearing = 0.0;    // planar direction of the aim ray, deg
  double elevation = 0.0;  // deg
};

// Ground-truth relation between the wrist frame and one object.
struct WristGeometry {
  double distance = 0.0;          // wrist to object, m
  double aim_error = 0.0;         // deg, unsigned
  double axis_angle = 0.0;        // deg, signed, folded into (-90, 90]
  double planar_azimuth = 0.0;    // object bearing relative to the aim ray, deg
};

// Indices at least two placement points away from `previous` (all when none).
std::vector<int> allowed_placements(std::optional<int> previous, int segment_count);
int sample_placement(std::optional<int> previous, int segment_count, Rng& rng);

double placement_bearing(int index, const ArenaConfig& arena);
// Center of the table top for a placement. Throws std::out_of_range.
Vec3 placement_pose(int index, const ArenaConfig& arena);

WorldState make_world(const ArenaConfig& arena, Rng rng);
// Places table, bottle and beacon at `index`; resets avatar, wrist and tremor.
void reset_trial(WorldState& state, int index, const WristPose& initial_wrist,
                 Vec3 bottle_axis = {0.0, 0.0, 1.0});

void step_avatar(WorldState& state, const StepInput& input, double dt);

Polar relative_polar(const AvatarPose& listener, Vec3 source);

const SceneObject* find_object(const WorldState& state, ObjectKind kind);

WristFrame wrist_frame(const WorldState& state);
WristGeometry wrist_geometry(const WristFrame& wrist, const SceneObject& object);

}  // namespace viia::world

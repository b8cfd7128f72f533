#pragma once

// Independent reference computations shared by the unit tests and the
// acceptance binary. Nothing here calls the geometry helpers under test.

#include <Eigen/Geometry>
#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <vector>

#include "viia/control.hpp"
#include "viia/world.hpp"

namespace oracle {

// Woodworth ITD at +90 deg for a 0.0875 m head and c = 343 m/s, evaluated to
// 30 digits with mpmath: 0.0875/343 * (pi/2 + 1) * 1e6.
inline constexpr double kItd90Us = 655.815389488494035518194309092;
// Same evaluation at 30 deg and 135 deg.
inline constexpr double kItd30Us = 261.12213663221910027477225269;
inline constexpr double kItd135Us = 380.74105729183567194298602243;

struct GraspTruth {
  double distance = 0.0;
  double aim_error = 0.0;
  double axis_line_angle = 0.0;  // unsigned, [0, 90]
  bool success = false;
  viia::control::GraspReason reason = viia::control::GraspReason::ok;
};

inline double deg(double rad) { return rad * 180.0 / M_PI; }
inline double rad(double deg) { return deg * M_PI / 180.0; }

inline double line_angle_deg(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  return deg(std::atan2(a.cross(b).norm(), std::abs(a.dot(b))));
}

// Rebuilds the wrist frame with rotation matrices and quaternions instead of
// the library's trigonometric shortcuts, then applies the grasp rule.
inline GraspTruth grasp_truth(const viia::world::WorldState& s, viia::control::GraspGesture gesture,
                              double graspable_aim = 8.0, double band_min = 0.05, double band_max = 0.25,
                              double axis_tolerance = 25.0) {
  using Eigen::AngleAxisd;
  using Eigen::Vector3d;
  const Eigen::Matrix3d heading = AngleAxisd(rad(s.avatar.heading), Vector3d::UnitZ()).toRotationMatrix();
  Vector3d offset(s.wrist.offset.x, s.wrist.offset.y, 0.0);
  Vector3d position = Vector3d(s.avatar.x, s.avatar.y, 0.0) + heading * offset;
  position.z() = s.wrist.offset.z;

  const double bearing = s.avatar.heading + s.wrist.aim_azimuth + s.tremor.azimuth_offset;
  const double elevation = std::clamp(s.wrist.aim_elevation + s.tremor.elevation_offset, -90.0, 90.0);
  const Eigen::Quaterniond orient = AngleAxisd(rad(bearing), Vector3d::UnitZ()) *
                                    AngleAxisd(-rad(elevation), Vector3d::UnitY());
  const Vector3d aim = orient * Vector3d::UnitX();
  const Vector3d up = AngleAxisd(rad(s.wrist.rotation), aim) * (orient * Vector3d::UnitZ());

  const viia::world::SceneObject* bottle = nullptr;
  for (const auto& o : s.objects) {
    if (o.kind == viia::world::ObjectKind::bottle) bottle = &o;
  }
  const Vector3d target(bottle->position.x, bottle->position.y, bottle->position.z);
  const Vector3d axis = Vector3d(bottle->principal_axis.x, bottle->principal_axis.y, bottle->principal_axis.z);

  GraspTruth t;
  const Vector3d to = target - position;
  t.distance = to.norm();
  t.aim_error = deg(std::atan2(aim.cross(to).norm(), aim.dot(to)));
  const Vector3d projected = axis - axis.dot(aim) * aim;
  t.axis_line_angle = projected.norm() > 1e-12 ? line_angle_deg(projected, up) : 0.0;

  const double tilt = line_angle_deg(axis, Vector3d::UnitZ());
  const auto expected = tilt > 45.0 ? viia::control::GraspGesture::lateral_pinch
                                    : viia::control::GraspGesture::cylindrical_power;
  using viia::control::GraspReason;
  if (t.aim_error > graspable_aim) {
    t.reason = GraspReason::aim_error;
  } else if (t.distance < band_min || t.distance > band_max) {
    t.reason = GraspReason::distance;
  } else if (t.axis_line_angle > axis_tolerance || gesture != expected) {
    t.reason = GraspReason::gesture_mismatch;
  } else {
    t.reason = GraspReason::ok;
    t.success = true;
  }
  return t;
}

// Random scene near the placed bottle: the wrist sits around the grasp band
// and aims at the bottle within +-12 deg, so every reason code occurs.
struct GraspCase {
  viia::world::WorldState state;
  viia::control::GraspGesture gesture = viia::control::GraspGesture::cylindrical_power;
};

inline GraspCase random_grasp_case(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };

  viia::world::ArenaConfig arena;
  GraspCase c;
  c.state = viia::world::make_world(arena, viia::Rng(1));
  const int index = static_cast<int>(rng() % static_cast<unsigned>(arena.segment_count));
  const double tilt = uniform(0.0, 70.0);
  const double tilt_dir = uniform(-180.0, 180.0);
  const viia::Vec3 axis{std::sin(rad(tilt)) * std::cos(rad(tilt_dir)), std::sin(rad(tilt)) * std::sin(rad(tilt_dir)),
                        std::cos(rad(tilt))};
  viia::world::reset_trial(c.state, index, {}, axis);
  const auto& bottle = c.state.objects[1];

  // Avatar 0.3-0.8 m from the bottle, facing it roughly.
  const double standoff = uniform(0.3, 0.8);
  const double around = uniform(-180.0, 180.0);
  c.state.avatar.x = bottle.position.x + standoff * std::cos(rad(around));
  c.state.avatar.y = bottle.position.y + standoff * std::sin(rad(around));
  const double facing = deg(std::atan2(bottle.position.y - c.state.avatar.y, bottle.position.x - c.state.avatar.x));
  c.state.avatar.heading = viia::normalize_degrees(facing + uniform(-30.0, 30.0));

  // Wrist placed 0.0-0.35 m short of the bottle along a jittered line of sight.
  const double reach = std::max(0.0, standoff - uniform(0.0, 0.35));
  const double sight = rad(facing + uniform(-10.0, 10.0) - c.state.avatar.heading);
  c.state.wrist.offset = {reach * std::cos(sight), reach * std::sin(sight), uniform(0.7, 1.0)};

  // Aim at the bottle from the wrist, then perturb.
  const Eigen::Matrix3d heading =
      Eigen::AngleAxisd(rad(c.state.avatar.heading), Eigen::Vector3d::UnitZ()).toRotationMatrix();
  Eigen::Vector3d wrist = Eigen::Vector3d(c.state.avatar.x, c.state.avatar.y, 0.0) +
                          heading * Eigen::Vector3d(c.state.wrist.offset.x, c.state.wrist.offset.y, 0.0);
  wrist.z() = c.state.wrist.offset.z;
  const Eigen::Vector3d to = Eigen::Vector3d(bottle.position.x, bottle.position.y, bottle.position.z) - wrist;
  c.state.wrist.aim_azimuth =
      viia::normalize_degrees(deg(std::atan2(to.y(), to.x())) - c.state.avatar.heading + uniform(-12.0, 12.0));
  c.state.wrist.aim_elevation = deg(std::atan2(to.z(), std::hypot(to.x(), to.y()))) + uniform(-12.0, 12.0);
  c.state.wrist.rotation = uniform(-180.0, 180.0);
  c.state.tremor.azimuth_offset = uniform(-2.0, 2.0);
  c.state.tremor.elevation_offset = uniform(-2.0, 2.0);

  const auto chosen = tilt > 45.0 ? viia::control::GraspGesture::lateral_pinch
                                  : viia::control::GraspGesture::cylindrical_power;
  c.gesture = u(rng) < 0.1 ? viia::control::GraspGesture::spherical : chosen;
  return c;
}

// Rigid rotation of the whole scene about the arena origin.
inline viia::world::WorldState rotate_scene(viia::world::WorldState s, double angle_deg) {
  const Eigen::Matrix3d r = Eigen::AngleAxisd(rad(angle_deg), Eigen::Vector3d::UnitZ()).toRotationMatrix();
  auto rot = [&](viia::Vec3 v) {
    const Eigen::Vector3d w = r * Eigen::Vector3d(v.x, v.y, v.z);
    return viia::Vec3{w.x(), w.y(), w.z()};
  };
  const auto p = rot({s.avatar.x, s.avatar.y, 0.0});
  s.avatar.x = p.x;
  s.avatar.y = p.y;
  s.avatar.heading = viia::normalize_degrees(s.avatar.heading + angle_deg);
  for (auto& o : s.objects) {
    o.position = rot(o.position);
    o.principal_axis = rot(o.principal_axis);
  }
  return s;
}

// Chi-square test that, for each previous placement, the next placement is
// uniform over its allowed set. Returns the upper-tail p-value.
struct ChiSquare {
  double statistic = 0.0;
  double dof = 0.0;
  double p_value = 0.0;
};

inline ChiSquare placement_uniformity(const std::vector<int>& chain, int segment_count) {
  std::map<std::pair<int, int>, double> observed;
  std::map<int, double> from;
  for (std::size_t k = 1; k < chain.size(); ++k) {
    observed[{chain[k - 1], chain[k]}] += 1.0;
    from[chain[k - 1]] += 1.0;
  }
  ChiSquare c;
  for (const auto& [prev, n] : from) {
    std::vector<int> allowed;
    for (int i = 0; i < segment_count; ++i) {
      if (std::abs(i - prev) >= 2) allowed.push_back(i);
    }
    const double expected = n / static_cast<double>(allowed.size());
    for (int i : allowed) {
      const double o = observed.count({prev, i}) ? observed[{prev, i}] : 0.0;
      c.statistic += (o - expected) * (o - expected) / expected;
    }
    c.dof += static_cast<double>(allowed.size()) - 1.0;
  }
  c.p_value = boost::math::cdf(boost::math::complement(boost::math::chi_squared(c.dof), c.statistic));
  return c;
}

}  // namespace oracle

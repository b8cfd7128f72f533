#pragma once

#include <cmath>
#include <numbers>

namespace viia {

// Arena frame: +x along the fan bisector, +y to the walker's right, +z up.
// Planar angles are measured from +x toward +y, so a positive azimuth means
// "to the right of the listener".
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend constexpr Vec3 operator*(double s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
  friend constexpr Vec3 operator*(Vec3 v, double s) { return s * v; }
  constexpr Vec3& operator+=(Vec3 o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(Vec3 v) { return std::sqrt(dot(v, v)); }
inline double planar_norm(Vec3 v) { return std::hypot(v.x, v.y); }

inline Vec3 normalized(Vec3 v) {
  const double n = norm(v);
  return n > 0.0 ? (1.0 / n) * v : Vec3{};
}

constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

// Wraps an angle in degrees into (-180, 180].
inline double normalize_degrees(double deg) {
  double a = std::fmod(deg, 360.0);
  if (a <= -180.0) a += 360.0;
  if (a > 180.0) a -= 360.0;
  return a;
}

// Unsigned angle between two vectors in degrees, stable near 0 and 180.
inline double angle_between_deg(Vec3 a, Vec3 b) {
  return rad_to_deg(std::atan2(norm(cross(a, b)), dot(a, b)));
}

// Unit direction for a planar bearing and an elevation, both in degrees.
inline Vec3 direction_from_angles(double bearing_deg, double elevation_deg) {
  const double b = deg_to_rad(bearing_deg);
  const double e = deg_to_rad(elevation_deg);
  return {std::cos(e) * std::cos(b), std::cos(e) * std::sin(b), std::sin(e)};
}

inline Vec3 rotate_planar(Vec3 v, double angle_deg) {
  const double a = deg_to_rad(angle_deg);
  const double c = std::cos(a);
  const double s = std::sin(a);
  return {c * v.x - s * v.y, s * v.x + c * v.y, v.z};
}

}  // namespace viia

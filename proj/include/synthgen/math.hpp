// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace synthgen {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double radians(double deg) { return deg * kPi / 180.0; }
inline double degrees(double rad) { return rad * 180.0 / kPi; }

struct Vec2 {
  double x = 0, y = 0;
};

struct Vec3 {
  double x = 0, y = 0, z = 0;

  double& operator[](int i) { return (&x)[i]; }
  double operator[](int i) const { return (&x)[i]; }
};

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
inline Vec3 operator*(const Vec3& a, double s) { return {a.x * s, a.y * s, a.z * s}; }
inline Vec3 operator*(double s, const Vec3& a) { return a * s; }
inline Vec3 operator*(const Vec3& a, const Vec3& b) { return {a.x * b.x, a.y * b.y, a.z * b.z}; }
inline Vec3 operator/(const Vec3& a, double s) { return {a.x / s, a.y / s, a.z / s}; }
inline Vec3& operator+=(Vec3& a, const Vec3& b) { a = a + b; return a; }
inline Vec3& operator-=(Vec3& a, const Vec3& b) { a = a - b; return a; }
inline Vec3& operator*=(Vec3& a, double s) { a = a * s; return a; }
inline bool operator==(const Vec3& a, const Vec3& b) { return a.x == b.x && a.y == b.y && a.z == b.z; }
inline bool operator!=(const Vec3& a, const Vec3& b) { return !(a == b); }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double length_squared(const Vec3& a) { return dot(a, a); }
inline double length(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalize(const Vec3& a) {
  double len = length(a);
  return len > 0 ? a / len : Vec3{0, 0, 0};
}
inline Vec3 min(const Vec3& a, const Vec3& b) {
  return {std::min(a.x, b.x), std::min(a.y, b.y), std::min(a.z, b.z)};
}
inline Vec3 max(const Vec3& a, const Vec3& b) {
  return {std::max(a.x, b.x), std::max(a.y, b.y), std::max(a.z, b.z)};
}
inline double max_component(const Vec3& a) { return std::max(a.x, std::max(a.y, a.z)); }
inline bool is_finite(const Vec3& a) {
  return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z);
}

// Direction on the unit sphere from azimuth/elevation, z-up.
// azimuth 0 = +x, measured toward +y; elevation 90 deg = +z.
inline Vec3 direction_from_angles(double azimuth_rad, double elevation_rad) {
  double ce = std::cos(elevation_rad);
  return {ce * std::cos(azimuth_rad), ce * std::sin(azimuth_rad), std::sin(elevation_rad)};
}

// Elevation angle (rad) of a direction above the xy plane.
inline double elevation_of(const Vec3& dir) {
  double len = length(dir);
  return len > 0 ? std::asin(std::clamp(dir.z / len, -1.0, 1.0)) : 0.0;
}

// Column-major-free 3x3 matrix stored as rows.
struct Mat3 {
  Vec3 r0{1, 0, 0}, r1{0, 1, 0}, r2{0, 0, 1};

  static Mat3 identity() { return {}; }

  static Mat3 rotation_x(double a) {
    double c = std::cos(a), s = std::sin(a);
    return {{1, 0, 0}, {0, c, -s}, {0, s, c}};
  }
  static Mat3 rotation_y(double a) {
    double c = std::cos(a), s = std::sin(a);
    return {{c, 0, s}, {0, 1, 0}, {-s, 0, c}};
  }
  static Mat3 rotation_z(double a) {
    double c = std::cos(a), s = std::sin(a);
    return {{c, -s, 0}, {s, c, 0}, {0, 0, 1}};
  }

  Vec3 col(int i) const { return {r0[i], r1[i], r2[i]}; }
  Vec3& row(int i) { return i == 0 ? r0 : i == 1 ? r1 : r2; }
  const Vec3& row(int i) const { return i == 0 ? r0 : i == 1 ? r1 : r2; }
};

inline Vec3 operator*(const Mat3& m, const Vec3& v) {
  return {dot(m.r0, v), dot(m.r1, v), dot(m.r2, v)};
}
inline Mat3 operator*(const Mat3& a, const Mat3& b) {
  Mat3 m;
  for (int i = 0; i < 3; ++i) {
    Vec3 c = b.col(i);
    m.r0[i] = dot(a.r0, c);
    m.r1[i] = dot(a.r1, c);
    m.r2[i] = dot(a.r2, c);
  }
  return m;
}
inline Mat3 transpose(const Mat3& m) {
  return {m.col(0), m.col(1), m.col(2)};
}
inline bool operator==(const Mat3& a, const Mat3& b) {
  return a.r0 == b.r0 && a.r1 == b.r1 && a.r2 == b.r2;
}

// Extrinsic XYZ Euler rotation: R = Rz * Ry * Rx, angles in degrees.
inline Mat3 rotation_from_euler_deg(const Vec3& euler_deg) {
  return Mat3::rotation_z(radians(euler_deg.z)) * Mat3::rotation_y(radians(euler_deg.y)) *
         Mat3::rotation_x(radians(euler_deg.x));
}

// Rigid transform, rotation then translation.
struct Transform {
  Mat3 rotation;
  Vec3 translation;

  Vec3 point(const Vec3& p) const { return rotation * p + translation; }
  Vec3 vector(const Vec3& v) const { return rotation * v; }
};

inline Transform inverse(const Transform& t) {
  Mat3 rt = transpose(t.rotation);
  return {rt, -(rt * t.translation)};
}

struct Aabb {
  Vec3 lo{kInf, kInf, kInf};
  Vec3 hi{-kInf, -kInf, -kInf};

  void expand(const Vec3& p) {
    lo = min(lo, p);
    hi = max(hi, p);
  }
  void expand(const Aabb& b) {
    lo = min(lo, b.lo);
    hi = max(hi, b.hi);
  }
  bool empty() const { return lo.x > hi.x; }
  Vec3 center() const { return (lo + hi) * 0.5; }
  Vec3 half_extents() const { return (hi - lo) * 0.5; }
  bool overlaps(const Aabb& b) const {
    return lo.x <= b.hi.x && hi.x >= b.lo.x && lo.y <= b.hi.y && hi.y >= b.lo.y &&
           lo.z <= b.hi.z && hi.z >= b.lo.z;
  }
};

struct Ray {
  Vec3 origin;
  Vec3 direction;  // not required to be unit length
  double t_min = 1e-9;
  double t_max = kInf;
};

}  // namespace synthgen

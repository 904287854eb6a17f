// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>

#include "synthgen/errors.hpp"
#include "synthgen/math.hpp"
#include "synthgen/sampler.hpp"

namespace synthgen {

// Resolved camera basis in the z-up world. Pixel (i, j) maps to the ray
// direction f + px*right + py*down with px = (i + 0.5 - cx) / fx, so image
// rows grow downward while world z points up.
struct CameraFrame {
  Vec3 position;
  Vec3 forward, right, down;
  CameraIntrinsics intr;
  double fstop = 8;
  double focus_distance = 1;  // thin-lens focal plane, at the look-at point

  Vec3 pixel_direction(double i, double j) const {
    double px = (i - intr.cx) / intr.fx;
    double py = (j - intr.cy) / intr.fy;
    return forward + right * px + down * py;
  }
};

inline CameraFrame make_camera_frame(const CameraSpec& spec) {
  CameraFrame frame;
  frame.position = spec.position;
  Vec3 to_target = spec.look_at - spec.position;
  if (length_squared(to_target) == 0)
    throw ConfigError("camera position coincides with its look-at point");
  frame.forward = normalize(to_target);
  Vec3 up = spec.up;
  if (length_squared(cross(frame.forward, up)) < 1e-12) up = {0, 1, 0};  // looking straight up/down
  frame.right = normalize(cross(frame.forward, up));
  frame.down = cross(frame.forward, frame.right);
  frame.intr = spec.intrinsics;
  frame.fstop = spec.fstop;
  frame.focus_distance = length(to_target);
  return frame;
}

// Unjittered center ray for pixel (x, y); the geometric passes use this.
inline Ray center_ray(const CameraFrame& frame, int x, int y) {
  return Ray{frame.position, normalize(frame.pixel_direction(x + 0.5, y + 0.5))};
}

// Lens radius for the thin-lens model. The focal length in meters comes from
// the pixel focal length under a fixed 36 mm sensor-width assumption.
inline double lens_radius_m(const CameraFrame& frame) {
  double focal_m = frame.intr.fx * (0.036 / frame.intr.width);
  return focal_m / (2.0 * frame.fstop);
}

struct Plane {
  Vec3 normal;  // unit, points inside
  double offset;  // dot(normal, x) >= offset inside

  double distance(const Vec3& p) const { return dot(normal, p) - offset; }
};

// Five-plane frustum (near + four sides). A box fully outside any plane is
// culled; the test is conservative the other way.
inline std::array<Plane, 5> frustum_planes(const CameraFrame& frame, double near_clip = 1e-3) {
  std::array<Plane, 5> planes;
  planes[0] = {frame.forward, dot(frame.forward, frame.position) + near_clip};

  auto corner = [&](double i, double j) { return normalize(frame.pixel_direction(i, j)); };
  Vec3 c00 = corner(0, 0);
  Vec3 c10 = corner(frame.intr.width, 0);
  Vec3 c01 = corner(0, frame.intr.height);
  Vec3 c11 = corner(frame.intr.width, frame.intr.height);

  auto side = [&](const Vec3& a, const Vec3& b) {
    Vec3 n = normalize(cross(a, b));
    if (dot(n, frame.forward) < 0) n = -n;
    return Plane{n, dot(n, frame.position)};
  };
  planes[1] = side(c00, c01);  // left edge
  planes[2] = side(c11, c10);  // right edge
  planes[3] = side(c10, c00);  // top edge
  planes[4] = side(c01, c11);  // bottom edge
  return planes;
}

}  // namespace synthgen

// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "synthgen/math.hpp"
#include "synthgen/rng.hpp"

using synthgen::Mat3;
using synthgen::Vec3;

namespace {

bool approx_vec(const Vec3& a, const Vec3& b, double eps = 1e-12) {
  return std::abs(a.x - b.x) < eps && std::abs(a.y - b.y) < eps && std::abs(a.z - b.z) < eps;
}

}  // namespace

TEST_CASE("single-axis Euler rotations move the expected axes", "[math]") {
  // X by 90: +y -> +z. Y by 90: +z -> +x. Z by 90: +x -> +y.
  REQUIRE(approx_vec(synthgen::rotation_from_euler_deg({90, 0, 0}) * Vec3{0, 1, 0}, {0, 0, 1}));
  REQUIRE(approx_vec(synthgen::rotation_from_euler_deg({0, 90, 0}) * Vec3{0, 0, 1}, {1, 0, 0}));
  REQUIRE(approx_vec(synthgen::rotation_from_euler_deg({0, 0, 90}) * Vec3{1, 0, 0}, {0, 1, 0}));
}

TEST_CASE("Euler composition is extrinsic X then Y then Z", "[math]") {
  // (90, 90, 0) applied to +y: X-rotation sends it to +z, then Y-rotation
  // sends +z to +x.
  REQUIRE(approx_vec(synthgen::rotation_from_euler_deg({90, 90, 0}) * Vec3{0, 1, 0}, {1, 0, 0}));
  // Matrix equals the explicit product Rz * Ry * Rx.
  Mat3 expect = Mat3::rotation_z(synthgen::radians(30)) *
                Mat3::rotation_y(synthgen::radians(40)) * Mat3::rotation_x(synthgen::radians(50));
  Mat3 got = synthgen::rotation_from_euler_deg({50, 40, 30});
  for (int i = 0; i < 3; ++i) REQUIRE(approx_vec(got.row(i), expect.row(i)));
}

TEST_CASE("rotations are orthonormal", "[math]") {
  synthgen::Rng rng(1);
  for (int i = 0; i < 50; ++i) {
    Vec3 angles{rng.uniform(-180, 180), rng.uniform(-180, 180), rng.uniform(-180, 180)};
    Mat3 r = synthgen::rotation_from_euler_deg(angles);
    Mat3 id = synthgen::transpose(r) * r;
    REQUIRE(approx_vec(id.r0, {1, 0, 0}, 1e-10));
    REQUIRE(approx_vec(id.r1, {0, 1, 0}, 1e-10));
    REQUIRE(approx_vec(id.r2, {0, 0, 1}, 1e-10));
  }
}

TEST_CASE("transform inverse undoes point and vector maps", "[math]") {
  synthgen::Rng rng(2);
  for (int i = 0; i < 20; ++i) {
    synthgen::Transform t{
        synthgen::rotation_from_euler_deg(
            {rng.uniform(-180, 180), rng.uniform(-180, 180), rng.uniform(-180, 180)}),
        {rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)}};
    synthgen::Transform inv = synthgen::inverse(t);
    Vec3 p{rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)};
    REQUIRE(approx_vec(inv.point(t.point(p)), p, 1e-10));
    REQUIRE(approx_vec(inv.vector(t.vector(p)), p, 1e-10));
  }
}

TEST_CASE("direction_from_angles uses z-up spherical coordinates", "[math]") {
  REQUIRE(approx_vec(synthgen::direction_from_angles(0, 0), {1, 0, 0}));
  REQUIRE(approx_vec(synthgen::direction_from_angles(synthgen::radians(90), 0), {0, 1, 0}));
  REQUIRE(approx_vec(synthgen::direction_from_angles(0, synthgen::radians(90)), {0, 0, 1}));
  REQUIRE(approx_vec(synthgen::direction_from_angles(0, synthgen::radians(-90)), {0, 0, -1}));
  // Elevation recovers itself.
  Vec3 d = synthgen::direction_from_angles(synthgen::radians(123), synthgen::radians(37));
  REQUIRE(synthgen::degrees(synthgen::elevation_of(d)) == Catch::Approx(37).margin(1e-10));
}

TEST_CASE("matrix rows and columns agree", "[math]") {
  Mat3 m{{1, 2, 3}, {4, 5, 6}, {7, 8, 9}};
  REQUIRE(approx_vec(m.col(0), {1, 4, 7}));
  REQUIRE(approx_vec(m.row(1), {4, 5, 6}));
  Mat3 t = synthgen::transpose(m);
  REQUIRE(approx_vec(t.row(0), {1, 4, 7}));
}

TEST_CASE("aabb expansion and overlap", "[math]") {
  synthgen::Aabb box;
  REQUIRE(box.empty());
  box.expand(Vec3{1, 2, 3});
  box.expand(Vec3{-1, 0, 5});
  REQUIRE(!box.empty());
  REQUIRE(approx_vec(box.lo, {-1, 0, 3}));
  REQUIRE(approx_vec(box.hi, {1, 2, 5}));
  REQUIRE(approx_vec(box.center(), {0, 1, 4}));

  synthgen::Aabb other;
  other.expand(Vec3{1, 2, 5});
  REQUIRE(box.overlaps(other));  // touching counts as overlap
  synthgen::Aabb far_box;
  far_box.expand(Vec3{10, 10, 10});
  REQUIRE(!box.overlaps(far_box));
}

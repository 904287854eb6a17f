// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "synthgen/errors.hpp"
#include "synthgen/math.hpp"
#include "synthgen/rng.hpp"

namespace synthgen {

// Triangle mesh in meters. category_id 0 is reserved for background and
// distractor geometry; annotated target classes use ids >= 1.
struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<uint32_t, 3>> triangles;
  std::vector<Vec3> normals;  // per vertex, unit length
  std::vector<Vec2> uvs;      // per vertex, optional (empty when absent)
  int category_id = 0;

  bool has_uvs() const { return !uvs.empty(); }
  size_t vertex_count() const { return vertices.size(); }
  size_t triangle_count() const { return triangles.size(); }
};

inline Aabb mesh_bounds(const Mesh& mesh) {
  Aabb box;
  for (const auto& v : mesh.vertices) box.expand(v);
  return box;
}

inline double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * length(cross(b - a, c - a));
}

inline double surface_area(const Mesh& mesh) {
  double area = 0;
  for (const auto& t : mesh.triangles)
    area += triangle_area(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
  return area;
}

// Bounding sphere: centered at the AABB center, radius to the farthest vertex.
inline double bounding_sphere_radius(const Mesh& mesh, Vec3* center_out = nullptr) {
  Aabb box = mesh_bounds(mesh);
  Vec3 c = box.empty() ? Vec3{0, 0, 0} : box.center();
  double r2 = 0;
  for (const auto& v : mesh.vertices) r2 = std::max(r2, length_squared(v - c));
  if (center_out) *center_out = c;
  return std::sqrt(r2);
}

// Area-weighted vertex normals; used when a source file carries none.
inline void compute_vertex_normals(Mesh& mesh) {
  mesh.normals.assign(mesh.vertices.size(), Vec3{0, 0, 0});
  for (const auto& t : mesh.triangles) {
    Vec3 n = cross(mesh.vertices[t[1]] - mesh.vertices[t[0]],
                   mesh.vertices[t[2]] - mesh.vertices[t[0]]);
    mesh.normals[t[0]] += n;
    mesh.normals[t[1]] += n;
    mesh.normals[t[2]] += n;
  }
  for (auto& n : mesh.normals) {
    n = normalize(n);
    if (length_squared(n) == 0) n = {0, 0, 1};
  }
}

// Drops degenerate (zero-area) triangles and out-of-range indices are an
// error; normalizes normals. Every loader funnels through here.
inline void finalize_mesh(Mesh& mesh, const std::string& source) {
  for (const auto& t : mesh.triangles)
    for (uint32_t idx : t)
      if (idx >= mesh.vertices.size())
        throw DataError(source + ": triangle references vertex " + std::to_string(idx) +
                        " past vertex count " + std::to_string(mesh.vertices.size()));
  std::vector<std::array<uint32_t, 3>> kept;
  kept.reserve(mesh.triangles.size());
  for (const auto& t : mesh.triangles)
    if (triangle_area(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]) > 0)
      kept.push_back(t);
  mesh.triangles = std::move(kept);
  if (mesh.vertices.empty() || mesh.triangles.empty())
    throw DataError(source + ": mesh has no usable geometry");
  if (mesh.normals.size() != mesh.vertices.size())
    compute_vertex_normals(mesh);
  else
    for (auto& n : mesh.normals) {
      n = normalize(n);
      if (length_squared(n) == 0) n = {0, 0, 1};
    }
  if (!mesh.uvs.empty() && mesh.uvs.size() != mesh.vertices.size())
    throw DataError(source + ": per-vertex UV count does not match vertex count");
}

inline void scale_mesh(Mesh& mesh, double scale) {
  for (auto& v : mesh.vertices) v *= scale;
}

// Concatenates sub-meshes of one object into a single mesh; geometry is
// bit-preserved, indices offset.
inline Mesh merge_children(const std::vector<Mesh>& meshes) {
  if (meshes.empty()) throw DataError("merge_children: empty mesh list");
  for (const auto& m : meshes)
    if (m.category_id != meshes.front().category_id)
      throw DataError("merge_children: mixed category ids " +
                      std::to_string(meshes.front().category_id) + " and " +
                      std::to_string(m.category_id));
  bool all_uvs = true;
  for (const auto& m : meshes) all_uvs = all_uvs && m.has_uvs();

  Mesh out;
  out.category_id = meshes.front().category_id;
  for (const auto& m : meshes) {
    uint32_t base = static_cast<uint32_t>(out.vertices.size());
    out.vertices.insert(out.vertices.end(), m.vertices.begin(), m.vertices.end());
    out.normals.insert(out.normals.end(), m.normals.begin(), m.normals.end());
    if (all_uvs) out.uvs.insert(out.uvs.end(), m.uvs.begin(), m.uvs.end());
    for (const auto& t : m.triangles)
      out.triangles.push_back({t[0] + base, t[1] + base, t[2] + base});
  }
  return out;
}

// Object-aligned collision proxy. Orientation is identity in the mesh local
// frame; instances carry the world pose.
struct ProxyBox {
  Vec3 center;
  Vec3 half_extents;  // componentwise > 0
  Mat3 orientation;
};

inline constexpr double kMinProxyHalfExtent = 1e-4;  // m, floor for flat parts

inline ProxyBox compute_proxy_box(const Mesh& mesh) {
  if (mesh.vertices.empty()) throw DataError("compute_proxy_box: empty mesh");
  Aabb box = mesh_bounds(mesh);
  Vec3 he = box.half_extents();
  he.x = std::max(he.x, kMinProxyHalfExtent);
  he.y = std::max(he.y, kMinProxyHalfExtent);
  he.z = std::max(he.z, kMinProxyHalfExtent);
  return {box.center(), he, Mat3::identity()};
}

// ---------------------------------------------------------------------------
// Fake-model synthesis: displace vertices along their normals by a smooth
// value-noise field. Topology, UVs and textures are untouched; the result is
// never annotated (category forced to 0).

namespace noisedetail {

inline double lattice_value(uint64_t seed, int64_t x, int64_t y, int64_t z) {
  uint64_t h = rngdetail::splitmix64(seed ^ rngdetail::splitmix64(
                   static_cast<uint64_t>(x) * 0x8DA6B343ull ^
                   static_cast<uint64_t>(y) * 0xD8163841ull ^
                   static_cast<uint64_t>(z) * 0xCB1AB31Full));
  // Map to [-1, 1].
  return static_cast<double>(h >> 11) * 0x1.0p-52 - 1.0;
}

inline double smooth(double t) { return t * t * (3 - 2 * t); }

inline double value_noise(uint64_t seed, const Vec3& p) {
  double fx = std::floor(p.x), fy = std::floor(p.y), fz = std::floor(p.z);
  int64_t ix = static_cast<int64_t>(fx), iy = static_cast<int64_t>(fy),
          iz = static_cast<int64_t>(fz);
  double tx = smooth(p.x - fx), ty = smooth(p.y - fy), tz = smooth(p.z - fz);
  double c[2][2][2];
  for (int dz = 0; dz < 2; ++dz)
    for (int dy = 0; dy < 2; ++dy)
      for (int dx = 0; dx < 2; ++dx)
        c[dz][dy][dx] = lattice_value(seed, ix + dx, iy + dy, iz + dz);
  auto lerp = [](double a, double b, double t) { return a + (b - a) * t; };
  double x00 = lerp(c[0][0][0], c[0][0][1], tx);
  double x01 = lerp(c[0][1][0], c[0][1][1], tx);
  double x10 = lerp(c[1][0][0], c[1][0][1], tx);
  double x11 = lerp(c[1][1][0], c[1][1][1], tx);
  double y0 = lerp(x00, x01, ty);
  double y1 = lerp(x10, x11, ty);
  return lerp(y0, y1, tz);
}

// 3 octaves, amplitudes 1, 1/2, 1/4, normalized so the result lies in [-1, 1].
inline double fractal_noise(uint64_t seed, const Vec3& p) {
  double sum = 0, amp = 1, norm = 0;
  Vec3 q = p;
  for (int octave = 0; octave < 3; ++octave) {
    sum += amp * value_noise(seed + static_cast<uint64_t>(octave), q);
    norm += amp;
    amp *= 0.5;
    q *= 2.0;
  }
  return sum / norm;
}

}  // namespace noisedetail

// amplitude is a fraction of the mesh bounding-sphere radius; the per-vertex
// displacement magnitude never exceeds amplitude * radius.
inline Mesh make_fake_model(const Mesh& mesh, double amplitude, uint64_t seed) {
  Mesh out = mesh;
  out.category_id = 0;
  if (amplitude <= 0) return out;

  Vec3 center;
  double radius = bounding_sphere_radius(mesh, &center);
  if (radius <= 0) return out;
  double max_disp = amplitude * radius;
  double freq = 2.0 / radius;  // a couple of noise cells across the object
  for (size_t i = 0; i < out.vertices.size(); ++i) {
    double n = noisedetail::fractal_noise(seed, (out.vertices[i] - center) * freq);
    out.vertices[i] += out.normals[i] * (max_disp * n);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Procedural primitives (plane geometry and test fixtures).

inline Mesh make_box(const Vec3& half_extents, int category_id = 0) {
  Mesh m;
  m.category_id = category_id;
  const Vec3& h = half_extents;
  // 24 vertices, 4 per face, so each face keeps its own flat normal and UVs.
  struct Face {
    Vec3 normal, u_axis, v_axis;
  };
  const Face faces[6] = {
      {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}},  {{-1, 0, 0}, {0, -1, 0}, {0, 0, 1}},
      {{0, 1, 0}, {-1, 0, 0}, {0, 0, 1}}, {{0, -1, 0}, {1, 0, 0}, {0, 0, 1}},
      {{0, 0, 1}, {1, 0, 0}, {0, 1, 0}},  {{0, 0, -1}, {1, 0, 0}, {0, -1, 0}}};
  for (const auto& f : faces) {
    uint32_t base = static_cast<uint32_t>(m.vertices.size());
    Vec3 n = f.normal * h;   // face center
    Vec3 uu = f.u_axis * h;  // in-plane half edges
    Vec3 vv = f.v_axis * h;
    for (int corner = 0; corner < 4; ++corner) {
      double su = (corner == 1 || corner == 2) ? 1 : -1;
      double sv = (corner >= 2) ? 1 : -1;
      m.vertices.push_back(n + uu * su + vv * sv);
      m.normals.push_back(f.normal);
      m.uvs.push_back({(su + 1) * 0.5, (sv + 1) * 0.5});
    }
    m.triangles.push_back({base, base + 1, base + 2});
    m.triangles.push_back({base, base + 2, base + 3});
  }
  return m;
}

inline Mesh make_unit_cube(int category_id = 0) {
  return make_box({0.5, 0.5, 0.5}, category_id);
}

// UV sphere; poles at +-z.
inline Mesh make_sphere(double radius, int segments, int rings, int category_id = 0) {
  Mesh m;
  m.category_id = category_id;
  for (int r = 0; r <= rings; ++r) {
    double theta = kPi * r / rings;  // 0 at +z pole
    for (int s = 0; s <= segments; ++s) {
      double phi = 2 * kPi * s / segments;
      Vec3 n{std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
      m.vertices.push_back(n * radius);
      m.normals.push_back(n);
      m.uvs.push_back({static_cast<double>(s) / segments, static_cast<double>(r) / rings});
    }
  }
  auto index = [&](int r, int s) { return static_cast<uint32_t>(r * (segments + 1) + s); };
  for (int r = 0; r < rings; ++r)
    for (int s = 0; s < segments; ++s) {
      uint32_t a = index(r, s), b = index(r + 1, s), c = index(r + 1, s + 1), d = index(r, s + 1);
      // Cap rows drop the triangle whose two vertices coincide at the pole:
      // (a, c, d) is degenerate on the top row, (a, b, c) on the bottom row.
      if (r != rings - 1) m.triangles.push_back({a, b, c});
      if (r != 0) m.triangles.push_back({a, c, d});
    }
  finalize_mesh(m, "make_sphere");
  return m;
}

// Square ground plane at z = 0 facing +z.
inline Mesh make_ground_plane(double size) {
  Mesh m;
  double h = size * 0.5;
  m.vertices = {{-h, -h, 0}, {h, -h, 0}, {h, h, 0}, {-h, h, 0}};
  m.normals = {{0, 0, 1}, {0, 0, 1}, {0, 0, 1}, {0, 0, 1}};
  m.uvs = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  m.triangles = {{0, 1, 2}, {0, 2, 3}};
  return m;
}

}  // namespace synthgen

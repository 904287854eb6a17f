// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

// Shared test fixtures: scratch directories, tiny procedural assets, and a
// known-good config that references them.

#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "synthgen/hdri.hpp"
#include "synthgen/image.hpp"
#include "synthgen/mesh.hpp"
#include "synthgen/io.hpp"

namespace testfix {

// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::string pattern =
        (std::filesystem::temp_directory_path() / "synthgen_test_XXXXXX").string();
    std::string buf = pattern;
    if (!mkdtemp(buf.data())) throw std::runtime_error("mkdtemp failed: " + pattern);
    path_ = buf;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline std::string obj_text(const synthgen::Mesh& mesh) {
  std::ostringstream out;
  out.precision(17);
  for (const auto& v : mesh.vertices) out << "v " << v.x << " " << v.y << " " << v.z << "\n";
  for (const auto& n : mesh.normals) out << "vn " << n.x << " " << n.y << " " << n.z << "\n";
  for (const auto& t : mesh.uvs) out << "vt " << t.x << " " << t.y << "\n";
  bool has_n = !mesh.normals.empty(), has_t = !mesh.uvs.empty();
  for (const auto& f : mesh.triangles) {
    out << "f";
    for (int k = 0; k < 3; ++k) {
      uint32_t i = f[k] + 1;
      out << " " << i;
      if (has_t && has_n)
        out << "/" << i << "/" << i;
      else if (has_t)
        out << "/" << i;
      else if (has_n)
        out << "//" << i;
    }
    out << "\n";
  }
  return out.str();
}

inline void write_obj(const std::string& path, const synthgen::Mesh& mesh) {
  synthgen::write_text_file(path, obj_text(mesh));
}

// Equirectangular gradient sky with power-of-two radiances so the RGBE file
// round-trips exactly: rows step through {2, 1, 0.5, 0.25} by quarter.
inline synthgen::HdriMap gradient_hdri(int width, int height) {
  synthgen::HdriMap map;
  map.width = width;
  map.height = height;
  map.pixels.assign(3u * width * height, 0.f);
  for (int y = 0; y < height; ++y) {
    float value = std::ldexp(2.f, -(4 * y / height));
    for (int x = 0; x < width; ++x) {
      size_t i = 3u * (static_cast<size_t>(y) * width + x);
      map.pixels[i + 0] = value;
      map.pixels[i + 1] = value * 0.5f;
      map.pixels[i + 2] = value * 0.25f;
    }
  }
  return map;
}

inline void write_checker_png(const std::string& path, int size = 8) {
  synthgen::ImageRgb8 img{size, size, {}};
  img.pixels.resize(3u * size * size);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      uint8_t v = ((x + y) % 2) ? 220 : 40;
      size_t i = 3u * (static_cast<size_t>(y) * size + x);
      img.pixels[i] = v;
      img.pixels[i + 1] = v;
      img.pixels[i + 2] = v;
    }
  synthgen::write_png_rgb8(path, img);
}

// Writes cube.obj, ball.obj, checker.png, and sky.hdr into `dir`.
inline void write_fixture_assets(const std::filesystem::path& dir) {
  write_obj((dir / "cube.obj").string(),
            synthgen::make_box({0.12, 0.12, 0.12}, 1));
  write_obj((dir / "ball.obj").string(), synthgen::make_sphere(0.1, 24, 12, 0));
  write_checker_png((dir / "checker.png").string());
  synthgen::write_hdr_rgbe((dir / "sky.hdr").string(), gradient_hdri(32, 16));
}

// Minimal but complete config exercising the fixture assets. Small frames,
// low spp, physics on.
inline nlohmann::json base_config() {
  return nlohmann::json{
      {"scene_count", 2},
      {"seed", 7},
      {"physics_enabled", true},
      {"background_light_scale", {0.4, 0.4}},
      {"min_visible_pixels", 4},
      {"anchor", {{"center", {0.0, 0.0, 0.3}}, {"radius", {0.0, 0.05}}}},
      {"camera",
       {{"elevation", {30, 60}}, {"distance", {1.0, 1.2}}, {"resolution", {96, 96}},
        {"dof_enabled", false}}},
      {"lights", {{"intensity", {40, 80}}, {"size", 0.4}}},
      {"spawn",
       {{"target_count", {1, 1}},
        {"distractor_count", {1, 1}},
        {"fake_count", {0, 0}},
        {"position_offset",
         {{"x", {-0.15, 0.15}}, {"y", {-0.15, 0.15}}, {"z", {0.05, 0.25}}}}}},
      {"assets",
       {{"targets",
         {{{"path", "cube.obj"}, {"name", "cube"}, {"category_id", 1}}}},
        {"distractors", {{{"path", "ball.obj"}}}},
        {"hdri", {"sky.hdr"}},
        {"plane_materials",
         {{{"base_color", {0.6, 0.6, 0.6}}, {"roughness", 0.9}, {"texture", "checker.png"}}}}}},
      {"render", {{"spp", 4}, {"max_depth", 3}}}};
}

inline std::string read_bytes(const std::string& path) {
  return synthgen::read_text_file(path);
}

inline uint64_t hash_bytes(const std::string& bytes) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline uint64_t hash_file(const std::string& path) { return hash_bytes(read_bytes(path)); }

}  // namespace testfix

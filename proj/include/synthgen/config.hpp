// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

// Generation configuration: every randomizable parameter of a run plus
// output and determinism settings. The JSON grammar and the units of every
// field are documented in docs/config.md.

#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "synthgen/errors.hpp"
#include "synthgen/math.hpp"

namespace synthgen {

// Closed interval [min, max]. A point range (min == max) pins the value.
struct ScalarRange {
  double min = 0;
  double max = 0;

  bool operator==(const ScalarRange&) const = default;
  bool is_point() const { return min == max; }
  bool valid() const { return std::isfinite(min) && std::isfinite(max) && min <= max; }
};

inline ScalarRange point_range(double v) { return {v, v}; }

struct AxisRanges {
  ScalarRange x, y, z;
  bool operator==(const AxisRanges&) const = default;
};

struct AnchorConfig {
  Vec3 center{0, 0, 0.5};            // m
  ScalarRange radius{0, 0};          // m
  ScalarRange elevation{-90, 90};    // deg
  bool operator==(const AnchorConfig&) const = default;
};

struct CameraConfig {
  ScalarRange elevation{15, 75};            // deg, camera-to-anchor angle
  ScalarRange distance{1.0, 1.5};           // m
  ScalarRange fstop{2.8, 16};               // common photographic stop range
  ScalarRange intrinsics_jitter{-0.05, 0.05};  // fractional, multiplicative
  bool intrinsics_randomization = false;
  int width = 512;
  int height = 512;
  std::optional<double> focal_length_px;    // default: image width
  bool dof_enabled = true;
  bool operator==(const CameraConfig&) const = default;
};

struct LightConfig {
  ScalarRange distance{1.0, 2.0};     // m from anchor
  ScalarRange intensity{50, 200};     // W/m^2 irradiance
  double exponent = 1.0;              // falloff factor e; e = 1 is uniform
  bool color_randomization = false;
  double size = 0.5;                  // area light edge length, m
  bool operator==(const LightConfig&) const = default;
};

struct SpawnConfig {
  ScalarRange target_count{1, 1};
  ScalarRange distractor_count{0, 0};
  ScalarRange fake_count{0, 0};
  AxisRanges position_offset{{-0.2, 0.2}, {-0.2, 0.2}, {0.0, 0.3}};  // m from anchor
  AxisRanges orientation{{-180, 180}, {-180, 180}, {-180, 180}};     // deg Euler
  double fake_amplitude = 0.1;  // deformation, fraction of bounding-sphere radius
  bool operator==(const SpawnConfig&) const = default;
};

struct TargetAssetConfig {
  std::string path;
  std::string name;      // category name; defaults to file stem
  int category_id = 1;
  double scale = 1.0;
  int copies = 1;
  bool join_children = true;
  bool operator==(const TargetAssetConfig&) const = default;
};

struct DistractorAssetConfig {
  std::string path;
  double scale = 1.0;
  int copies = 1;
  bool join_children = true;
  bool operator==(const DistractorAssetConfig&) const = default;
};

struct PlaneMaterialConfig {
  Vec3 base_color{0.5, 0.5, 0.5};
  double roughness = 0.8;
  double metallic = 0.0;
  std::optional<std::string> texture;
  bool operator==(const PlaneMaterialConfig&) const = default;
};

struct AssetsConfig {
  std::vector<TargetAssetConfig> targets;
  std::vector<DistractorAssetConfig> distractors;
  std::vector<std::string> hdri;
  std::vector<PlaneMaterialConfig> plane_materials;
  bool plane_enabled = true;
  double plane_size = 10.0;  // m, square ground plane at z = 0
  bool operator==(const AssetsConfig&) const = default;
};

struct RenderConfig {
  int spp = 16;
  int max_depth = 4;
  int tile_size = 32;
  double clamp = 0.0;  // per-sample radiance clamp; 0 selects the automatic bound
  bool operator==(const RenderConfig&) const = default;
};

inline const std::set<std::string>& known_passes() {
  static const std::set<std::string> passes = {"rgb", "depth", "normal", "instance_seg",
                                               "semantic_seg"};
  return passes;
}

struct GenerationConfig {
  int scene_count = 1;   // n
  int render_start = 0;  // f_s
  int render_end = 0;    // f_e
  uint64_t seed = 0;
  std::set<std::string> output_passes = known_passes();
  bool physics_enabled = false;
  ScalarRange background_light_scale{1.0, 1.0};  // s, multiplies HDRI radiance
  int hdri_batch_size = 1;
  bool random_pbr_materials = false;
  int min_visible_pixels = 16;
  AnchorConfig anchor;
  CameraConfig camera;
  LightConfig lights;
  SpawnConfig spawn;
  AssetsConfig assets;
  RenderConfig render;

  bool operator==(const GenerationConfig&) const = default;

  double nominal_focal_px() const {
    return focal_override_or(static_cast<double>(camera.width));
  }

 private:
  double focal_override_or(double fallback) const {
    return camera.focal_length_px ? *camera.focal_length_px : fallback;
  }
};

struct ConfigViolation {
  std::string field;
  std::string message;

  std::string str() const { return field + ": " + message; }
};

// ---------------------------------------------------------------------------
// Validation

inline std::vector<ConfigViolation> validate_config(const GenerationConfig& cfg) {
  std::vector<ConfigViolation> v;
  auto bad = [&](const std::string& field, const std::string& msg) {
    v.push_back({field, msg});
  };
  auto check_range = [&](const ScalarRange& r, const std::string& field) {
    if (!r.valid()) bad(field, "range must be finite with min <= max");
    return r.valid();
  };
  auto check_nonneg_range = [&](const ScalarRange& r, const std::string& field) {
    if (check_range(r, field) && r.min < 0) bad(field, "range min must be >= 0");
  };
  auto check_band = [&](const ScalarRange& r, const std::string& field, double lo, double hi) {
    if (check_range(r, field) && (r.min < lo || r.max > hi))
      bad(field, "range must lie within [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  };

  if (cfg.scene_count < 1) bad("scene_count", "must be >= 1");
  if (!(0 <= cfg.render_start && cfg.render_start <= cfg.render_end &&
        cfg.render_end <= cfg.scene_count - 1))
    bad("render_start/render_end",
        "frame interval must satisfy 0 <= render_start <= render_end <= scene_count - 1");

  for (const auto& p : cfg.output_passes)
    if (!known_passes().count(p)) bad("output_passes", "unknown pass '" + p + "'");

  check_nonneg_range(cfg.background_light_scale, "background_light_scale");
  if (cfg.hdri_batch_size < 1) bad("hdri_batch_size", "must be >= 1");
  if (cfg.min_visible_pixels < 1) bad("min_visible_pixels", "must be >= 1");

  if (!is_finite(cfg.anchor.center)) bad("anchor.center", "must be finite");
  check_nonneg_range(cfg.anchor.radius, "anchor.radius");
  check_band(cfg.anchor.elevation, "anchor.elevation", -90, 90);

  check_band(cfg.camera.elevation, "camera.elevation", -90, 90);
  check_nonneg_range(cfg.camera.distance, "camera.distance");
  if (check_range(cfg.camera.fstop, "camera.fstop") && cfg.camera.fstop.min <= 0)
    bad("camera.fstop", "must be > 0");
  check_range(cfg.camera.intrinsics_jitter, "camera.intrinsics_jitter");
  if (cfg.camera.width < 1 || cfg.camera.height < 1)
    bad("camera.resolution", "must be >= 1 pixel in each dimension");
  if (cfg.camera.focal_length_px && *cfg.camera.focal_length_px <= 0)
    bad("camera.focal_length_px", "must be > 0");

  check_nonneg_range(cfg.lights.distance, "lights.distance");
  check_nonneg_range(cfg.lights.intensity, "lights.intensity");
  if (!(cfg.lights.exponent >= 0)) bad("lights.exponent", "must be >= 0");
  if (!(cfg.lights.size > 0)) bad("lights.size", "must be > 0");

  check_nonneg_range(cfg.spawn.target_count, "spawn.target_count");
  check_nonneg_range(cfg.spawn.distractor_count, "spawn.distractor_count");
  check_nonneg_range(cfg.spawn.fake_count, "spawn.fake_count");
  check_range(cfg.spawn.position_offset.x, "spawn.position_offset.x");
  check_range(cfg.spawn.position_offset.y, "spawn.position_offset.y");
  check_range(cfg.spawn.position_offset.z, "spawn.position_offset.z");
  check_band(cfg.spawn.orientation.x, "spawn.orientation.x", -180, 180);
  check_band(cfg.spawn.orientation.y, "spawn.orientation.y", -180, 180);
  check_band(cfg.spawn.orientation.z, "spawn.orientation.z", -180, 180);
  if (!(cfg.spawn.fake_amplitude >= 0)) bad("spawn.fake_amplitude", "must be >= 0");

  std::map<int, std::string> category_names;  // category ids are unique per class name
  for (size_t i = 0; i < cfg.assets.targets.size(); ++i) {
    const auto& t = cfg.assets.targets[i];
    std::string field = "assets.targets[" + std::to_string(i) + "]";
    if (t.path.empty()) bad(field + ".path", "must not be empty");
    if (t.category_id < 1) bad(field + ".category_id", "must be >= 1");
    if (!(t.scale > 0)) bad(field + ".scale", "must be > 0");
    if (t.copies < 1) bad(field + ".copies", "must be >= 1");
    std::string name = t.name.empty() ? std::filesystem::path(t.path).stem().string() : t.name;
    auto [it, inserted] = category_names.emplace(t.category_id, name);
    if (!inserted && it->second != name)
      bad(field + ".category_id",
          "category " + std::to_string(t.category_id) + " already maps to class '" + it->second +
              "'");
  }
  for (size_t i = 0; i < cfg.assets.distractors.size(); ++i) {
    const auto& d = cfg.assets.distractors[i];
    std::string field = "assets.distractors[" + std::to_string(i) + "]";
    if (d.path.empty()) bad(field + ".path", "must not be empty");
    if (!(d.scale > 0)) bad(field + ".scale", "must be > 0");
    if (d.copies < 1) bad(field + ".copies", "must be >= 1");
  }
  for (size_t i = 0; i < cfg.assets.plane_materials.size(); ++i) {
    const auto& m = cfg.assets.plane_materials[i];
    std::string field = "assets.plane_materials[" + std::to_string(i) + "]";
    auto in01 = [](double x) { return x >= 0 && x <= 1; };
    if (!in01(m.base_color.x) || !in01(m.base_color.y) || !in01(m.base_color.z))
      bad(field + ".base_color", "channels must lie within [0, 1]");
    if (!in01(m.roughness)) bad(field + ".roughness", "must lie within [0, 1]");
    if (!in01(m.metallic)) bad(field + ".metallic", "must lie within [0, 1]");
  }
  if (!(cfg.assets.plane_size > 0)) bad("assets.plane_size", "must be > 0");

  if (cfg.render.spp < 1) bad("render.spp", "must be >= 1");
  if (cfg.render.max_depth < 1) bad("render.max_depth", "must be >= 1");
  if (cfg.render.tile_size < 1) bad("render.tile_size", "must be >= 1");
  if (!(cfg.render.clamp >= 0)) bad("render.clamp", "must be >= 0");

  return v;
}

inline GenerationConfig default_config() { return {}; }

// ---------------------------------------------------------------------------
// JSON parsing

namespace cfgdetail {

using nlohmann::json;

[[noreturn]] inline void fail(const std::string& path, const std::string& msg) {
  throw ConfigError(path.empty() ? msg : path + ": " + msg);
}

inline void check_keys(const json& j, const std::string& path,
                       std::initializer_list<const char*> known) {
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : known)
      if (item.key() == k) { ok = true; break; }
    if (!ok) fail(path, "unknown key '" + item.key() + "'");
  }
}

inline double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

inline int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

inline bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected a boolean");
  return j.get<bool>();
}

inline std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

// A range is either [min, max] or a bare number (a point range).
inline ScalarRange as_range(const json& j, const std::string& path) {
  if (j.is_number()) return point_range(j.get<double>());
  if (!j.is_array() || j.size() != 2)
    fail(path, "expected [min, max] or a single number");
  return {as_number(j[0], path + "[0]"), as_number(j[1], path + "[1]")};
}

inline Vec3 as_vec3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) fail(path, "expected an array of 3 numbers");
  return {as_number(j[0], path + "[0]"), as_number(j[1], path + "[1]"),
          as_number(j[2], path + "[2]")};
}

template <typename F>
void if_present(const json& j, const char* key, F&& f) {
  if (auto it = j.find(key); it != j.end()) f(*it);
}

inline AxisRanges as_axis_ranges(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object with x/y/z ranges");
  check_keys(j, path, {"x", "y", "z"});
  AxisRanges r;
  if_present(j, "x", [&](const json& v) { r.x = as_range(v, path + ".x"); });
  if_present(j, "y", [&](const json& v) { r.y = as_range(v, path + ".y"); });
  if_present(j, "z", [&](const json& v) { r.z = as_range(v, path + ".z"); });
  return r;
}

}  // namespace cfgdetail

inline GenerationConfig parse_config_json(const nlohmann::json& root) {
  using namespace cfgdetail;
  if (!root.is_object()) fail("", "config root must be an object");
  check_keys(root, "",
             {"scene_count", "render_start", "render_end", "seed", "output_passes",
              "physics_enabled", "background_light_scale", "hdri_batch_size",
              "random_pbr_materials", "min_visible_pixels", "anchor", "camera", "lights",
              "spawn", "assets", "render"});

  GenerationConfig cfg = default_config();

  if_present(root, "scene_count", [&](const json& v) { cfg.scene_count = as_int(v, "scene_count"); });
  if_present(root, "render_start", [&](const json& v) { cfg.render_start = as_int(v, "render_start"); });
  if_present(root, "render_end", [&](const json& v) { cfg.render_end = as_int(v, "render_end"); });
  // Default render interval covers every scene unless pinned explicitly.
  if (!root.contains("render_end") && !root.contains("render_start"))
    cfg.render_end = cfg.scene_count - 1;
  if_present(root, "seed", [&](const json& v) {
    if (!v.is_number_integer()) fail("seed", "expected an integer");
    cfg.seed = v.get<uint64_t>();
  });
  if_present(root, "output_passes", [&](const json& v) {
    if (!v.is_array()) fail("output_passes", "expected an array of pass names");
    cfg.output_passes.clear();
    for (size_t i = 0; i < v.size(); ++i)
      cfg.output_passes.insert(as_string(v[i], "output_passes[" + std::to_string(i) + "]"));
  });
  if_present(root, "physics_enabled",
             [&](const json& v) { cfg.physics_enabled = as_bool(v, "physics_enabled"); });
  if_present(root, "background_light_scale", [&](const json& v) {
    cfg.background_light_scale = as_range(v, "background_light_scale");
  });
  if_present(root, "hdri_batch_size",
             [&](const json& v) { cfg.hdri_batch_size = as_int(v, "hdri_batch_size"); });
  if_present(root, "random_pbr_materials",
             [&](const json& v) { cfg.random_pbr_materials = as_bool(v, "random_pbr_materials"); });
  if_present(root, "min_visible_pixels",
             [&](const json& v) { cfg.min_visible_pixels = as_int(v, "min_visible_pixels"); });

  if_present(root, "anchor", [&](const json& a) {
    check_keys(a, "anchor", {"center", "radius", "elevation"});
    if_present(a, "center", [&](const json& v) { cfg.anchor.center = as_vec3(v, "anchor.center"); });
    if_present(a, "radius", [&](const json& v) { cfg.anchor.radius = as_range(v, "anchor.radius"); });
    if_present(a, "elevation",
               [&](const json& v) { cfg.anchor.elevation = as_range(v, "anchor.elevation"); });
  });

  if_present(root, "camera", [&](const json& c) {
    check_keys(c, "camera",
               {"elevation", "distance", "fstop", "intrinsics_jitter",
                "intrinsics_randomization", "resolution", "focal_length_px", "dof_enabled"});
    if_present(c, "elevation",
               [&](const json& v) { cfg.camera.elevation = as_range(v, "camera.elevation"); });
    if_present(c, "distance",
               [&](const json& v) { cfg.camera.distance = as_range(v, "camera.distance"); });
    if_present(c, "fstop", [&](const json& v) { cfg.camera.fstop = as_range(v, "camera.fstop"); });
    if_present(c, "intrinsics_jitter", [&](const json& v) {
      cfg.camera.intrinsics_jitter = as_range(v, "camera.intrinsics_jitter");
    });
    if_present(c, "intrinsics_randomization", [&](const json& v) {
      cfg.camera.intrinsics_randomization = as_bool(v, "camera.intrinsics_randomization");
    });
    if_present(c, "resolution", [&](const json& v) {
      if (!v.is_array() || v.size() != 2) fail("camera.resolution", "expected [width, height]");
      cfg.camera.width = as_int(v[0], "camera.resolution[0]");
      cfg.camera.height = as_int(v[1], "camera.resolution[1]");
    });
    if_present(c, "focal_length_px", [&](const json& v) {
      cfg.camera.focal_length_px = as_number(v, "camera.focal_length_px");
    });
    if_present(c, "dof_enabled",
               [&](const json& v) { cfg.camera.dof_enabled = as_bool(v, "camera.dof_enabled"); });
  });

  if_present(root, "lights", [&](const json& l) {
    check_keys(l, "lights", {"distance", "intensity", "exponent", "color_randomization", "size"});
    if_present(l, "distance",
               [&](const json& v) { cfg.lights.distance = as_range(v, "lights.distance"); });
    if_present(l, "intensity",
               [&](const json& v) { cfg.lights.intensity = as_range(v, "lights.intensity"); });
    if_present(l, "exponent",
               [&](const json& v) { cfg.lights.exponent = as_number(v, "lights.exponent"); });
    if_present(l, "color_randomization", [&](const json& v) {
      cfg.lights.color_randomization = as_bool(v, "lights.color_randomization");
    });
    if_present(l, "size", [&](const json& v) { cfg.lights.size = as_number(v, "lights.size"); });
  });

  if_present(root, "spawn", [&](const json& s) {
    check_keys(s, "spawn",
               {"target_count", "distractor_count", "fake_count", "position_offset",
                "orientation", "fake_amplitude"});
    if_present(s, "target_count",
               [&](const json& v) { cfg.spawn.target_count = as_range(v, "spawn.target_count"); });
    if_present(s, "distractor_count", [&](const json& v) {
      cfg.spawn.distractor_count = as_range(v, "spawn.distractor_count");
    });
    if_present(s, "fake_count",
               [&](const json& v) { cfg.spawn.fake_count = as_range(v, "spawn.fake_count"); });
    if_present(s, "position_offset", [&](const json& v) {
      cfg.spawn.position_offset = as_axis_ranges(v, "spawn.position_offset");
    });
    if_present(s, "orientation", [&](const json& v) {
      cfg.spawn.orientation = as_axis_ranges(v, "spawn.orientation");
    });
    if_present(s, "fake_amplitude", [&](const json& v) {
      cfg.spawn.fake_amplitude = as_number(v, "spawn.fake_amplitude");
    });
  });

  if_present(root, "assets", [&](const json& a) {
    check_keys(a, "assets",
               {"targets", "distractors", "hdri", "plane_materials", "plane_enabled",
                "plane_size"});
    if_present(a, "targets", [&](const json& v) {
      if (!v.is_array()) fail("assets.targets", "expected an array");
      for (size_t i = 0; i < v.size(); ++i) {
        std::string path = "assets.targets[" + std::to_string(i) + "]";
        const json& t = v[i];
        if (!t.is_object()) fail(path, "expected an object");
        check_keys(t, path, {"path", "name", "category_id", "scale", "copies", "join_children"});
        TargetAssetConfig tc;
        if_present(t, "path", [&](const json& x) { tc.path = as_string(x, path + ".path"); });
        if_present(t, "name", [&](const json& x) { tc.name = as_string(x, path + ".name"); });
        if_present(t, "category_id",
                   [&](const json& x) { tc.category_id = as_int(x, path + ".category_id"); });
        if_present(t, "scale", [&](const json& x) { tc.scale = as_number(x, path + ".scale"); });
        if_present(t, "copies", [&](const json& x) { tc.copies = as_int(x, path + ".copies"); });
        if_present(t, "join_children",
                   [&](const json& x) { tc.join_children = as_bool(x, path + ".join_children"); });
        cfg.assets.targets.push_back(std::move(tc));
      }
    });
    if_present(a, "distractors", [&](const json& v) {
      if (!v.is_array()) fail("assets.distractors", "expected an array");
      for (size_t i = 0; i < v.size(); ++i) {
        std::string path = "assets.distractors[" + std::to_string(i) + "]";
        const json& d = v[i];
        if (!d.is_object()) fail(path, "expected an object");
        check_keys(d, path, {"path", "scale", "copies", "join_children"});
        DistractorAssetConfig dc;
        if_present(d, "path", [&](const json& x) { dc.path = as_string(x, path + ".path"); });
        if_present(d, "scale", [&](const json& x) { dc.scale = as_number(x, path + ".scale"); });
        if_present(d, "copies", [&](const json& x) { dc.copies = as_int(x, path + ".copies"); });
        if_present(d, "join_children",
                   [&](const json& x) { dc.join_children = as_bool(x, path + ".join_children"); });
        cfg.assets.distractors.push_back(std::move(dc));
      }
    });
    if_present(a, "hdri", [&](const json& v) {
      if (!v.is_array()) fail("assets.hdri", "expected an array of file paths");
      for (size_t i = 0; i < v.size(); ++i)
        cfg.assets.hdri.push_back(as_string(v[i], "assets.hdri[" + std::to_string(i) + "]"));
    });
    if_present(a, "plane_materials", [&](const json& v) {
      if (!v.is_array()) fail("assets.plane_materials", "expected an array");
      for (size_t i = 0; i < v.size(); ++i) {
        std::string path = "assets.plane_materials[" + std::to_string(i) + "]";
        const json& m = v[i];
        if (!m.is_object()) fail(path, "expected an object");
        check_keys(m, path, {"base_color", "roughness", "metallic", "texture"});
        PlaneMaterialConfig mc;
        if_present(m, "base_color",
                   [&](const json& x) { mc.base_color = as_vec3(x, path + ".base_color"); });
        if_present(m, "roughness",
                   [&](const json& x) { mc.roughness = as_number(x, path + ".roughness"); });
        if_present(m, "metallic",
                   [&](const json& x) { mc.metallic = as_number(x, path + ".metallic"); });
        if_present(m, "texture", [&](const json& x) {
          if (!x.is_null()) mc.texture = as_string(x, path + ".texture");
        });
        cfg.assets.plane_materials.push_back(std::move(mc));
      }
    });
    if_present(a, "plane_enabled",
               [&](const json& v) { cfg.assets.plane_enabled = as_bool(v, "assets.plane_enabled"); });
    if_present(a, "plane_size",
               [&](const json& v) { cfg.assets.plane_size = as_number(v, "assets.plane_size"); });
  });

  if_present(root, "render", [&](const json& r) {
    check_keys(r, "render", {"spp", "max_depth", "tile_size", "clamp"});
    if_present(r, "spp", [&](const json& v) { cfg.render.spp = as_int(v, "render.spp"); });
    if_present(r, "max_depth",
               [&](const json& v) { cfg.render.max_depth = as_int(v, "render.max_depth"); });
    if_present(r, "tile_size",
               [&](const json& v) { cfg.render.tile_size = as_int(v, "render.tile_size"); });
    if_present(r, "clamp", [&](const json& v) { cfg.render.clamp = as_number(v, "render.clamp"); });
  });

  auto violations = validate_config(cfg);
  if (!violations.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& viol : violations) msg += "\n  " + viol.str();
    throw ConfigError(msg);
  }
  return cfg;
}

inline GenerationConfig parse_config(const std::string& text) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config syntax error: ") + e.what());
  }
  return parse_config_json(root);
}

// ---------------------------------------------------------------------------
// Serialization (inverse of parse_config; keys emitted in sorted order)

inline nlohmann::json to_json(const GenerationConfig& cfg) {
  using nlohmann::json;
  auto range = [](const ScalarRange& r) { return json::array({r.min, r.max}); };
  auto vec3 = [](const Vec3& v) { return json::array({v.x, v.y, v.z}); };
  auto axes = [&](const AxisRanges& a) {
    return json{{"x", range(a.x)}, {"y", range(a.y)}, {"z", range(a.z)}};
  };

  json j;
  j["scene_count"] = cfg.scene_count;
  j["render_start"] = cfg.render_start;
  j["render_end"] = cfg.render_end;
  j["seed"] = cfg.seed;
  j["output_passes"] = cfg.output_passes;
  j["physics_enabled"] = cfg.physics_enabled;
  j["background_light_scale"] = range(cfg.background_light_scale);
  j["hdri_batch_size"] = cfg.hdri_batch_size;
  j["random_pbr_materials"] = cfg.random_pbr_materials;
  j["min_visible_pixels"] = cfg.min_visible_pixels;
  j["anchor"] = {{"center", vec3(cfg.anchor.center)},
                 {"radius", range(cfg.anchor.radius)},
                 {"elevation", range(cfg.anchor.elevation)}};
  j["camera"] = {{"elevation", range(cfg.camera.elevation)},
                 {"distance", range(cfg.camera.distance)},
                 {"fstop", range(cfg.camera.fstop)},
                 {"intrinsics_jitter", range(cfg.camera.intrinsics_jitter)},
                 {"intrinsics_randomization", cfg.camera.intrinsics_randomization},
                 {"resolution", json::array({cfg.camera.width, cfg.camera.height})},
                 {"dof_enabled", cfg.camera.dof_enabled}};
  if (cfg.camera.focal_length_px) j["camera"]["focal_length_px"] = *cfg.camera.focal_length_px;
  j["lights"] = {{"distance", range(cfg.lights.distance)},
                 {"intensity", range(cfg.lights.intensity)},
                 {"exponent", cfg.lights.exponent},
                 {"color_randomization", cfg.lights.color_randomization},
                 {"size", cfg.lights.size}};
  j["spawn"] = {{"target_count", range(cfg.spawn.target_count)},
                {"distractor_count", range(cfg.spawn.distractor_count)},
                {"fake_count", range(cfg.spawn.fake_count)},
                {"position_offset", axes(cfg.spawn.position_offset)},
                {"orientation", axes(cfg.spawn.orientation)},
                {"fake_amplitude", cfg.spawn.fake_amplitude}};
  json targets = json::array();
  for (const auto& t : cfg.assets.targets) {
    json e = {{"path", t.path},          {"category_id", t.category_id},
              {"scale", t.scale},        {"copies", t.copies},
              {"join_children", t.join_children}};
    if (!t.name.empty()) e["name"] = t.name;
    targets.push_back(std::move(e));
  }
  json distractors = json::array();
  for (const auto& d : cfg.assets.distractors)
    distractors.push_back({{"path", d.path},
                           {"scale", d.scale},
                           {"copies", d.copies},
                           {"join_children", d.join_children}});
  json plane_materials = json::array();
  for (const auto& m : cfg.assets.plane_materials) {
    json e = {{"base_color", vec3(m.base_color)},
              {"roughness", m.roughness},
              {"metallic", m.metallic}};
    if (m.texture) e["texture"] = *m.texture;
    plane_materials.push_back(std::move(e));
  }
  j["assets"] = {{"targets", std::move(targets)},
                 {"distractors", std::move(distractors)},
                 {"hdri", cfg.assets.hdri},
                 {"plane_materials", std::move(plane_materials)},
                 {"plane_enabled", cfg.assets.plane_enabled},
                 {"plane_size", cfg.assets.plane_size}};
  j["render"] = {{"spp", cfg.render.spp},
                 {"max_depth", cfg.render.max_depth},
                 {"tile_size", cfg.render.tile_size},
                 {"clamp", cfg.render.clamp}};
  return j;
}

inline std::string serialize_config(const GenerationConfig& cfg) {
  return to_json(cfg).dump(2) + "\n";
}

}  // namespace synthgen

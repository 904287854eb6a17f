// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

// Scene sampling: resolves the randomized state of every frame up front.
// Each subsystem draws from its own counter-based stream keyed by
// (seed, frame, tag), so frame k is reproducible in isolation and no draw in
// frame i can shift a draw in frame j.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "synthgen/catalog.hpp"
#include "synthgen/config.hpp"
#include "synthgen/errors.hpp"
#include "synthgen/math.hpp"
#include "synthgen/rng.hpp"

namespace synthgen {

struct AnchorSpec {
  Vec3 position{0, 0, 0};
  double yaw_deg = 0;  // rotation is uniform over yaw only

  Mat3 rotation() const { return Mat3::rotation_z(radians(yaw_deg)); }
};

struct CameraIntrinsics {
  double fx = 0, fy = 0;  // px
  double cx = 0, cy = 0;  // px
  int width = 0, height = 0;

  bool operator==(const CameraIntrinsics&) const = default;
};

struct CameraSpec {
  Vec3 position{0, 0, 0};
  Vec3 look_at{0, 0, 0};
  Vec3 up{0, 0, 1};
  CameraIntrinsics intrinsics;
  double fstop = 8;
};

struct LightSpec {
  Vec3 position{0, 0, 0};
  Vec3 target{0, 0, 0};  // light points at the anchor
  double intensity = 0;  // W/m^2
  Vec3 color{1, 1, 1};
  double size = 0.5;  // square edge, m
};

struct LightRig {
  LightSpec key, fill, rim;

  const LightSpec& light(int i) const { return i == 0 ? key : i == 1 ? fill : rim; }
};

struct ObjectInstanceSpec {
  AssetRole role = AssetRole::kTarget;
  int asset_index = 0;  // into the role's catalog pool
  Vec3 offset{0, 0, 0};  // p, world axes; position = anchor + p
  Vec3 position{0, 0, 0};
  Vec3 orientation_deg{0, 0, 0};  // extrinsic XYZ Euler
  int instance_id = 1;
  std::optional<Transform> rest_pose;  // world pose after settling, when run
};

// World transform the renderer and exporters use: the settled pose when
// physics ran, the sampled pose otherwise.
inline Transform instance_transform(const ObjectInstanceSpec& inst) {
  if (inst.rest_pose) return *inst.rest_pose;
  return {rotation_from_euler_deg(inst.orientation_deg), inst.position};
}

struct PhysicsOutcome {
  bool enabled = false;
  bool converged = true;         // rest speeds reached within max_steps
  bool penetration_free = true;  // residual penetration within tolerance
  int steps = 0;
};

struct SceneSpec {
  int frame_index = 0;
  AnchorSpec anchor;
  CameraSpec camera;
  LightRig lights;
  int hdri_index = -1;             // -1 when no environment map is used
  double background_scale = 1.0;  // s, multiplies HDRI radiance
  int plane_material_index = -1;  // -1 when the plane is disabled
  std::vector<ObjectInstanceSpec> instances;
  PhysicsOutcome physics;
  std::vector<std::string> warnings;  // dropped instances, non-convergence
};

// ---------------------------------------------------------------------------
// Individual samplers. Draw order within each function is part of the
// reproducibility contract and must not be reordered.

inline AnchorSpec sample_anchor(const GenerationConfig& cfg, Rng& rng) {
  AnchorSpec anchor;
  double radius = rng.uniform(cfg.anchor.radius.min, cfg.anchor.radius.max);
  double azimuth = rng.uniform(0.0, 360.0);
  double elevation = rng.uniform(cfg.anchor.elevation.min, cfg.anchor.elevation.max);
  anchor.position =
      cfg.anchor.center + direction_from_angles(radians(azimuth), radians(elevation)) * radius;
  anchor.yaw_deg = rng.uniform(0.0, 360.0);
  return anchor;
}

inline CameraSpec sample_camera(const GenerationConfig& cfg, const AnchorSpec& anchor, Rng& rng) {
  if (cfg.camera.distance.min <= 0)
    throw ConfigError("camera.distance: range must exclude 0 (camera cannot sit on the anchor)");
  CameraSpec cam;
  double distance = rng.uniform(cfg.camera.distance.min, cfg.camera.distance.max);
  double azimuth = rng.uniform(0.0, 360.0);
  double elevation = rng.uniform(cfg.camera.elevation.min, cfg.camera.elevation.max);
  cam.position =
      anchor.position + direction_from_angles(radians(azimuth), radians(elevation)) * distance;
  cam.look_at = anchor.position;

  double focal = cfg.nominal_focal_px();
  cam.intrinsics.width = cfg.camera.width;
  cam.intrinsics.height = cfg.camera.height;
  cam.intrinsics.fx = focal;
  cam.intrinsics.fy = focal;
  cam.intrinsics.cx = cfg.camera.width * 0.5;
  cam.intrinsics.cy = cfg.camera.height * 0.5;
  if (cfg.camera.intrinsics_randomization) {
    const ScalarRange& j = cfg.camera.intrinsics_jitter;
    cam.intrinsics.fx *= 1 + rng.uniform(j.min, j.max);
    cam.intrinsics.fy *= 1 + rng.uniform(j.min, j.max);
    cam.intrinsics.cx *= 1 + rng.uniform(j.min, j.max);
    cam.intrinsics.cy *= 1 + rng.uniform(j.min, j.max);
  }
  cam.fstop = rng.uniform(cfg.camera.fstop.min, cfg.camera.fstop.max);
  return cam;
}

// E_min + (E_max - E_min) * u^(1/e): e = 1 is uniform, larger e skews bright.
inline double sample_light_intensity(const ScalarRange& range, double e, Rng& rng) {
  if (e == 0) throw ConfigError("lights.exponent: falloff factor must be nonzero");
  double u = rng.uniform();
  return range.min + (range.max - range.min) * std::pow(u, 1.0 / e);
}

// Channels uniform in [0.5, 1], rescaled so the max channel is exactly 1.
inline Vec3 sample_light_color(Rng& rng) {
  Vec3 c{rng.uniform(0.5, 1.0), rng.uniform(0.5, 1.0), rng.uniform(0.5, 1.0)};
  return c / max_component(c);
}

// Studio three-point placement in the anchor frame: key +45 az / +30 el,
// fill -60 / +15, rim 180 / +45 (degrees). Azimuth 0 is the anchor's rotated
// +x axis. Per light, the draw order is distance, intensity, color.
inline LightRig sample_light_rig(const GenerationConfig& cfg, const AnchorSpec& anchor, Rng& rng) {
  struct Placement {
    double azimuth_deg, elevation_deg;
  };
  constexpr Placement placements[3] = {{45, 30}, {-60, 15}, {180, 45}};
  Mat3 frame = anchor.rotation();
  LightRig rig;
  for (int i = 0; i < 3; ++i) {
    LightSpec light;
    double distance = rng.uniform(cfg.lights.distance.min, cfg.lights.distance.max);
    Vec3 local = direction_from_angles(radians(placements[i].azimuth_deg),
                                       radians(placements[i].elevation_deg));
    light.position = anchor.position + (frame * local) * distance;
    light.target = anchor.position;
    light.intensity = sample_light_intensity(cfg.lights.intensity, cfg.lights.exponent, rng);
    light.color = cfg.lights.color_randomization ? sample_light_color(rng) : Vec3{1, 1, 1};
    light.size = cfg.lights.size;
    (i == 0 ? rig.key : i == 1 ? rig.fill : rig.rim) = light;
  }
  return rig;
}

namespace samplerdetail {

inline int sample_count(const ScalarRange& range, Rng& rng, const char* field) {
  long lo = std::lround(range.min), hi = std::lround(range.max);
  if (lo < 0 || hi < lo) throw ConfigError(std::string(field) + ": invalid count range");
  return static_cast<int>(rng.uniform_int(lo, hi));
}

// Uniform pick among pool entries with remaining copies, weighted by the
// remaining capacity of each entry.
inline int pick_asset(const std::vector<CatalogAsset>& pool, std::vector<int>& remaining,
                      Rng& rng) {
  long total = 0;
  for (int r : remaining) total += r;
  long draw = static_cast<long>(rng.uniform_int(0, total - 1));
  for (size_t i = 0; i < pool.size(); ++i) {
    draw -= remaining[i];
    if (draw < 0) {
      --remaining[i];
      return static_cast<int>(i);
    }
  }
  return static_cast<int>(pool.size()) - 1;
}

inline void spawn_role(const GenerationConfig& cfg, const AssetCatalog& catalog, AssetRole role,
                       int count, const AnchorSpec& anchor, Rng& rng, int* next_instance_id,
                       std::vector<ObjectInstanceSpec>* out, const char* field) {
  if (count == 0) return;
  const std::vector<CatalogAsset>& pool = catalog_pool(catalog, role);
  long capacity = 0;
  for (const CatalogAsset& a : pool) capacity += a.copies;
  if (count > capacity)
    throw ConfigError(std::string(field) + ": requested " + std::to_string(count) + " " +
                      asset_role_name(role) + " instances but catalog capacity is " +
                      std::to_string(capacity));
  std::vector<int> remaining;
  for (const CatalogAsset& a : pool) remaining.push_back(a.copies);
  for (int k = 0; k < count; ++k) {
    ObjectInstanceSpec inst;
    inst.role = role;
    inst.asset_index = pick_asset(pool, remaining, rng);
    inst.offset = {rng.uniform(cfg.spawn.position_offset.x.min, cfg.spawn.position_offset.x.max),
                   rng.uniform(cfg.spawn.position_offset.y.min, cfg.spawn.position_offset.y.max),
                   rng.uniform(cfg.spawn.position_offset.z.min, cfg.spawn.position_offset.z.max)};
    inst.position = anchor.position + inst.offset;
    inst.orientation_deg = {rng.uniform(cfg.spawn.orientation.x.min, cfg.spawn.orientation.x.max),
                            rng.uniform(cfg.spawn.orientation.y.min, cfg.spawn.orientation.y.max),
                            rng.uniform(cfg.spawn.orientation.z.min, cfg.spawn.orientation.z.max)};
    inst.instance_id = (*next_instance_id)++;
    out->push_back(inst);
  }
}

}  // namespace samplerdetail

// Instance draw order: target count, distractor count, fake count, then the
// instances of each role in that order. instance_ids run 1..k in draw order.
inline std::vector<ObjectInstanceSpec> sample_instances(const GenerationConfig& cfg,
                                                        const AssetCatalog& catalog,
                                                        const AnchorSpec& anchor, Rng& rng) {
  int targets = samplerdetail::sample_count(cfg.spawn.target_count, rng, "spawn.target_count");
  int distractors =
      samplerdetail::sample_count(cfg.spawn.distractor_count, rng, "spawn.distractor_count");
  int fakes = samplerdetail::sample_count(cfg.spawn.fake_count, rng, "spawn.fake_count");

  std::vector<ObjectInstanceSpec> out;
  int next_id = 1;
  samplerdetail::spawn_role(cfg, catalog, AssetRole::kTarget, targets, anchor, rng, &next_id,
                            &out, "spawn.target_count");
  samplerdetail::spawn_role(cfg, catalog, AssetRole::kDistractor, distractors, anchor, rng,
                            &next_id, &out, "spawn.distractor_count");
  samplerdetail::spawn_role(cfg, catalog, AssetRole::kFake, fakes, anchor, rng, &next_id, &out,
                            "spawn.fake_count");
  return out;
}

inline SceneSpec sample_scene(const GenerationConfig& cfg, const AssetCatalog& catalog,
                              int frame) {
  SceneSpec scene;
  scene.frame_index = frame;

  Rng anchor_rng = frame_stream(cfg.seed, frame, "anchor");
  scene.anchor = sample_anchor(cfg, anchor_rng);

  Rng camera_rng = frame_stream(cfg.seed, frame, "camera");
  scene.camera = sample_camera(cfg, scene.anchor, camera_rng);

  Rng light_rng = frame_stream(cfg.seed, frame, "lights");
  scene.lights = sample_light_rig(cfg, scene.anchor, light_rng);

  Rng instance_rng = frame_stream(cfg.seed, frame, "instances");
  scene.instances = sample_instances(cfg, catalog, scene.anchor, instance_rng);

  Rng background_rng = frame_stream(cfg.seed, frame, "background");
  scene.background_scale =
      background_rng.uniform(cfg.background_light_scale.min, cfg.background_light_scale.max);

  if (cfg.assets.plane_enabled) {
    if (catalog.plane_materials.empty())
      throw ConfigError(
          "assets.plane_materials: pool is empty but the ground plane is enabled");
    Rng plane_rng = frame_stream(cfg.seed, frame, "plane");
    scene.plane_material_index = static_cast<int>(
        plane_rng.uniform_int(0, static_cast<long>(catalog.plane_materials.size()) - 1));
  }

  // HDRI assignment is per batch, keyed by the batch index so consecutive
  // frames in a batch share one map.
  bool background_off = cfg.background_light_scale.is_point() && cfg.background_light_scale.min == 0;
  if (!catalog.hdri_paths.empty()) {
    int batch = frame / std::max(cfg.hdri_batch_size, 1);
    Rng hdri_rng = Rng(cfg.seed).fork("hdri").fork(static_cast<uint64_t>(batch));
    scene.hdri_index = static_cast<int>(
        hdri_rng.uniform_int(0, static_cast<long>(catalog.hdri_paths.size()) - 1));
  } else if (!background_off) {
    throw ConfigError("assets.hdri: pool is empty but background light is requested");
  }
  return scene;
}

inline std::vector<SceneSpec> sample_run(const GenerationConfig& cfg,
                                         const AssetCatalog& catalog) {
  std::vector<SceneSpec> scenes;
  scenes.reserve(cfg.scene_count);
  for (int frame = 0; frame < cfg.scene_count; ++frame)
    scenes.push_back(sample_scene(cfg, catalog, frame));
  return scenes;
}

// ---------------------------------------------------------------------------
// JSON round trip for per-frame metadata records.

namespace samplerdetail {

using nlohmann::json;

inline json vec_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }
inline Vec3 vec_from(const json& j) { return {j.at(0), j.at(1), j.at(2)}; }

inline json transform_json(const Transform& t) {
  return {{"rotation", json::array({vec_json(t.rotation.r0), vec_json(t.rotation.r1),
                                    vec_json(t.rotation.r2)})},
          {"translation", vec_json(t.translation)}};
}

inline Transform transform_from(const json& j) {
  Transform t;
  t.rotation.r0 = vec_from(j.at("rotation").at(0));
  t.rotation.r1 = vec_from(j.at("rotation").at(1));
  t.rotation.r2 = vec_from(j.at("rotation").at(2));
  t.translation = vec_from(j.at("translation"));
  return t;
}

inline json light_json(const LightSpec& l) {
  return {{"position", vec_json(l.position)}, {"target", vec_json(l.target)},
          {"intensity", l.intensity},         {"color", vec_json(l.color)},
          {"size", l.size}};
}

inline LightSpec light_from(const json& j) {
  LightSpec l;
  l.position = vec_from(j.at("position"));
  l.target = vec_from(j.at("target"));
  l.intensity = j.at("intensity");
  l.color = vec_from(j.at("color"));
  l.size = j.at("size");
  return l;
}

}  // namespace samplerdetail

inline nlohmann::json scene_to_json(const SceneSpec& s) {
  using nlohmann::json;
  json j;
  j["frame_index"] = s.frame_index;
  j["anchor"] = {{"position", samplerdetail::vec_json(s.anchor.position)},
                 {"yaw_deg", s.anchor.yaw_deg}};
  j["camera"] = {{"position", samplerdetail::vec_json(s.camera.position)},
                 {"look_at", samplerdetail::vec_json(s.camera.look_at)},
                 {"up", samplerdetail::vec_json(s.camera.up)},
                 {"fstop", s.camera.fstop},
                 {"intrinsics",
                  {{"fx", s.camera.intrinsics.fx},
                   {"fy", s.camera.intrinsics.fy},
                   {"cx", s.camera.intrinsics.cx},
                   {"cy", s.camera.intrinsics.cy},
                   {"width", s.camera.intrinsics.width},
                   {"height", s.camera.intrinsics.height}}}};
  j["lights"] = {{"key", samplerdetail::light_json(s.lights.key)},
                 {"fill", samplerdetail::light_json(s.lights.fill)},
                 {"rim", samplerdetail::light_json(s.lights.rim)}};
  j["hdri_index"] = s.hdri_index;
  j["background_scale"] = s.background_scale;
  j["plane_material_index"] = s.plane_material_index;
  j["instances"] = nlohmann::json::array();
  for (const ObjectInstanceSpec& inst : s.instances) {
    json ij = {{"role", asset_role_name(inst.role)},
               {"asset_index", inst.asset_index},
               {"offset", samplerdetail::vec_json(inst.offset)},
               {"position", samplerdetail::vec_json(inst.position)},
               {"orientation_deg", samplerdetail::vec_json(inst.orientation_deg)},
               {"instance_id", inst.instance_id}};
    if (inst.rest_pose) ij["rest_pose"] = samplerdetail::transform_json(*inst.rest_pose);
    j["instances"].push_back(std::move(ij));
  }
  j["physics"] = {{"enabled", s.physics.enabled},
                  {"converged", s.physics.converged},
                  {"penetration_free", s.physics.penetration_free},
                  {"steps", s.physics.steps}};
  j["warnings"] = s.warnings;
  return j;
}

inline SceneSpec scene_from_json(const nlohmann::json& j) {
  SceneSpec s;
  s.frame_index = j.at("frame_index");
  s.anchor.position = samplerdetail::vec_from(j.at("anchor").at("position"));
  s.anchor.yaw_deg = j.at("anchor").at("yaw_deg");
  const auto& cam = j.at("camera");
  s.camera.position = samplerdetail::vec_from(cam.at("position"));
  s.camera.look_at = samplerdetail::vec_from(cam.at("look_at"));
  s.camera.up = samplerdetail::vec_from(cam.at("up"));
  s.camera.fstop = cam.at("fstop");
  const auto& intr = cam.at("intrinsics");
  s.camera.intrinsics.fx = intr.at("fx");
  s.camera.intrinsics.fy = intr.at("fy");
  s.camera.intrinsics.cx = intr.at("cx");
  s.camera.intrinsics.cy = intr.at("cy");
  s.camera.intrinsics.width = intr.at("width");
  s.camera.intrinsics.height = intr.at("height");
  s.lights.key = samplerdetail::light_from(j.at("lights").at("key"));
  s.lights.fill = samplerdetail::light_from(j.at("lights").at("fill"));
  s.lights.rim = samplerdetail::light_from(j.at("lights").at("rim"));
  s.hdri_index = j.at("hdri_index");
  s.background_scale = j.at("background_scale");
  s.plane_material_index = j.at("plane_material_index");
  for (const auto& ij : j.at("instances")) {
    ObjectInstanceSpec inst;
    std::string role = ij.at("role");
    inst.role = role == "target"       ? AssetRole::kTarget
                : role == "distractor" ? AssetRole::kDistractor
                                       : AssetRole::kFake;
    inst.asset_index = ij.at("asset_index");
    inst.offset = samplerdetail::vec_from(ij.at("offset"));
    inst.position = samplerdetail::vec_from(ij.at("position"));
    inst.orientation_deg = samplerdetail::vec_from(ij.at("orientation_deg"));
    inst.instance_id = ij.at("instance_id");
    if (ij.contains("rest_pose"))
      inst.rest_pose = samplerdetail::transform_from(ij.at("rest_pose"));
    s.instances.push_back(inst);
  }
  if (j.contains("physics")) {
    const auto& pj = j.at("physics");
    s.physics.enabled = pj.at("enabled");
    s.physics.converged = pj.at("converged");
    s.physics.penetration_free = pj.at("penetration_free");
    s.physics.steps = pj.at("steps");
  }
  if (j.contains("warnings")) s.warnings = j.at("warnings").get<std::vector<std::string>>();
  return s;
}

}  // namespace synthgen

// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

// Run orchestration: scene preparation (sampling, collision-free placement,
// gravity settling) and the on-disk run directory.
//
// Run layout under the output root:
//   manifest.json   config snapshot, asset checksums, per-frame status
//   scenes/         frame_XXXXXX.json scene specifications
//   images/         frame_XXXXXX.png  8-bit sRGB renders
//   depth/          frame_XXXXXX.pfm  depth + validity
//   normals/        frame_XXXXXX.pfm  world-space shading normals
//   masks/          frame_XXXXXX.png  16-bit instance ids
//   semantic/       frame_XXXXXX.png  16-bit category ids
//   meta/           frame_XXXXXX.json per-frame provenance record
//   labels/         frame_XXXXXX.txt  YOLO boxes
//   annotations/    frame_XXXXXX.json per-frame records + coco.json
//
// Everything written here is a pure function of (config, assets), so
// re-rendering a frame reproduces its artifacts byte for byte. The only
// exceptions are the manifest timestamps, which record wall-clock history.

#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "synthgen/annotate.hpp"
#include "synthgen/catalog.hpp"
#include "synthgen/config.hpp"
#include "synthgen/errors.hpp"
#include "synthgen/io.hpp"
#include "synthgen/physics.hpp"
#include "synthgen/render.hpp"
#include "synthgen/rng.hpp"
#include "synthgen/sampler.hpp"
#include "synthgen/version.hpp"

namespace synthgen {

// ---------------------------------------------------------------------------
// Scene preparation: sampling + placement + settling for one frame.

namespace pipelinedetail {

constexpr int kPlacementAttempts = 64;  // per instance, per round
constexpr int kPlacementRounds = 8;     // full-scene retries before giving up

}  // namespace pipelinedetail

// Samples a frame, re-draws colliding or out-of-view poses, and (when physics
// is enabled) settles the survivors under gravity, recording the rest pose on
// each instance. Throws ConfigError when instances were requested but none
// could ever be placed.
inline SceneSpec prepare_scene(const GenerationConfig& cfg, const AssetCatalog& catalog,
                               int frame) {
  SceneSpec scene = sample_scene(cfg, catalog, frame);
  if (scene.instances.empty()) return scene;

  Rng placement_rng = frame_stream(cfg.seed, frame, "placement");
  PlacementResult placed;
  for (int round = 0; round < pipelinedetail::kPlacementRounds; ++round) {
    placed = place_collision_free(cfg, catalog, scene.anchor, scene.camera, scene.instances,
                                  pipelinedetail::kPlacementAttempts, placement_rng);
    if (!placed.instances.empty()) break;
  }
  if (placed.instances.empty())
    throw ConfigError("frame " + std::to_string(frame) +
                      ": no instance could be placed; spawn offsets, object sizes, and the "
                      "camera frustum leave no collision-free pose");
  for (const std::string& w : placed.warnings)
    scene.warnings.push_back("frame " + std::to_string(frame) + ": " + w);
  scene.instances = std::move(placed.instances);

  scene.physics.enabled = cfg.physics_enabled;
  if (cfg.physics_enabled) {
    std::vector<RigidBodyState> states;
    std::vector<ProxyBox> proxies;
    states.reserve(scene.instances.size());
    proxies.reserve(scene.instances.size());
    for (const ObjectInstanceSpec& inst : scene.instances) {
      RigidBodyState s;
      s.position = inst.position;
      s.rotation = rotation_from_euler_deg(inst.orientation_deg);
      states.push_back(s);
      proxies.push_back(catalog_pool(catalog, inst.role)[inst.asset_index].proxy);
    }
    SettleOutcome outcome = settle(states, proxies, SettleParams{});
    scene.physics.converged = outcome.converged;
    scene.physics.penetration_free = outcome.penetration_free;
    scene.physics.steps = outcome.steps;
    for (size_t i = 0; i < scene.instances.size(); ++i)
      scene.instances[i].rest_pose =
          Transform{outcome.bodies[i].rotation, outcome.bodies[i].position};
    if (!outcome.converged)
      scene.warnings.push_back("frame " + std::to_string(frame) +
                               ": settling hit the step limit before reaching rest");
    if (!outcome.penetration_free)
      scene.warnings.push_back("frame " + std::to_string(frame) +
                               ": settling left residual penetration above tolerance");
  } else {
    scene.physics.converged = true;
    scene.physics.penetration_free = true;
  }
  return scene;
}

inline std::vector<SceneSpec> prepare_run(const GenerationConfig& cfg,
                                          const AssetCatalog& catalog) {
  std::vector<SceneSpec> scenes;
  scenes.reserve(cfg.scene_count);
  for (int frame = 0; frame < cfg.scene_count; ++frame)
    scenes.push_back(prepare_scene(cfg, catalog, frame));
  return scenes;
}

// ---------------------------------------------------------------------------
// Run directory.

struct RunPaths {
  std::filesystem::path root;

  std::filesystem::path manifest() const { return root / "manifest.json"; }
  std::filesystem::path lock() const { return root / ".synthgen.lock"; }
  std::filesystem::path scenes() const { return root / "scenes"; }
  std::filesystem::path images() const { return root / "images"; }
  std::filesystem::path depth() const { return root / "depth"; }
  std::filesystem::path normals() const { return root / "normals"; }
  std::filesystem::path masks() const { return root / "masks"; }
  std::filesystem::path semantic() const { return root / "semantic"; }
  std::filesystem::path meta() const { return root / "meta"; }
  std::filesystem::path labels() const { return root / "labels"; }
  std::filesystem::path annotations() const { return root / "annotations"; }
  std::filesystem::path coco() const { return annotations() / "coco.json"; }
};

inline std::string frame_stem(int frame) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%06d", frame);
  return buf;
}

// Exclusive-create lock file guarding a run directory against concurrent
// renders. Stale locks (after a crash) must be removed by hand.
class RunLock {
 public:
  explicit RunLock(const RunPaths& paths) : path_(paths.lock().string()) {
    std::FILE* f = std::fopen(path_.c_str(), "wx");
    if (!f)
      throw DataError("run directory is locked: " + path_ +
                      " exists; is another render running? remove it if stale");
    std::fputs("synthgen render in progress\n", f);
    std::fclose(f);
  }
  ~RunLock() { std::remove(path_.c_str()); }

  RunLock(const RunLock&) = delete;
  RunLock& operator=(const RunLock&) = delete;

 private:
  std::string path_;
};

namespace pipelinedetail {

inline uint64_t fnv1a_bytes(const std::string& bytes) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string checksum_hex(const std::string& path) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "fnv1a:%016llx",
                static_cast<unsigned long long>(fnv1a_bytes(read_text_file(path))));
  return buf;
}

inline std::string iso8601_utc_now() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace pipelinedetail

// Checksums of every external asset the run depends on, in config order.
inline nlohmann::json asset_checksums(const GenerationConfig& cfg, const std::string& base_dir) {
  nlohmann::json out = nlohmann::json::array();
  auto add = [&](const std::string& path) {
    std::string resolved = catalogdetail::resolve_path(path, base_dir);
    out.push_back({{"path", path}, {"checksum", pipelinedetail::checksum_hex(resolved)}});
  };
  for (const auto& t : cfg.assets.targets) add(t.path);
  for (const auto& d : cfg.assets.distractors) add(d.path);
  for (const auto& p : cfg.assets.plane_materials)
    if (p.texture) add(*p.texture);
  for (const auto& h : cfg.assets.hdri) add(h);
  return out;
}

// Creates (or re-opens) a run directory. An existing manifest must carry a
// byte-identical config snapshot; anything else is a different run and is
// rejected rather than silently mixed.
inline nlohmann::json init_run_dir(const RunPaths& paths, const GenerationConfig& cfg,
                                   const std::string& asset_base_dir) {
  for (const auto& dir :
       {paths.root, paths.scenes(), paths.images(), paths.depth(), paths.normals(),
        paths.masks(), paths.semantic(), paths.meta(), paths.labels(), paths.annotations()})
    ensure_directory(dir);

  nlohmann::json config_snapshot = to_json(cfg);
  nlohmann::json manifest;
  if (std::filesystem::exists(paths.manifest())) {
    manifest = load_json_file(paths.manifest().string());
    if (!manifest.contains("config") || manifest["config"].dump() != config_snapshot.dump())
      throw ConfigError("run directory " + paths.root.string() +
                        " was created with a different config; use a fresh output directory");
  } else {
    manifest["schema_version"] = 1;
    manifest["tool_version"] = kVersionString;
    manifest["created_at"] = pipelinedetail::iso8601_utc_now();
    manifest["config"] = config_snapshot;
    manifest["assets"] = asset_checksums(cfg, asset_base_dir);
    manifest["frames"] = nlohmann::json::object();
    write_json_file(paths.manifest().string(), manifest);
  }
  return manifest;
}

inline void write_scene_specs(const RunPaths& paths, const std::vector<SceneSpec>& scenes) {
  for (const SceneSpec& scene : scenes)
    write_json_file((paths.scenes() / (frame_stem(scene.frame_index) + ".json")).string(),
                    scene_to_json(scene));
}

// Loads the full scene list from scenes/; every frame file must be present.
inline std::vector<SceneSpec> load_scene_specs(const RunPaths& paths, int scene_count) {
  std::vector<SceneSpec> scenes;
  scenes.reserve(scene_count);
  for (int frame = 0; frame < scene_count; ++frame) {
    std::filesystem::path file = paths.scenes() / (frame_stem(frame) + ".json");
    if (!std::filesystem::exists(file))
      throw DataError("missing scene spec: " + file.string() + "; run generate first");
    scenes.push_back(scene_from_json(load_json_file(file.string())));
    if (scenes.back().frame_index != frame)
      throw DataError("scene spec " + file.string() + " carries frame index " +
                      std::to_string(scenes.back().frame_index));
  }
  return scenes;
}

// Rebuilds annotations/coco.json from every per-frame record present, in
// frame order, so partial renders and re-renders always yield a consistent
// run-level annotation file.
inline void rebuild_coco(const RunPaths& paths, const std::map<int, std::string>& categories) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(paths.annotations())) {
    std::string name = entry.path().filename().string();
    if (name.rfind("frame_", 0) == 0 && entry.path().extension() == ".json")
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<FrameAnnotations> frames;
  frames.reserve(files.size());
  for (const auto& file : files)
    frames.push_back(annotations_from_json(load_json_file(file.string())));
  write_json_file(paths.coco().string(), coco_json(frames, categories));
}

struct RenderRunResult {
  int frames_rendered = 0;
  std::vector<std::string> warnings;
};

// Renders scenes[first..last] into the run directory: all five passes plus
// labels, per-frame metadata, and the rebuilt COCO file. Holding the run lock
// for the whole range keeps concurrent renders out.
inline RenderRunResult render_run(const RunPaths& paths, const GenerationConfig& cfg,
                                  const AssetCatalog& catalog,
                                  const std::vector<SceneSpec>& scenes, int first, int last,
                                  const RenderSettings& settings) {
  validate_frame_interval(static_cast<int>(scenes.size()), first, last);
  RunLock lock(paths);
  nlohmann::json manifest = load_json_file(paths.manifest().string());

  RenderRunResult result;
  int cached_index = -2;
  std::shared_ptr<Environment> env;
  for (int frame = first; frame <= last; ++frame) {
    const SceneSpec& scene = scenes[frame];
    if (scene.hdri_index != cached_index) {
      env = scene.hdri_index >= 0 ? load_environment(catalog.hdri_paths[scene.hdri_index])
                                  : nullptr;
      cached_index = scene.hdri_index;
    }
    RenderScene rs = build_render_scene(cfg, catalog, scene, env);
    uint64_t seed = frame_render_seed(cfg.seed, frame);
    FrameBuffers fb = render_frame(rs, settings, seed);

    // Every pass is computed in one render; output_passes only gates which
    // files are written. Annotations always come from the in-memory
    // instance pass, so disabling it on disk never weakens the labels.
    std::string stem = frame_stem(frame);
    if (cfg.output_passes.count("rgb"))
      write_rgb_png(fb, (paths.images() / (stem + ".png")).string());
    if (cfg.output_passes.count("depth"))
      write_depth_pfm(fb, (paths.depth() / (stem + ".pfm")).string());
    if (cfg.output_passes.count("normal"))
      write_normal_pfm(fb, (paths.normals() / (stem + ".pfm")).string());
    if (cfg.output_passes.count("instance_seg"))
      write_instance_png(fb, (paths.masks() / (stem + ".png")).string());
    if (cfg.output_passes.count("semantic_seg"))
      write_semantic_png(fb, (paths.semantic() / (stem + ".png")).string());

    FrameAnnotations ann =
        annotate_frame(scene, catalog, fb, cfg.min_visible_pixels, "images/" + stem + ".png");
    write_text_file((paths.labels() / (stem + ".txt")).string(), yolo_labels(ann));
    write_json_file((paths.annotations() / (stem + ".json")).string(), annotations_to_json(ann));
    write_json_file((paths.meta() / (stem + ".json")).string(),
                    frame_metadata(scene, catalog, ann, settings, fb.stats, seed));

    manifest["frames"][stem] = {{"status", "rendered"},
                                {"rendered_at", pipelinedetail::iso8601_utc_now()},
                                {"spp", settings.spp}};
    for (const std::string& w : scene.warnings) result.warnings.push_back(w);
    for (const std::string& d : ann.dropped) result.warnings.push_back(d);
    ++result.frames_rendered;
  }

  rebuild_coco(paths, catalog.categories);
  write_json_file(paths.manifest().string(), manifest);
  return result;
}

}  // namespace synthgen

// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

// Annotation extraction and export. Boxes are derived from the instance-id
// pass, so they describe exactly what a detector can see: occluded or
// out-of-frame parts never inflate a box, and instances below the visibility
// threshold are dropped with a logged reason. Only target instances carry a
// category and get annotated; distractors and fake objects render with
// category 0 and stay unlabeled.
//
// Export conventions:
//   COCO  image id = frame index + 1; annotation ids dense from 1 in frame
//         order; bbox [x, y, w, h] in pixels; area = w * h; iscrowd 0
//   YOLO  one line per object, "class cx cy w h" normalized to [0, 1],
//         six decimals, class index = category id - 1
//   depth PFM stores misses as 0 in channel 0 with validity in channel 1

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "synthgen/catalog.hpp"
#include "synthgen/image.hpp"
#include "synthgen/math.hpp"
#include "synthgen/render.hpp"
#include "synthgen/sampler.hpp"

namespace synthgen {

struct BBox {
  double x = 0, y = 0, w = 0, h = 0;  // pixels, top-left origin

  double area() const { return w * h; }
};

struct ObjectAnnotation {
  int instance_id = 0;
  int category_id = 0;
  BBox bbox;
  long pixel_count = 0;
};

struct FrameAnnotations {
  int frame_index = 0;
  int width = 0, height = 0;
  std::string image_file;  // path recorded in COCO, relative to the run root
  std::vector<ObjectAnnotation> objects;
  std::vector<std::string> dropped;  // log lines for filtered instances
};

namespace annotatedetail {

struct MaskExtent {
  int min_x, min_y, max_x, max_y;
  long count = 0;
};

// Single pass over the instance buffer collecting the extent of every id.
inline std::map<int32_t, MaskExtent> mask_extents(const FrameBuffers& fb) {
  std::map<int32_t, MaskExtent> extents;
  for (int y = 0; y < fb.height; ++y) {
    for (int x = 0; x < fb.width; ++x) {
      int32_t id = fb.instance[fb.pixel(x, y)];
      if (id == 0) continue;
      auto [it, inserted] = extents.try_emplace(id, MaskExtent{x, y, x, y, 0});
      MaskExtent& e = it->second;
      e.min_x = std::min(e.min_x, x);
      e.min_y = std::min(e.min_y, y);
      e.max_x = std::max(e.max_x, x);
      e.max_y = std::max(e.max_y, y);
      ++e.count;
    }
  }
  return extents;
}

}  // namespace annotatedetail

// Tight pixel bbox of one instance id, or nullopt when no pixel carries it.
inline std::optional<BBox> bbox_from_mask(const FrameBuffers& fb, int32_t instance_id,
                                          long* pixel_count = nullptr) {
  auto extents = annotatedetail::mask_extents(fb);
  auto it = extents.find(instance_id);
  if (it == extents.end()) return std::nullopt;
  const auto& e = it->second;
  if (pixel_count) *pixel_count = e.count;
  return BBox{static_cast<double>(e.min_x), static_cast<double>(e.min_y),
              static_cast<double>(e.max_x - e.min_x + 1),
              static_cast<double>(e.max_y - e.min_y + 1)};
}

// Builds the annotation set for one rendered frame. Target instances whose
// visible pixel count falls below `min_visible_pixels` (or that are fully
// occluded / out of frame) are dropped and logged.
inline FrameAnnotations annotate_frame(const SceneSpec& scene, const AssetCatalog& catalog,
                                       const FrameBuffers& fb, int min_visible_pixels,
                                       const std::string& image_file) {
  FrameAnnotations out;
  out.frame_index = scene.frame_index;
  out.width = fb.width;
  out.height = fb.height;
  out.image_file = image_file;

  auto extents = annotatedetail::mask_extents(fb);
  for (const ObjectInstanceSpec& inst : scene.instances) {
    if (inst.role != AssetRole::kTarget) continue;
    int category = catalog.targets[inst.asset_index].category_id;
    auto it = extents.find(inst.instance_id);
    long count = it == extents.end() ? 0 : it->second.count;
    if (count < min_visible_pixels) {
      out.dropped.push_back("frame " + std::to_string(scene.frame_index) + ": instance " +
                            std::to_string(inst.instance_id) + " (category " +
                            std::to_string(category) + ") below visibility threshold: " +
                            std::to_string(count) + " < " + std::to_string(min_visible_pixels) +
                            " pixels");
      continue;
    }
    const auto& e = it->second;
    out.objects.push_back(
        {inst.instance_id, category,
         BBox{static_cast<double>(e.min_x), static_cast<double>(e.min_y),
              static_cast<double>(e.max_x - e.min_x + 1),
              static_cast<double>(e.max_y - e.min_y + 1)},
         count});
  }
  return out;
}

// ---------------------------------------------------------------------------
// COCO / YOLO export.

inline nlohmann::json coco_json(const std::vector<FrameAnnotations>& frames,
                                const std::map<int, std::string>& categories) {
  nlohmann::json doc;
  doc["info"] = {{"description", "synthgen generated dataset"}, {"version", "1"}};
  doc["licenses"] = nlohmann::json::array();
  doc["images"] = nlohmann::json::array();
  doc["annotations"] = nlohmann::json::array();
  doc["categories"] = nlohmann::json::array();

  for (const auto& [id, name] : categories)
    doc["categories"].push_back({{"id", id}, {"name", name}, {"supercategory", "object"}});

  int annotation_id = 1;
  for (const FrameAnnotations& f : frames) {
    doc["images"].push_back({{"id", f.frame_index + 1},
                             {"file_name", f.image_file},
                             {"width", f.width},
                             {"height", f.height}});
    for (const ObjectAnnotation& obj : f.objects) {
      doc["annotations"].push_back({{"id", annotation_id++},
                                    {"image_id", f.frame_index + 1},
                                    {"category_id", obj.category_id},
                                    {"bbox", {obj.bbox.x, obj.bbox.y, obj.bbox.w, obj.bbox.h}},
                                    {"area", obj.bbox.area()},
                                    {"iscrowd", 0},
                                    {"segmentation", nlohmann::json::array()}});
    }
  }
  return doc;
}

// Per-frame annotation record, persisted so a run-level COCO file can be
// rebuilt from whatever subset of frames has been rendered.
inline nlohmann::json annotations_to_json(const FrameAnnotations& frame) {
  nlohmann::json doc;
  doc["frame_index"] = frame.frame_index;
  doc["width"] = frame.width;
  doc["height"] = frame.height;
  doc["image_file"] = frame.image_file;
  doc["objects"] = nlohmann::json::array();
  for (const ObjectAnnotation& obj : frame.objects)
    doc["objects"].push_back({{"instance_id", obj.instance_id},
                              {"category_id", obj.category_id},
                              {"bbox", {obj.bbox.x, obj.bbox.y, obj.bbox.w, obj.bbox.h}},
                              {"pixel_count", obj.pixel_count}});
  doc["dropped"] = frame.dropped;
  return doc;
}

inline FrameAnnotations annotations_from_json(const nlohmann::json& doc) {
  FrameAnnotations frame;
  frame.frame_index = doc.at("frame_index").get<int>();
  frame.width = doc.at("width").get<int>();
  frame.height = doc.at("height").get<int>();
  frame.image_file = doc.at("image_file").get<std::string>();
  for (const auto& obj : doc.at("objects")) {
    const auto& b = obj.at("bbox");
    frame.objects.push_back({obj.at("instance_id").get<int>(), obj.at("category_id").get<int>(),
                             BBox{b.at(0), b.at(1), b.at(2), b.at(3)},
                             obj.at("pixel_count").get<long>()});
  }
  for (const auto& d : doc.at("dropped")) frame.dropped.push_back(d.get<std::string>());
  return frame;
}

// One "class cx cy w h" line per object, normalized, six decimals.
inline std::string yolo_labels(const FrameAnnotations& frame) {
  std::string out;
  char line[160];
  for (const ObjectAnnotation& obj : frame.objects) {
    double cx = (obj.bbox.x + obj.bbox.w * 0.5) / frame.width;
    double cy = (obj.bbox.y + obj.bbox.h * 0.5) / frame.height;
    double w = obj.bbox.w / frame.width;
    double h = obj.bbox.h / frame.height;
    std::snprintf(line, sizeof(line), "%d %.6f %.6f %.6f %.6f\n", obj.category_id - 1, cx, cy, w,
                  h);
    out += line;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Frame metadata: everything needed to reproduce or audit one frame.

inline nlohmann::json vec3_json(const Vec3& v) { return {v.x, v.y, v.z}; }

// Row-major 4x4 of [R | t; 0 0 0 1].
inline nlohmann::json transform_matrix_json(const Transform& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < 3; ++i) {
    const Vec3& r = t.rotation.row(i);
    rows.push_back({r.x, r.y, r.z, t.translation[i]});
  }
  rows.push_back({0.0, 0.0, 0.0, 1.0});
  return rows;
}

inline nlohmann::json frame_metadata(const SceneSpec& scene, const AssetCatalog& catalog,
                                     const FrameAnnotations& annotations,
                                     const RenderSettings& settings, const RenderStats& stats,
                                     uint64_t render_seed) {
  nlohmann::json doc;
  doc["schema_version"] = 1;
  doc["frame"] = scene.frame_index;

  doc["anchor"] = {{"position", vec3_json(scene.anchor.position)},
                   {"yaw_deg", scene.anchor.yaw_deg}};

  const CameraSpec& cam = scene.camera;
  doc["camera"] = {
      {"position", vec3_json(cam.position)},
      {"look_at", vec3_json(cam.look_at)},
      {"fstop", cam.fstop},
      {"intrinsics",
       {{"fx", cam.intrinsics.fx},
        {"fy", cam.intrinsics.fy},
        {"cx", cam.intrinsics.cx},
        {"cy", cam.intrinsics.cy},
        {"width", cam.intrinsics.width},
        {"height", cam.intrinsics.height}}}};

  doc["lights"] = nlohmann::json::array();
  for (int i = 0; i < 3; ++i) {
    const LightSpec& l = scene.lights.light(i);
    doc["lights"].push_back({{"position", vec3_json(l.position)},
                             {"target", vec3_json(l.target)},
                             {"intensity", l.intensity},
                             {"color", vec3_json(l.color)},
                             {"size", l.size}});
  }

  doc["environment"] = {{"hdri_index", scene.hdri_index},
                        {"background_scale", scene.background_scale}};
  if (scene.hdri_index >= 0)
    doc["environment"]["hdri_path"] = catalog.hdri_paths[scene.hdri_index];
  doc["plane"] = {{"material_index", scene.plane_material_index}};

  doc["objects"] = nlohmann::json::array();
  for (const ObjectInstanceSpec& inst : scene.instances) {
    const CatalogAsset& asset = catalog_pool(catalog, inst.role)[inst.asset_index];
    doc["objects"].push_back({{"instance_id", inst.instance_id},
                              {"role", asset_role_name(inst.role)},
                              {"asset", asset.name},
                              {"category_id", asset.category_id},
                              {"world_from_object", transform_matrix_json(instance_transform(inst))}});
  }

  doc["physics"] = {{"enabled", scene.physics.enabled},
                    {"converged", scene.physics.converged},
                    {"penetration_free", scene.physics.penetration_free},
                    {"steps", scene.physics.steps}};

  doc["render"] = {{"spp", settings.spp},
                   {"max_depth", settings.max_depth},
                   {"clamp", stats.clamp_used},
                   {"nan_samples", stats.nan_samples},
                   {"seed", render_seed}};

  doc["annotations"] = {{"kept", annotations.objects.size()},
                        {"dropped", annotations.dropped}};
  return doc;
}

// ---------------------------------------------------------------------------
// Pass writers: framebuffer -> files.

inline void write_rgb_png(const FrameBuffers& fb, const std::string& path) {
  ImageRgb8 img{fb.width, fb.height, {}};
  img.pixels.resize(3u * fb.width * fb.height);
  for (size_t i = 0; i < img.pixels.size(); ++i) {
    double v = linear_to_srgb(std::clamp(fb.rgb[i], 0.0, 1.0));
    img.pixels[i] = static_cast<uint8_t>(std::lround(v * 255.0));
  }
  write_png_rgb8(path, img);
}

// Channel 0 depth (misses stored as 0), channel 1 validity, channel 2 zero.
inline void write_depth_pfm(const FrameBuffers& fb, const std::string& path) {
  ImageRgbF img = ImageRgbF::make(fb.width, fb.height);
  for (size_t i = 0, n = fb.depth.size(); i < n; ++i) {
    bool valid = std::isfinite(fb.depth[i]);
    img.pixels[3 * i + 0] = valid ? static_cast<float>(fb.depth[i]) : 0.f;
    img.pixels[3 * i + 1] = valid ? 1.f : 0.f;
  }
  write_pfm_rgb(path, img);
}

inline void write_normal_pfm(const FrameBuffers& fb, const std::string& path) {
  ImageRgbF img = ImageRgbF::make(fb.width, fb.height);
  for (size_t i = 0; i < fb.normal.size(); ++i)
    img.pixels[i] = static_cast<float>(fb.normal[i]);
  write_pfm_rgb(path, img);
}

namespace annotatedetail {

inline void write_id_png16(const std::vector<int32_t>& ids, int width, int height,
                           const std::string& path) {
  ImageGray16 img{width, height, {}};
  img.pixels.resize(static_cast<size_t>(width) * height);
  for (size_t i = 0; i < img.pixels.size(); ++i)
    img.pixels[i] = static_cast<uint16_t>(std::clamp<int32_t>(ids[i], 0, 65535));
  write_png_gray16(path, img);
}

}  // namespace annotatedetail

inline void write_instance_png(const FrameBuffers& fb, const std::string& path) {
  annotatedetail::write_id_png16(fb.instance, fb.width, fb.height, path);
}

inline void write_semantic_png(const FrameBuffers& fb, const std::string& path) {
  annotatedetail::write_id_png16(fb.semantic, fb.width, fb.height, path);
}

}  // namespace synthgen

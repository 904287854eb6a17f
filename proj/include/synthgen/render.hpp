// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

// Tile-parallel unidirectional path tracer with next-event estimation to the
// three rect lights and to the environment map, combined by the balance
// heuristic. Per-pixel RNG streams are keyed by (seed, pixel, sample), so the
// output is bit-identical for any thread count. Geometric passes come from
// the unjittered center-pixel pinhole ray and are spp-independent.
//
// Conventions fixed here:
//   depth    camera-space z (distance along the forward axis), +inf on miss
//   normal   interpolated shading normal, flipped toward the camera, 0 on miss
//   instance 0 background; the ground plane carries its own id > 0
//   lights   invisible to camera rays, emissive one-sided for secondary rays,
//            never occluding
//   clamp    per-sample componentwise radiance clamp; auto value is
//            10 x the brightest input radiance (lights, scaled environment)

#pragma once

#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <memory>
#include <thread>
#include <vector>

#include "synthgen/bvh.hpp"
#include "synthgen/camera.hpp"
#include "synthgen/catalog.hpp"
#include "synthgen/config.hpp"
#include "synthgen/hdri.hpp"
#include "synthgen/material.hpp"
#include "synthgen/math.hpp"
#include "synthgen/mesh.hpp"
#include "synthgen/rng.hpp"
#include "synthgen/sampler.hpp"

namespace synthgen {

struct RenderSettings {
  int spp = 16;
  int max_depth = 4;  // surface bounces per path
  int tile_size = 32;
  double clamp = 0;  // 0 selects the automatic bound
  bool dof = true;
  int threads = 0;  // 0 = hardware concurrency
};

inline RenderSettings render_settings_from(const GenerationConfig& cfg) {
  RenderSettings s;
  s.spp = cfg.render.spp;
  s.max_depth = cfg.render.max_depth;
  s.tile_size = cfg.render.tile_size;
  s.clamp = cfg.render.clamp;
  s.dof = cfg.camera.dof_enabled;
  return s;
}

struct RenderStats {
  long nan_samples = 0;
  double clamp_used = 0;
};

struct FrameBuffers {
  int width = 0, height = 0;
  std::vector<double> rgb;      // 3 per pixel, linear
  std::vector<double> depth;    // +inf sentinel for misses
  std::vector<double> normal;   // 3 per pixel, (0,0,0) for misses
  std::vector<int32_t> instance;
  std::vector<int32_t> semantic;
  RenderStats stats;

  size_t pixel(int x, int y) const { return static_cast<size_t>(y) * width + x; }
};

struct RectLight {
  Vec3 center;
  Vec3 normal;  // unit, emission side
  Vec3 tangent_u, tangent_v;  // unit, in the rect plane
  double half_x = 0, half_y = 0;
  Vec3 radiance{0, 0, 0};  // L = color * intensity / pi

  double area() const { return 4 * half_x * half_y; }
  bool emits() const { return area() > 0 && max_component(radiance) > 0; }
};

inline RectLight make_rect_light(const LightSpec& spec) {
  RectLight light;
  light.center = spec.position;
  Vec3 to_target = spec.target - spec.position;
  light.normal = length_squared(to_target) > 0 ? normalize(to_target) : Vec3{0, 0, -1};
  Vec3 up = std::abs(light.normal.z) < 0.999 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
  light.tangent_u = normalize(cross(light.normal, up));
  light.tangent_v = cross(light.normal, light.tangent_u);
  light.half_x = light.half_y = spec.size * 0.5;
  light.radiance = spec.color * (spec.intensity / kPi);
  return light;
}

// Environment map plus its sampling tables, shareable across frames of one
// HDRI batch.
struct Environment {
  HdriMap map;
  EnvironmentDistribution distribution;
};

inline std::shared_ptr<Environment> load_environment(const std::string& path) {
  auto env = std::make_shared<Environment>();
  env->map = load_hdri(path);
  env->distribution = EnvironmentDistribution(env->map);
  return env;
}

struct RenderScene {
  struct InstanceInfo {
    int instance_id = 0;
    int category_id = 0;
    Material material;
  };

  std::vector<BvhTriangle> triangles;
  std::vector<int> tri_instance;  // index into instances
  std::vector<std::array<Vec3, 3>> tri_normals;
  std::vector<std::array<Vec2, 3>> tri_uvs;
  std::vector<InstanceInfo> instances;
  Bvh bvh;

  std::vector<RectLight> lights;
  std::shared_ptr<Environment> environment;  // null = black background
  double background_scale = 1.0;
  CameraFrame camera;

  void add_mesh(const Mesh& mesh, const Transform& transform, int instance_id,
                const Material& material) {
    int inst_index = static_cast<int>(instances.size());
    instances.push_back({instance_id, mesh.category_id, material});
    bool has_uv = !mesh.uvs.empty();
    for (const auto& t : mesh.triangles) {
      BvhTriangle tri{transform.point(mesh.vertices[t[0]]), transform.point(mesh.vertices[t[1]]),
                      transform.point(mesh.vertices[t[2]])};
      triangles.push_back(tri);
      tri_instance.push_back(inst_index);
      tri_normals.push_back({transform.vector(mesh.normals[t[0]]),
                             transform.vector(mesh.normals[t[1]]),
                             transform.vector(mesh.normals[t[2]])});
      if (has_uv)
        tri_uvs.push_back({mesh.uvs[t[0]], mesh.uvs[t[1]], mesh.uvs[t[2]]});
      else
        tri_uvs.push_back({Vec2{0, 0}, Vec2{0, 0}, Vec2{0, 0}});
    }
  }

  void finalize() {
    if (!triangles.empty()) bvh.build(triangles);
  }

  bool has_environment() const { return environment != nullptr && background_scale > 0; }

  Vec3 environment_radiance(const Vec3& dir) const {
    if (!has_environment()) return {0, 0, 0};
    return sample_hdri_bilinear(environment->map, dir) * background_scale;
  }
};

// Builds the world-space render scene for one frame: all instance parts, the
// ground plane (its own instance id, category 0), the light rig, and the
// environment. Random PBR materials, when enabled, replace each object's
// asset material with a per-frame draw from a dedicated stream; the plane
// keeps its pool material.
inline RenderScene build_render_scene(const GenerationConfig& cfg, const AssetCatalog& catalog,
                                      const SceneSpec& scene,
                                      std::shared_ptr<Environment> environment) {
  RenderScene rs;
  rs.camera = make_camera_frame(scene.camera);
  rs.environment = std::move(environment);
  rs.background_scale = scene.background_scale;

  Rng material_rng = frame_stream(cfg.seed, scene.frame_index, "materials");
  int max_id = 0;
  for (const ObjectInstanceSpec& inst : scene.instances) {
    const CatalogAsset& asset = catalog_pool(catalog, inst.role)[inst.asset_index];
    Material material = asset.material;
    if (cfg.random_pbr_materials) material = sample_random_pbr_material(material_rng);
    Transform transform = instance_transform(inst);
    for (const Mesh& part : asset.parts)
      rs.add_mesh(part, transform, inst.instance_id, material);
    max_id = std::max(max_id, inst.instance_id);
  }

  if (cfg.assets.plane_enabled && scene.plane_material_index >= 0) {
    Mesh plane = make_ground_plane(cfg.assets.plane_size);
    rs.add_mesh(plane, Transform{}, max_id + 1,
                catalog.plane_materials[scene.plane_material_index]);
  }

  for (int i = 0; i < 3; ++i) {
    RectLight light = make_rect_light(scene.lights.light(i));
    if (light.emits()) rs.lights.push_back(light);
  }

  rs.finalize();
  return rs;
}

// ---------------------------------------------------------------------------
// BSDF: diffuse Lambert and GGX conductor lobes blended by `metallic`.

namespace brdfdetail {

inline double ggx_alpha(double roughness) { return std::max(roughness * roughness, 1e-4); }

inline double ggx_d(const Vec3& n, const Vec3& h, double alpha) {
  double nh = dot(n, h);
  if (nh <= 0) return 0;
  double a2 = alpha * alpha;
  double d = nh * nh * (a2 - 1) + 1;
  return a2 / (kPi * d * d);
}

inline double ggx_g1(const Vec3& n, const Vec3& v, double alpha) {
  double nv = std::abs(dot(n, v));
  double a2 = alpha * alpha;
  return 2 * nv / (nv + std::sqrt(a2 + (1 - a2) * nv * nv));
}

inline Vec3 schlick(const Vec3& f0, double cos_theta) {
  double m = std::clamp(1 - cos_theta, 0.0, 1.0);
  double m2 = m * m;
  return f0 + (Vec3{1, 1, 1} - f0) * (m2 * m2 * m);
}

// Orthonormal basis around n (Duff et al. branchless construction).
inline void basis(const Vec3& n, Vec3* t, Vec3* b) {
  double sign = n.z >= 0 ? 1.0 : -1.0;
  double a = -1.0 / (sign + n.z);
  *t = {1 + sign * n.x * n.x * a, sign * n.x * n.y * a, -sign * n.x};
  *b = {n.x * n.y * a, sign + n.y * n.y * a, -n.y};
}

inline Vec3 cosine_sample(const Vec3& n, double u1, double u2) {
  double r = std::sqrt(u1);
  double phi = 2 * kPi * u2;
  double z = std::sqrt(std::max(0.0, 1 - u1));
  Vec3 t, b;
  basis(n, &t, &b);
  return t * (r * std::cos(phi)) + b * (r * std::sin(phi)) + n * z;
}

inline Vec3 ggx_sample_half(const Vec3& n, double alpha, double u1, double u2) {
  double phi = 2 * kPi * u1;
  double cos_theta = std::sqrt((1 - u2) / (1 + (alpha * alpha - 1) * u2));
  double sin_theta = std::sqrt(std::max(0.0, 1 - cos_theta * cos_theta));
  Vec3 t, b;
  basis(n, &t, &b);
  return t * (sin_theta * std::cos(phi)) + b * (sin_theta * std::sin(phi)) + n * cos_theta;
}

}  // namespace brdfdetail

struct Brdf {
  Vec3 albedo{1, 1, 1};
  double roughness = 1;
  double metallic = 0;

  Vec3 eval(const Vec3& n, const Vec3& wo, const Vec3& wi) const {
    double ni = dot(n, wi), no = dot(n, wo);
    if (ni <= 0 || no <= 0) return {0, 0, 0};
    Vec3 f{0, 0, 0};
    if (metallic < 1) f += albedo * ((1 - metallic) / kPi);
    if (metallic > 0) {
      Vec3 h = normalize(wi + wo);
      double alpha = brdfdetail::ggx_alpha(roughness);
      double d = brdfdetail::ggx_d(n, h, alpha);
      double g = brdfdetail::ggx_g1(n, wi, alpha) * brdfdetail::ggx_g1(n, wo, alpha);
      Vec3 fresnel = brdfdetail::schlick(albedo, dot(wi, h));
      f += fresnel * (metallic * d * g / (4 * ni * no));
    }
    return f;
  }

  double pdf(const Vec3& n, const Vec3& wo, const Vec3& wi) const {
    double ni = dot(n, wi);
    if (ni <= 0 || dot(n, wo) <= 0) return 0;
    double p = (1 - metallic) * ni / kPi;
    if (metallic > 0) {
      Vec3 h = normalize(wi + wo);
      double alpha = brdfdetail::ggx_alpha(roughness);
      double pdf_h = brdfdetail::ggx_d(n, h, alpha) * dot(n, h);
      double denom = 4 * dot(wo, h);
      if (denom > 1e-12) p += metallic * pdf_h / denom;
    }
    return p;
  }

  // Draws exactly three uniforms: lobe select, then the lobe's pair.
  bool sample(const Vec3& n, const Vec3& wo, Rng& rng, Vec3* wi, double* pdf_out) const {
    double lobe = rng.uniform();
    double u1 = rng.uniform(), u2 = rng.uniform();
    if (lobe < 1 - metallic) {
      *wi = brdfdetail::cosine_sample(n, u1, u2);
    } else {
      Vec3 h = brdfdetail::ggx_sample_half(n, brdfdetail::ggx_alpha(roughness), u1, u2);
      *wi = h * (2 * dot(wo, h)) - wo;
    }
    if (dot(n, *wi) <= 0) return false;
    *pdf_out = pdf(n, wo, *wi);
    return *pdf_out > 1e-12;
  }
};

// ---------------------------------------------------------------------------
// Path tracing.

namespace renderdetail {

constexpr double kRayEpsilon = 1e-7;

struct SceneHit {
  double t = kInf;
  int triangle = -1;
  double u = 0, v = 0;
  int light = -1;

  bool hit_surface() const { return triangle >= 0 && light < 0; }
  bool hit_light() const { return light >= 0; }
  bool miss() const { return triangle < 0 && light < 0; }
};

inline double intersect_rect(const Ray& ray, const RectLight& light) {
  double denom = dot(light.normal, ray.direction);
  if (denom >= 0) return kInf;  // back face or parallel: invisible
  double t = dot(light.normal, light.center - ray.origin) / denom;
  if (t <= ray.t_min || t >= ray.t_max) return kInf;
  Vec3 p = ray.origin + ray.direction * t;
  Vec3 d = p - light.center;
  if (std::abs(dot(d, light.tangent_u)) > light.half_x ||
      std::abs(dot(d, light.tangent_v)) > light.half_y)
    return kInf;
  return t;
}

inline SceneHit intersect_scene(const RenderScene& scene, const Ray& ray, bool include_lights) {
  SceneHit out;
  if (!scene.triangles.empty()) {
    Hit h = scene.bvh.intersect(ray);
    out.t = h.t;
    out.triangle = h.triangle;
    out.u = h.u;
    out.v = h.v;
  }
  if (include_lights) {
    for (size_t i = 0; i < scene.lights.size(); ++i) {
      double t = intersect_rect(ray, scene.lights[i]);
      if (t < out.t) {
        out.t = t;
        out.light = static_cast<int>(i);
        out.triangle = -1;
      }
    }
  }
  return out;
}

// Solid-angle pdf of sampling direction (point -> y) by uniform area sampling
// of the rect; 0 when y is on the back side.
inline double light_pdf_solid_angle(const RectLight& light, const Vec3& from, const Vec3& y) {
  Vec3 d = y - from;
  double dist2 = length_squared(d);
  if (dist2 <= 0) return 0;
  Vec3 w = d / std::sqrt(dist2);
  double cos_l = dot(light.normal, -w);
  if (cos_l <= 1e-9) return 0;
  return dist2 / (light.area() * cos_l);
}

struct Shading {
  Vec3 position;
  Vec3 normal;       // shading normal flipped toward the incoming ray
  Vec3 geo_normal;   // triangle plane normal, same side as `normal`
  const RenderScene::InstanceInfo* instance = nullptr;
  Brdf brdf;
};

inline Shading resolve_shading(const RenderScene& scene, const Ray& ray, const SceneHit& hit) {
  Shading sh;
  const BvhTriangle& tri = scene.triangles[hit.triangle];
  sh.position = ray.origin + ray.direction * hit.t;
  const auto& normals = scene.tri_normals[hit.triangle];
  double w0 = 1 - hit.u - hit.v;
  Vec3 ns = normalize(normals[0] * w0 + normals[1] * hit.u + normals[2] * hit.v);
  Vec3 ng = cross(tri.v1 - tri.v0, tri.v2 - tri.v0);
  ng = length_squared(ng) > 0 ? normalize(ng) : ns;
  if (dot(ng, ray.direction) > 0) ng = -ng;
  if (dot(ns, ray.direction) > 0) ns = -ns;
  sh.normal = ns;
  sh.geo_normal = ng;
  sh.instance = &scene.instances[scene.tri_instance[hit.triangle]];

  const auto& uvs = scene.tri_uvs[hit.triangle];
  Vec2 uv{uvs[0].x * w0 + uvs[1].x * hit.u + uvs[2].x * hit.v,
          uvs[0].y * w0 + uvs[1].y * hit.u + uvs[2].y * hit.v};
  const Material& m = sh.instance->material;
  sh.brdf.albedo = m.albedo_at(uv);
  sh.brdf.roughness = m.roughness;
  sh.brdf.metallic = m.metallic;
  return sh;
}

inline Ray spawn_ray(const Vec3& position, const Vec3& geo_normal, const Vec3& dir,
                     double t_max = kInf) {
  Vec3 offset_n = dot(geo_normal, dir) >= 0 ? geo_normal : -geo_normal;
  return Ray{position + offset_n * kRayEpsilon, dir, 1e-9, t_max};
}

inline bool shadow_blocked(const RenderScene& scene, const Vec3& from, const Vec3& geo_normal,
                           const Vec3& dir, double dist) {
  if (scene.triangles.empty()) return false;
  Ray ray = spawn_ray(from, geo_normal, dir, dist - 2 * kRayEpsilon);
  return scene.bvh.occluded(ray);
}

// One radiance sample. Draw order per bounce: light NEE (2 per light), env
// NEE (2), BSDF lobe + direction (3).
inline Vec3 trace_path(const RenderScene& scene, Ray ray, int max_depth, Rng& rng) {
  Vec3 radiance{0, 0, 0};
  Vec3 throughput{1, 1, 1};
  bool camera_segment = true;
  double prev_bsdf_pdf = 0;

  for (int depth = 0; depth < max_depth; ++depth) {
    SceneHit hit = intersect_scene(scene, ray, !camera_segment);

    if (hit.hit_light()) {
      const RectLight& light = scene.lights[hit.light];
      double pdf_l = light_pdf_solid_angle(light, ray.origin, ray.origin + ray.direction * hit.t);
      double weight = prev_bsdf_pdf > 0 ? prev_bsdf_pdf / (prev_bsdf_pdf + pdf_l) : 1.0;
      radiance += throughput * light.radiance * weight;
      break;  // lights do not reflect
    }
    if (hit.miss()) {
      if (scene.has_environment()) {
        double weight = 1.0;
        if (!camera_segment && prev_bsdf_pdf > 0) {
          double pdf_e = scene.environment->distribution.pdf(ray.direction);
          weight = prev_bsdf_pdf / (prev_bsdf_pdf + pdf_e);
        }
        radiance += throughput * scene.environment_radiance(ray.direction) * weight;
      }
      break;
    }

    Shading sh = resolve_shading(scene, ray, hit);
    Vec3 wo = -ray.direction;

    // Next-event estimation toward each rect light.
    for (const RectLight& light : scene.lights) {
      double u1 = rng.uniform(), u2 = rng.uniform();
      Vec3 y = light.center + light.tangent_u * ((2 * u1 - 1) * light.half_x) +
               light.tangent_v * ((2 * u2 - 1) * light.half_y);
      Vec3 d = y - sh.position;
      double dist = length(d);
      if (dist <= kRayEpsilon) continue;
      Vec3 wi = d / dist;
      double pdf_l = light_pdf_solid_angle(light, sh.position, y);
      if (pdf_l <= 0) continue;
      double cos_i = dot(sh.normal, wi);
      if (cos_i <= 0) continue;
      Vec3 f = sh.brdf.eval(sh.normal, wo, wi);
      if (max_component(f) <= 0) continue;
      if (shadow_blocked(scene, sh.position, sh.geo_normal, wi, dist)) continue;
      double weight = pdf_l / (pdf_l + sh.brdf.pdf(sh.normal, wo, wi));
      radiance += throughput * f * light.radiance * (cos_i / pdf_l * weight);
    }

    // Next-event estimation toward the environment.
    if (scene.has_environment()) {
      double u1 = rng.uniform(), u2 = rng.uniform();
      double pdf_e = 0;
      Vec3 wi = scene.environment->distribution.sample(u1, u2, &pdf_e);
      double cos_i = dot(sh.normal, wi);
      if (pdf_e > 0 && cos_i > 0) {
        Vec3 f = sh.brdf.eval(sh.normal, wo, wi);
        if (max_component(f) > 0 &&
            !shadow_blocked(scene, sh.position, sh.geo_normal, wi, kInf)) {
          double weight = pdf_e / (pdf_e + sh.brdf.pdf(sh.normal, wo, wi));
          radiance += throughput * f * scene.environment_radiance(wi) * (cos_i / pdf_e * weight);
        }
      }
    }

    // Continue the path by BSDF sampling.
    Vec3 wi;
    double pdf_b = 0;
    if (!sh.brdf.sample(sh.normal, wo, rng, &wi, &pdf_b)) break;
    Vec3 f = sh.brdf.eval(sh.normal, wo, wi);
    throughput = throughput * f * (dot(sh.normal, wi) / pdf_b);
    if (max_component(throughput) <= 0) break;
    ray = spawn_ray(sh.position, sh.geo_normal, wi);
    prev_bsdf_pdf = pdf_b;
    camera_segment = false;
  }
  return radiance;
}

inline double auto_clamp(const RenderScene& scene) {
  double peak = 1.0;
  for (const RectLight& light : scene.lights) peak = std::max(peak, max_component(light.radiance));
  if (scene.has_environment()) {
    double env_peak = 0;
    for (float v : scene.environment->map.pixels) env_peak = std::max(env_peak, static_cast<double>(v));
    peak = std::max(peak, env_peak * scene.environment->map.intensity_scale * scene.background_scale);
  }
  return 10.0 * peak;
}

}  // namespace renderdetail

inline FrameBuffers render_frame(const RenderScene& scene, const RenderSettings& settings,
                                 uint64_t seed) {
  const CameraFrame& cam = scene.camera;
  const int width = cam.intr.width, height = cam.intr.height;
  FrameBuffers fb;
  fb.width = width;
  fb.height = height;
  fb.rgb.assign(3u * width * height, 0.0);
  fb.depth.assign(static_cast<size_t>(width) * height, kInf);
  fb.normal.assign(3u * width * height, 0.0);
  fb.instance.assign(static_cast<size_t>(width) * height, 0);
  fb.semantic.assign(static_cast<size_t>(width) * height, 0);

  const double clamp_value =
      settings.clamp > 0 ? settings.clamp : renderdetail::auto_clamp(scene);
  fb.stats.clamp_used = clamp_value;

  const double lens_radius = settings.dof ? lens_radius_m(cam) : 0.0;
  const bool use_dof = lens_radius > 0;

  const int tile = std::max(settings.tile_size, 1);
  const int tiles_x = (width + tile - 1) / tile;
  const int tiles_y = (height + tile - 1) / tile;
  std::atomic<int> next_tile{0};
  std::atomic<long> nan_count{0};

  auto worker = [&]() {
    for (;;) {
      int t = next_tile.fetch_add(1);
      if (t >= tiles_x * tiles_y) return;
      int x0 = (t % tiles_x) * tile, y0 = (t / tiles_x) * tile;
      int x1 = std::min(x0 + tile, width), y1 = std::min(y0 + tile, height);
      long local_nan = 0;
      for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
          size_t px = fb.pixel(x, y);

          // Geometric passes from the unjittered center pinhole ray.
          Ray center = center_ray(cam, x, y);
          renderdetail::SceneHit ghit = renderdetail::intersect_scene(scene, center, false);
          if (ghit.hit_surface()) {
            renderdetail::Shading sh = renderdetail::resolve_shading(scene, center, ghit);
            fb.depth[px] = dot(sh.position - cam.position, cam.forward);
            fb.normal[3 * px + 0] = sh.normal.x;
            fb.normal[3 * px + 1] = sh.normal.y;
            fb.normal[3 * px + 2] = sh.normal.z;
            fb.instance[px] = sh.instance->instance_id;
            fb.semantic[px] = sh.instance->category_id;
          }

          Vec3 acc{0, 0, 0};
          for (int s = 0; s < settings.spp; ++s) {
            Rng rng = Rng(seed).fork(static_cast<uint64_t>(px)).fork(static_cast<uint64_t>(s));
            double dx = rng.uniform(), dy = rng.uniform();
            Vec3 dir = normalize(cam.pixel_direction(x + dx, y + dy));
            Vec3 origin = cam.position;
            if (use_dof) {
              double lu = rng.uniform(), lv = rng.uniform();
              double r = lens_radius * std::sqrt(lu);
              double phi = 2 * kPi * lv;
              double cos_f = dot(dir, cam.forward);
              Vec3 focus = cam.position + dir * (cam.focus_distance / cos_f);
              origin = cam.position + cam.right * (r * std::cos(phi)) +
                       cam.down * (r * std::sin(phi));
              dir = normalize(focus - origin);
            }
            Vec3 L = renderdetail::trace_path(scene, Ray{origin, dir}, settings.max_depth, rng);
            if (!is_finite(L)) {
              ++local_nan;
              L = {0, 0, 0};
            }
            acc += min(L, Vec3{clamp_value, clamp_value, clamp_value});
          }
          fb.rgb[3 * px + 0] = acc.x / settings.spp;
          fb.rgb[3 * px + 1] = acc.y / settings.spp;
          fb.rgb[3 * px + 2] = acc.z / settings.spp;
        }
      }
      if (local_nan) nan_count.fetch_add(local_nan);
    }
  };

  int thread_count = settings.threads > 0
                         ? settings.threads
                         : static_cast<int>(std::thread::hardware_concurrency());
  thread_count = std::max(1, std::min(thread_count, tiles_x * tiles_y));
  if (thread_count == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(thread_count);
    for (int i = 0; i < thread_count; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }
  fb.stats.nan_samples = nan_count.load();
  return fb;
}

// Per-frame render seed: a run-level function of (seed, frame) so frames can
// be rendered in any order or in isolation.
inline uint64_t frame_render_seed(uint64_t seed, int frame) {
  return frame_stream(seed, static_cast<uint64_t>(frame), "render").next_u64();
}

inline void validate_frame_interval(int scene_count, int first, int last) {
  if (first < 0 || last < first || last >= scene_count)
    throw ConfigError("frame interval [" + std::to_string(first) + ", " + std::to_string(last) +
                      "] violates 0 <= start <= end <= " + std::to_string(scene_count - 1));
}

// Renders scenes[first..last] inclusive, in frame order, loading each HDRI
// once per contiguous batch.
inline std::vector<FrameBuffers> render_range(const GenerationConfig& cfg,
                                              const AssetCatalog& catalog,
                                              const std::vector<SceneSpec>& scenes, int first,
                                              int last, const RenderSettings& settings) {
  validate_frame_interval(static_cast<int>(scenes.size()), first, last);
  std::vector<FrameBuffers> out;
  out.reserve(last - first + 1);
  int cached_index = -2;
  std::shared_ptr<Environment> env;
  for (int f = first; f <= last; ++f) {
    const SceneSpec& scene = scenes[f];
    if (scene.hdri_index != cached_index) {
      env = scene.hdri_index >= 0 ? load_environment(catalog.hdri_paths[scene.hdri_index])
                                  : nullptr;
      cached_index = scene.hdri_index;
    }
    RenderScene rs = build_render_scene(cfg, catalog, scene, env);
    out.push_back(render_frame(rs, settings, frame_render_seed(cfg.seed, f)));
  }
  return out;
}

}  // namespace synthgen

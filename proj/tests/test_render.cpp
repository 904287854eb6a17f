// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <map>
#include <memory>

#include <json.hpp>

#include "synthgen/catalog.hpp"
#include "synthgen/config.hpp"
#include "synthgen/pipeline.hpp"
#include "synthgen/render.hpp"
#include "synthgen/sampler.hpp"

#include "fixtures.hpp"

using synthgen::CameraSpec;
using synthgen::Environment;
using synthgen::EnvironmentDistribution;
using synthgen::FrameBuffers;
using synthgen::HdriMap;
using synthgen::kInf;
using synthgen::LightSpec;
using synthgen::Material;
using synthgen::Mesh;
using synthgen::RenderScene;
using synthgen::RenderSettings;
using synthgen::Transform;
using synthgen::Vec3;

namespace {

// Constant-radiance environment, built in memory: flat maps make the sampler
// fall back to uniform sphere sampling, which the furnace identity needs.
std::shared_ptr<Environment> constant_environment(float radiance) {
  auto env = std::make_shared<Environment>();
  env->map.width = 8;
  env->map.height = 4;
  env->map.pixels.assign(3u * 8 * 4, radiance);
  env->distribution = EnvironmentDistribution(env->map);
  return env;
}

CameraSpec look_camera(const Vec3& position, const Vec3& target, int size, double focal) {
  CameraSpec cam;
  cam.position = position;
  cam.look_at = target;
  cam.intrinsics.fx = cam.intrinsics.fy = focal;
  cam.intrinsics.cx = size / 2.0;
  cam.intrinsics.cy = size / 2.0;
  cam.intrinsics.width = cam.intrinsics.height = size;
  return cam;
}

Material white_diffuse() {
  Material m;
  m.base_color = {1, 1, 1};
  m.roughness = 1.0;
  m.metallic = 0.0;
  return m;
}

RenderSettings fast_settings(int spp, int max_depth = 3) {
  RenderSettings s;
  s.spp = spp;
  s.max_depth = max_depth;
  s.tile_size = 16;
  s.dof = false;
  s.threads = 2;
  return s;
}

bool buffers_identical(const FrameBuffers& a, const FrameBuffers& b) {
  return a.rgb == b.rgb && a.depth == b.depth && a.normal == b.normal &&
         a.instance == b.instance && a.semantic == b.semantic;
}

}  // namespace

TEST_CASE("furnace: white diffuse sphere in a constant environment returns it", "[render]") {
  const float level = 0.5f;
  RenderScene scene;
  scene.camera = synthgen::make_camera_frame(look_camera({0, 0, 4}, {0, 0, 0}, 32, 32));
  scene.environment = constant_environment(level);
  scene.background_scale = 1.0;
  scene.add_mesh(synthgen::make_sphere(1.0, 48, 32), Transform{}, 1, white_diffuse());
  scene.finalize();

  FrameBuffers fb = synthgen::render_frame(scene, fast_settings(160), 11);

  // Pixels whose whole footprint misses the sphere see the environment
  // directly, so they are exact. Interior sphere pixels must agree in
  // expectation (energy conservation of a white diffuse surface under
  // uniform light). The 2 px silhouette band mixes background with grazing
  // hits, where tessellation legitimately loses energy, so it is skipped.
  const double silhouette_px = 32.0 * std::tan(std::asin(1.0 / 4.0));
  double sphere_sum = 0;
  long sphere_pixels = 0;
  for (int y = 0; y < fb.height; ++y)
    for (int x = 0; x < fb.width; ++x) {
      size_t px = fb.pixel(x, y);
      double off = std::hypot(x - 16.0, y - 16.0);
      if (off > silhouette_px + 2.0) {
        REQUIRE(fb.instance[px] == 0);
        REQUIRE(fb.rgb[3 * px] == Catch::Approx(level).epsilon(1e-12));
        REQUIRE(fb.rgb[3 * px + 1] == fb.rgb[3 * px]);
        REQUIRE(fb.rgb[3 * px + 2] == fb.rgb[3 * px]);
      } else if (off < silhouette_px - 2.0) {
        REQUIRE(fb.instance[px] == 1);
        sphere_sum += (fb.rgb[3 * px] + fb.rgb[3 * px + 1] + fb.rgb[3 * px + 2]) / 3.0;
        ++sphere_pixels;
        for (int c = 0; c < 3; ++c)
          REQUIRE(fb.rgb[3 * px + c] == Catch::Approx(level).margin(0.15 * level));
      }
    }
  REQUIRE(sphere_pixels > 50);
  REQUIRE(sphere_sum / sphere_pixels == Catch::Approx(level).margin(0.02 * level));
}

TEST_CASE("zero illumination renders exactly zero radiance", "[render]") {
  RenderScene scene;
  scene.camera = synthgen::make_camera_frame(look_camera({0, 0, 4}, {0, 0, 0}, 16, 16));
  scene.add_mesh(synthgen::make_sphere(1.0, 24, 16), Transform{}, 1, white_diffuse());
  scene.finalize();

  FrameBuffers fb = synthgen::render_frame(scene, fast_settings(8), 3);
  for (double v : fb.rgb) REQUIRE(v == 0.0);

  // Geometric passes are still populated from the center rays.
  size_t center = fb.pixel(8, 8);
  REQUIRE(fb.instance[center] == 1);
  REQUIRE(std::isfinite(fb.depth[center]));

  // An environment scaled to zero is equivalent to no environment.
  scene.environment = constant_environment(2.0f);
  scene.background_scale = 0.0;
  FrameBuffers fb2 = synthgen::render_frame(scene, fast_settings(8), 3);
  for (double v : fb2.rgb) REQUIRE(v == 0.0);
}

TEST_CASE("depth pass is camera-space z with an analytic sphere oracle", "[render]") {
  // Unit sphere 5 m down the optical axis: the closest surface point is at
  // distance 4. A long focal length keeps the probing rays near the pole so
  // tessellation chords stay within the tolerance.
  RenderScene scene;
  scene.camera = synthgen::make_camera_frame(look_camera({0, 0, 5}, {0, 0, 0}, 64, 512));
  scene.add_mesh(synthgen::make_sphere(1.0, 64, 128), Transform{}, 1, white_diffuse());
  scene.finalize();

  FrameBuffers fb = synthgen::render_frame(scene, fast_settings(1, 1), 3);
  double min_depth = kInf;
  for (double d : fb.depth) min_depth = std::min(min_depth, d);
  REQUIRE(min_depth == Catch::Approx(4.0).margin(1e-3));

  // A miss keeps the +inf sentinel: aim the camera away from the sphere.
  RenderScene away;
  away.camera = synthgen::make_camera_frame(look_camera({0, 0, 5}, {0, 0, 10}, 8, 8));
  away.add_mesh(synthgen::make_sphere(1.0, 16, 8), Transform{}, 1, white_diffuse());
  away.finalize();
  FrameBuffers fb2 = synthgen::render_frame(away, fast_settings(1, 1), 3);
  for (double d : fb2.depth) REQUIRE(d == kInf);
  for (int32_t id : fb2.instance) REQUIRE(id == 0);
}

TEST_CASE("geometric passes are independent of spp", "[render]") {
  RenderScene scene;
  scene.camera = synthgen::make_camera_frame(look_camera({0, 0, 4}, {0, 0, 0}, 24, 24));
  scene.environment = constant_environment(1.0f);
  scene.background_scale = 1.0;
  scene.add_mesh(synthgen::make_sphere(1.0, 24, 16), Transform{}, 7, white_diffuse());
  scene.finalize();

  FrameBuffers lo = synthgen::render_frame(scene, fast_settings(1), 99);
  FrameBuffers hi = synthgen::render_frame(scene, fast_settings(8), 99);
  REQUIRE(lo.depth == hi.depth);
  REQUIRE(lo.normal == hi.normal);
  REQUIRE(lo.instance == hi.instance);
  REQUIRE(lo.semantic == hi.semantic);
  REQUIRE(lo.rgb != hi.rgb);  // more samples change the Monte Carlo average
}

TEST_CASE("output is bit-identical across thread counts and tile sizes", "[render]") {
  RenderScene scene;
  scene.camera = synthgen::make_camera_frame(look_camera({0, 0.4, 3}, {0, 0, 0}, 24, 24));
  scene.environment = constant_environment(0.8f);
  scene.background_scale = 1.0;
  scene.add_mesh(synthgen::make_sphere(0.8, 24, 16), Transform{}, 1, white_diffuse());
  Material red;
  red.base_color = {0.8, 0.2, 0.1};
  red.roughness = 0.4;
  red.metallic = 1.0;
  scene.add_mesh(synthgen::make_box({0.4, 0.4, 0.4}), Transform{{}, Vec3{1.2, 0, 0}}, 2, red);
  LightSpec spot;
  spot.position = {0, 0, 3};
  spot.target = {0, 0, 0};
  spot.intensity = 20;
  spot.size = 0.5;
  scene.lights.push_back(synthgen::make_rect_light(spot));
  scene.finalize();

  RenderSettings a = fast_settings(6);
  a.threads = 1;
  a.tile_size = 32;
  RenderSettings b = fast_settings(6);
  b.threads = 5;
  b.tile_size = 7;
  FrameBuffers fa = synthgen::render_frame(scene, a, 42);
  FrameBuffers fbuf = synthgen::render_frame(scene, b, 42);
  REQUIRE(buffers_identical(fa, fbuf));

  // A different render seed changes the image.
  FrameBuffers fc = synthgen::render_frame(scene, a, 43);
  REQUIRE(fa.rgb != fc.rgb);
}

TEST_CASE("rect light illuminates a floor to its analytic irradiance", "[render]") {
  // Square light (half width a) at height h over a white Lambertian floor.
  // Below the center, irradiance has the closed form of four corner
  // rectangles: E = 4 * (L/2) [ A/sqrt(1+A^2) atan(A/sqrt(1+A^2)) ] * 2 with
  // A = a/h, and the pixel value is E/pi for albedo one.
  const double intensity = 10.0;
  const double a = 0.25, h = 1.0;
  LightSpec spec;
  spec.position = {0, 0, h};
  spec.target = {0, 0, 0};
  spec.intensity = intensity;
  spec.size = 2 * a;

  // Telephoto 9x9 camera: every ray lands within a few millimeters of the
  // point below the light center, where the closed form applies.
  RenderScene scene;
  scene.camera = synthgen::make_camera_frame(look_camera({0, 0, 2}, {0, 0, 0}, 9, 512));
  scene.add_mesh(synthgen::make_ground_plane(10.0), Transform{}, 1, white_diffuse());
  scene.lights.push_back(synthgen::make_rect_light(spec));
  scene.finalize();

  FrameBuffers fb = synthgen::render_frame(scene, fast_settings(512), 5);

  const double radiance = intensity / synthgen::kPi;
  const double A = a / h;
  const double s = A / std::sqrt(1 + A * A);
  const double quadrant = (radiance / 2.0) * 2.0 * (s * std::atan(s));
  const double expected = 4.0 * quadrant / synthgen::kPi;

  size_t center = fb.pixel(4, 4);
  for (int c = 0; c < 3; ++c)
    REQUIRE(fb.rgb[3 * center + c] == Catch::Approx(expected).epsilon(0.02));

  // The camera looks through the light from behind: it neither shows up in
  // the passes nor blocks the view of the floor.
  REQUIRE(fb.instance[center] == 1);
  REQUIRE(fb.depth[center] == Catch::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("lights are invisible to camera rays", "[render]") {
  LightSpec spec;
  spec.position = {0, 0, 1};
  spec.target = {0, 0, 0};
  spec.intensity = 50;
  spec.size = 1.0;

  // Camera below the light, looking up at its emitting face: rect lights are
  // excluded from camera rays, so the image stays black with empty passes.
  RenderScene scene;
  scene.camera = synthgen::make_camera_frame(look_camera({0, 0, -2}, {0, 0, 1}, 8, 8));
  scene.lights.push_back(synthgen::make_rect_light(spec));
  scene.finalize();

  FrameBuffers fb = synthgen::render_frame(scene, fast_settings(4), 9);
  for (double v : fb.rgb) REQUIRE(v == 0.0);
  for (int32_t id : fb.instance) REQUIRE(id == 0);
  for (double d : fb.depth) REQUIRE(d == kInf);
}

TEST_CASE("depth of field responds to the toggle and spares the passes", "[render]") {
  CameraSpec cam = look_camera({0, 0, 5}, {0, 0, 0}, 24, 48);
  cam.fstop = 0.8;  // wide aperture so the foreground blur is unmistakable

  RenderScene scene;
  scene.camera = synthgen::make_camera_frame(cam);
  scene.environment = constant_environment(1.0f);
  scene.background_scale = 1.0;
  scene.add_mesh(synthgen::make_sphere(1.0, 24, 16), Transform{}, 1, white_diffuse());
  Material dark;
  dark.base_color = {0.05, 0.05, 0.05};
  dark.roughness = 1.0;
  scene.add_mesh(synthgen::make_box({0.2, 0.2, 0.2}), Transform{{}, Vec3{0.4, 0, 3}}, 2, dark);
  scene.finalize();

  RenderSettings sharp = fast_settings(16);
  RenderSettings blurred = fast_settings(16);
  blurred.dof = true;
  FrameBuffers f_sharp = synthgen::render_frame(scene, sharp, 21);
  FrameBuffers f_blur = synthgen::render_frame(scene, blurred, 21);

  REQUIRE(f_sharp.rgb != f_blur.rgb);
  REQUIRE(f_sharp.depth == f_blur.depth);
  REQUIRE(f_sharp.instance == f_blur.instance);
  REQUIRE(f_sharp.normal == f_blur.normal);
}

TEST_CASE("radiance clamp bounds samples and reports the value used", "[render]") {
  LightSpec spec;
  spec.position = {0, 0, 1};
  spec.target = {0, 0, 0};
  spec.intensity = 10;
  spec.size = 0.5;

  RenderScene scene;
  scene.camera = synthgen::make_camera_frame(look_camera({0, 0, 2}, {0, 0, 0}, 8, 8));
  scene.add_mesh(synthgen::make_ground_plane(10.0), Transform{}, 1, white_diffuse());
  scene.lights.push_back(synthgen::make_rect_light(spec));
  scene.finalize();

  RenderSettings settings = fast_settings(8);
  settings.clamp = 0.01;
  FrameBuffers fb = synthgen::render_frame(scene, settings, 4);
  REQUIRE(fb.stats.clamp_used == 0.01);
  for (double v : fb.rgb) REQUIRE(v <= 0.01 + 1e-12);

  // Automatic bound: ten times the brightest input radiance.
  settings.clamp = 0;
  FrameBuffers fb2 = synthgen::render_frame(scene, settings, 4);
  REQUIRE(fb2.stats.clamp_used == Catch::Approx(10.0 * 10.0 / synthgen::kPi));
}

TEST_CASE("pass coherence on a fully sampled fixture frame", "[render]") {
  testfix::TempDir tmp;
  testfix::write_fixture_assets(tmp.path());
  nlohmann::json j = testfix::base_config();
  j["camera"]["resolution"] = {48, 48};
  j["render"]["spp"] = 2;
  synthgen::GenerationConfig cfg = synthgen::parse_config(j.dump());
  synthgen::AssetCatalog catalog = synthgen::build_catalog(cfg, tmp.path().string());

  synthgen::SceneSpec scene = synthgen::prepare_scene(cfg, catalog, 0);
  auto env = synthgen::load_environment(catalog.hdri_paths[scene.hdri_index]);
  RenderScene rs = synthgen::build_render_scene(cfg, catalog, scene, env);
  FrameBuffers fb = synthgen::render_frame(rs, fast_settings(2), 17);

  // Expected semantic id per instance id; the ground plane is category 0.
  std::map<int32_t, int32_t> category;
  int max_id = 0;
  for (const auto& inst : scene.instances) {
    category[inst.instance_id] =
        synthgen::catalog_pool(catalog, inst.role)[inst.asset_index].category_id;
    max_id = std::max(max_id, inst.instance_id);
  }
  category[max_id + 1] = 0;  // plane

  long hits = 0;
  for (size_t px = 0; px < fb.instance.size(); ++px) {
    bool has_instance = fb.instance[px] > 0;
    bool has_depth = std::isfinite(fb.depth[px]);
    double n = std::sqrt(fb.normal[3 * px] * fb.normal[3 * px] +
                         fb.normal[3 * px + 1] * fb.normal[3 * px + 1] +
                         fb.normal[3 * px + 2] * fb.normal[3 * px + 2]);
    REQUIRE(has_instance == has_depth);
    if (has_instance) {
      ++hits;
      REQUIRE(n == Catch::Approx(1.0).margin(1e-4));
      REQUIRE(category.count(fb.instance[px]) == 1);
      REQUIRE(fb.semantic[px] == category[fb.instance[px]]);
    } else {
      REQUIRE(n == 0.0);
      REQUIRE(fb.semantic[px] == 0);
    }
  }
  REQUIRE(hits > 0);  // the plane fills most of the frame
}

TEST_CASE("random PBR materials replace asset materials but not the plane", "[render]") {
  testfix::TempDir tmp;
  testfix::write_fixture_assets(tmp.path());
  nlohmann::json j = testfix::base_config();
  synthgen::GenerationConfig cfg = synthgen::parse_config(j.dump());
  synthgen::AssetCatalog catalog = synthgen::build_catalog(cfg, tmp.path().string());
  synthgen::SceneSpec scene = synthgen::prepare_scene(cfg, catalog, 0);

  synthgen::GenerationConfig with = cfg;
  with.random_pbr_materials = true;
  RenderScene plain = synthgen::build_render_scene(cfg, catalog, scene, nullptr);
  RenderScene randomized = synthgen::build_render_scene(with, catalog, scene, nullptr);

  REQUIRE(plain.instances.size() == randomized.instances.size());
  size_t object_count = scene.instances.size();
  for (size_t i = 0; i < object_count; ++i) {
    const Material& a = plain.instances[i].material;
    const Material& b = randomized.instances[i].material;
    REQUIRE((a.base_color.x != b.base_color.x || a.roughness != b.roughness ||
             a.metallic != b.metallic));
    REQUIRE(b.base_color.x >= 0.05);
    REQUIRE(b.base_color.x <= 0.95);
    REQUIRE(b.roughness >= 0.1);
    REQUIRE((b.metallic == 0.0 || b.metallic == 1.0));
  }
  // The plane is the last instance and keeps its pool material in both.
  const Material& pa = plain.instances.back().material;
  const Material& pb = randomized.instances.back().material;
  REQUIRE(pa.base_color.x == pb.base_color.x);
  REQUIRE(pa.roughness == pb.roughness);

  // The material stream is per frame: frame 1 draws different values.
  synthgen::SceneSpec scene1 = synthgen::prepare_scene(with, catalog, 1);
  RenderScene randomized1 = synthgen::build_render_scene(with, catalog, scene1, nullptr);
  REQUIRE(randomized.instances[0].material.base_color.x !=
          randomized1.instances[0].material.base_color.x);
}

TEST_CASE("render_range honors the frame interval contract", "[render]") {
  testfix::TempDir tmp;
  testfix::write_fixture_assets(tmp.path());
  nlohmann::json j = testfix::base_config();
  j["scene_count"] = 4;
  j["camera"]["resolution"] = {24, 24};
  j["render"]["spp"] = 1;
  synthgen::GenerationConfig cfg = synthgen::parse_config(j.dump());
  synthgen::AssetCatalog catalog = synthgen::build_catalog(cfg, tmp.path().string());
  std::vector<synthgen::SceneSpec> scenes = synthgen::prepare_run(cfg, catalog);
  REQUIRE(scenes.size() == 4);

  RenderSettings settings = synthgen::render_settings_from(cfg);
  settings.threads = 2;
  std::vector<FrameBuffers> middle = synthgen::render_range(cfg, catalog, scenes, 1, 2, settings);
  REQUIRE(middle.size() == 2);

  // A frame rendered alone is identical to the same frame from a wider range.
  std::vector<FrameBuffers> solo = synthgen::render_range(cfg, catalog, scenes, 2, 2, settings);
  REQUIRE(solo.size() == 1);
  REQUIRE(buffers_identical(solo[0], middle[1]));

  REQUIRE_THROWS_AS(synthgen::render_range(cfg, catalog, scenes, 2, 1, settings),
                    synthgen::ConfigError);
  REQUIRE_THROWS_AS(synthgen::render_range(cfg, catalog, scenes, 0, 4, settings),
                    synthgen::ConfigError);
  REQUIRE_THROWS_AS(synthgen::render_range(cfg, catalog, scenes, -1, 1, settings),
                    synthgen::ConfigError);
}

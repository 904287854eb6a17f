// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include "synthgen/config.hpp"
#include "synthgen/errors.hpp"

using nlohmann::json;
using synthgen::ConfigError;
using synthgen::GenerationConfig;

TEST_CASE("empty object yields the documented defaults", "[config]") {
  GenerationConfig cfg = synthgen::parse_config("{}");
  REQUIRE(cfg.scene_count == 1);
  REQUIRE(cfg.seed == 0);
  REQUIRE(cfg.physics_enabled == false);
  REQUIRE(cfg.min_visible_pixels == 16);
  REQUIRE(cfg.camera.elevation.min == 15);
  REQUIRE(cfg.camera.elevation.max == 75);
  REQUIRE(cfg.camera.distance.min == 1.0);
  REQUIRE(cfg.camera.distance.max == 1.5);
  REQUIRE(cfg.camera.width == 512);
  REQUIRE(cfg.lights.intensity.min == 50);
  REQUIRE(cfg.lights.intensity.max == 200);
  REQUIRE(cfg.lights.exponent == 1);
  REQUIRE(cfg.spawn.target_count.min == 1);
  REQUIRE(cfg.spawn.position_offset.z.min == 0.0);
  REQUIRE(cfg.spawn.position_offset.z.max == 0.3);
  REQUIRE(cfg.assets.plane_enabled);
  REQUIRE(cfg.render.spp == 16);
  REQUIRE(cfg.output_passes == synthgen::known_passes());
}

TEST_CASE("unknown keys are rejected with the offending name", "[config]") {
  REQUIRE_THROWS_MATCHES(synthgen::parse_config(R"({"scene_cout": 3})"), ConfigError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("scene_cout")));
  REQUIRE_THROWS_MATCHES(
      synthgen::parse_config(R"({"camera": {"elevaton": [0, 1]}})"), ConfigError,
      Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("elevaton")));
}

TEST_CASE("malformed JSON reports a syntax error", "[config]") {
  REQUIRE_THROWS_AS(synthgen::parse_config("{"), ConfigError);
}

TEST_CASE("range and band violations name their field", "[config]") {
  auto expect_bad = [](const json& patch, const std::string& needle) {
    REQUIRE_THROWS_MATCHES(
        synthgen::parse_config(patch.dump()), ConfigError,
        Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring(needle)));
  };
  expect_bad({{"scene_count", 0}}, "scene_count");
  expect_bad({{"camera", {{"fstop", {0.0, 4.0}}}}}, "camera.fstop");
  expect_bad({{"camera", {{"elevation", {-100, 20}}}}}, "camera.elevation");
  expect_bad({{"camera", {{"distance", {2.0, 1.0}}}}}, "camera.distance");
  expect_bad({{"spawn", {{"orientation", {{"x", {-200, 10}}}}}}}, "spawn.orientation.x");
  expect_bad({{"lights", {{"size", 0.0}}}}, "lights.size");
  expect_bad({{"hdri_batch_size", 0}}, "hdri_batch_size");
  expect_bad({{"min_visible_pixels", 0}}, "min_visible_pixels");
  expect_bad({{"output_passes", {"rgb", "alpha"}}}, "alpha");
  expect_bad({{"render", {{"spp", 0}}}}, "render.spp");
  expect_bad({{"scene_count", 2}, {"render_start", 2}, {"render_end", 1}}, "render_start");
  expect_bad({{"render_end", 3}}, "render_end");
}

TEST_CASE("category ids must map to a single class name", "[config]") {
  json two_names = {
      {"assets",
       {{"targets",
         {{{"path", "a.obj"}, {"category_id", 1}, {"name", "widget"}},
          {{"path", "b.obj"}, {"category_id", 1}, {"name", "gadget"}}}}}}};
  REQUIRE_THROWS_MATCHES(
      synthgen::parse_config(two_names.dump()), ConfigError,
      Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("already maps")));

  // Same id with the same name is just extra copies of the class.
  json same_name = {
      {"assets",
       {{"targets",
         {{{"path", "a.obj"}, {"category_id", 1}, {"name", "widget"}},
          {{"path", "b.obj"}, {"category_id", 1}, {"name", "widget"}}}}}}};
  REQUIRE_NOTHROW(synthgen::parse_config(same_name.dump()));

  // The class name defaults to the file stem.
  json stem_clash = {
      {"assets",
       {{"targets",
         {{{"path", "models/widget.obj"}, {"category_id", 1}},
          {{"path", "other/widget.obj"}, {"category_id", 1}}}}}}};
  REQUIRE_NOTHROW(synthgen::parse_config(stem_clash.dump()));
}

TEST_CASE("render interval defaults to every scene", "[config]") {
  GenerationConfig cfg = synthgen::parse_config(R"({"scene_count": 5})");
  REQUIRE(cfg.render_start == 0);
  REQUIRE(cfg.render_end == 4);

  cfg = synthgen::parse_config(R"({"scene_count": 5, "render_start": 2, "render_end": 3})");
  REQUIRE(cfg.render_start == 2);
  REQUIRE(cfg.render_end == 3);
}

TEST_CASE("config survives a serialization round trip", "[config]") {
  json source = {
      {"scene_count", 4},
      {"seed", 99},
      {"physics_enabled", true},
      {"background_light_scale", {0.2, 0.8}},
      {"camera",
       {{"resolution", {128, 96}}, {"intrinsics_randomization", true},
        {"focal_length_px", 160.0}}},
      {"lights", {{"exponent", 2.5}, {"color_randomization", true}}},
      {"spawn", {{"fake_count", {1, 2}}, {"fake_amplitude", 0.2}}},
      {"assets",
       {{"targets", {{{"path", "x.obj"}, {"category_id", 3}, {"copies", 2}}}},
        {"plane_materials", {{{"base_color", {0.1, 0.2, 0.3}}}}},
        {"plane_size", 6.0}}},
      {"render", {{"spp", 8}, {"clamp", 12.0}}}};
  GenerationConfig a = synthgen::parse_config(source.dump());
  GenerationConfig b = synthgen::parse_config_json(synthgen::to_json(a));
  REQUIRE(a == b);
  REQUIRE(synthgen::to_json(a).dump() == synthgen::to_json(b).dump());
}

TEST_CASE("seed accepts the full unsigned 64-bit range", "[config]") {
  GenerationConfig cfg = synthgen::parse_config(R"({"seed": 18446744073709551615})");
  REQUIRE(cfg.seed == 18446744073709551615ull);
}

TEST_CASE("nominal focal length falls back to the image width", "[config]") {
  GenerationConfig cfg = synthgen::parse_config(R"({"camera": {"resolution": [320, 240]}})");
  REQUIRE(cfg.nominal_focal_px() == 320.0);
  cfg = synthgen::parse_config(R"({"camera": {"focal_length_px": 500.0}})");
  REQUIRE(cfg.nominal_focal_px() == 500.0);
}

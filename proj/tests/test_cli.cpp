// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

// Drives the installed command-line binary end to end through std::system.

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <string>

#include <sys/wait.h>

#include <json.hpp>

#include "synthgen/io.hpp"

#include "fixtures.hpp"

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args, const std::string& capture_dir = "") {
  std::string cmd = std::string(SYNTHGEN_CLI_PATH) + " " + args;
  if (!capture_dir.empty())
    cmd += " > " + capture_dir + "/stdout.txt 2> " + capture_dir + "/stderr.txt";
  else
    cmd += " > /dev/null 2> /dev/null";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) { return testfix::read_bytes(path); }

// Assets plus a config file living next to them, as a user would lay out.
struct CliFixture {
  testfix::TempDir assets;
  testfix::TempDir out;
  std::string config_path;

  explicit CliFixture(nlohmann::json overrides = nlohmann::json::object()) {
    testfix::write_fixture_assets(assets.path());
    nlohmann::json j = testfix::base_config();
    j.merge_patch(overrides);
    config_path = (assets.path() / "config.json").string();
    synthgen::write_text_file(config_path, j.dump(2));
  }

  std::string run_dir() const { return (out.path() / "run").string(); }
};

}  // namespace

TEST_CASE("generate and render build a complete run directory", "[cli]") {
  CliFixture fix;
  REQUIRE(run_cli("generate --config " + fix.config_path + " --out " + fix.run_dir(),
                  fix.out.path().string()) == 0);
  REQUIRE(fs::exists(fs::path(fix.run_dir()) / "scenes" / "frame_000000.json"));
  REQUIRE(fs::exists(fs::path(fix.run_dir()) / "scenes" / "frame_000001.json"));
  REQUIRE_THAT(slurp(fix.out.path().string() + "/stdout.txt"),
               Catch::Matchers::ContainsSubstring("generated 2 scene specs"));

  REQUIRE(run_cli("render --config " + fix.config_path + " --out " + fix.run_dir() +
                      " --threads 2",
                  fix.out.path().string()) == 0);
  for (const char* rel : {"images/frame_000000.png", "images/frame_000001.png",
                          "depth/frame_000000.pfm", "masks/frame_000000.png",
                          "labels/frame_000000.txt", "annotations/coco.json",
                          "meta/frame_000000.json"})
    REQUIRE(fs::exists(fs::path(fix.run_dir()) / rel));
  REQUIRE_THAT(slurp(fix.out.path().string() + "/stdout.txt"),
               Catch::Matchers::ContainsSubstring("rendered 2 frame(s)"));

  // Inspect summarizes the finished run.
  REQUIRE(run_cli("inspect --run " + fix.run_dir(), fix.out.path().string()) == 0);
  std::string summary = slurp(fix.out.path().string() + "/stdout.txt");
  REQUIRE_THAT(summary, Catch::Matchers::ContainsSubstring("rendered:     2 frame(s)"));
  REQUIRE_THAT(summary, Catch::Matchers::ContainsSubstring("fnv1a:"));
}

TEST_CASE("render honors frame intervals and rejects bad ones", "[cli]") {
  CliFixture fix;
  REQUIRE(run_cli("generate --config " + fix.config_path + " --out " + fix.run_dir()) == 0);
  REQUIRE(run_cli("render --config " + fix.config_path + " --out " + fix.run_dir() +
                  " --frames 1..1 --threads 2") == 0);
  REQUIRE(fs::exists(fs::path(fix.run_dir()) / "images" / "frame_000001.png"));
  REQUIRE_FALSE(fs::exists(fs::path(fix.run_dir()) / "images" / "frame_000000.png"));

  // Out-of-range and unparseable intervals are configuration errors.
  REQUIRE(run_cli("render --config " + fix.config_path + " --out " + fix.run_dir() +
                  " --frames 5") == 1);
  REQUIRE(run_cli("render --config " + fix.config_path + " --out " + fix.run_dir() +
                  " --frames 1..0") == 1);
  REQUIRE(run_cli("render --config " + fix.config_path + " --out " + fix.run_dir() +
                  " --frames x..y", fix.out.path().string()) == 1);
  REQUIRE_THAT(slurp(fix.out.path().string() + "/stderr.txt"),
               Catch::Matchers::ContainsSubstring("--frames expects"));
}

TEST_CASE("seed overrides reproduce or change runs deterministically", "[cli]") {
  CliFixture fix;
  std::string run_a = (fix.out.path() / "a").string();
  std::string run_b = (fix.out.path() / "b").string();
  std::string run_c = (fix.out.path() / "c").string();
  REQUIRE(run_cli("generate --config " + fix.config_path + " --out " + run_a + " --seed 99") == 0);
  REQUIRE(run_cli("generate --config " + fix.config_path + " --out " + run_b + " --seed 99") == 0);
  REQUIRE(run_cli("generate --config " + fix.config_path + " --out " + run_c + " --seed 100") == 0);

  std::string spec_a = slurp(run_a + "/scenes/frame_000000.json");
  REQUIRE(spec_a == slurp(run_b + "/scenes/frame_000000.json"));
  REQUIRE(spec_a != slurp(run_c + "/scenes/frame_000000.json"));

  // Re-running against the same directory with a different seed is refused.
  REQUIRE(run_cli("generate --config " + fix.config_path + " --out " + run_a + " --seed 100",
                  fix.out.path().string()) == 1);
  REQUIRE_THAT(slurp(fix.out.path().string() + "/stderr.txt"),
               Catch::Matchers::ContainsSubstring("different config"));
}

TEST_CASE("evaluate scores detection files and writes reports", "[cli]") {
  testfix::TempDir tmp;
  nlohmann::json gt = {
      {"images", {{{"id", 1}, {"file_name", "x.png"}, {"width", 64}, {"height", 64}}}},
      {"annotations",
       {{{"id", 1}, {"image_id", 1}, {"category_id", 1}, {"bbox", {8.0, 8.0, 16.0, 16.0}}}}},
      {"categories", {{{"id", 1}, {"name", "widget"}}}}};
  nlohmann::json dets = nlohmann::json::array(
      {{{"image_id", 1}, {"category_id", 1}, {"bbox", {8.0, 8.0, 16.0, 16.0}}, {"score", 0.9}}});
  std::string gt_path = tmp.file("gt.json");
  std::string det_path = tmp.file("det.json");
  std::string report_path = tmp.file("report.json");
  synthgen::write_text_file(gt_path, gt.dump());
  synthgen::write_text_file(det_path, dets.dump());

  REQUIRE(run_cli("evaluate --ground-truth " + gt_path + " --detections " + det_path +
                      " --out " + report_path,
                  tmp.path().string()) == 0);
  std::string table = slurp(tmp.path().string() + "/stdout.txt");
  REQUIRE_THAT(table, Catch::Matchers::ContainsSubstring("widget"));
  REQUIRE_THAT(table, Catch::Matchers::ContainsSubstring("mAP"));

  nlohmann::json report = nlohmann::json::parse(slurp(report_path));
  REQUIRE(report["mAP50"].get<double>() == 1.0);
  REQUIRE(report["mAP50_95"].get<double>() == 1.0);

  // Malformed detections are a data error.
  synthgen::write_text_file(det_path, nlohmann::json::object().dump());
  REQUIRE(run_cli("evaluate --ground-truth " + gt_path + " --detections " + det_path) == 2);
}

TEST_CASE("exit codes distinguish usage, config, and data errors", "[cli]") {
  CliFixture fix;
  testfix::TempDir tmp;

  REQUIRE(run_cli("") == 1);               // a subcommand is required
  REQUIRE(run_cli("frobnicate") == 1);     // unknown subcommand
  REQUIRE(run_cli("generate --out /tmp/x") == 1);  // missing --config

  // Unreadable config file: data error.
  REQUIRE(run_cli("generate --config " + tmp.path().string() + "/absent.json --out " +
                  fix.run_dir()) == 2);

  // Config that parses as JSON but violates the schema: config error.
  std::string bad = tmp.file("bad.json");
  synthgen::write_text_file(bad, "{\"scene_count\": -4}");
  REQUIRE(run_cli("generate --config " + bad + " --out " + fix.run_dir()) == 1);

  // Inspecting a directory that is not a run: data error.
  REQUIRE(run_cli("inspect --run " + tmp.path().string(), tmp.path().string()) == 2);
  REQUIRE_THAT(slurp(tmp.path().string() + "/stderr.txt"),
               Catch::Matchers::ContainsSubstring("manifest.json"));

  // --help is a clean exit.
  REQUIRE(run_cli("--help") == 0);
}

// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end.
//
//   synthgen generate  --config cfg.json --out DIR [--seed N]
//   synthgen render    --config cfg.json --out DIR [--seed N] [--frames A..B]
//                      [--spp N] [--threads N]
//   synthgen evaluate  --ground-truth gt.json --detections det.json [--out report.json]
//   synthgen inspect   --run DIR
//
// Asset paths in the config resolve relative to the config file's directory;
// the SYNTHGEN_ASSET_ROOT environment variable overrides that base. Exit
// codes: 0 success, 1 configuration or usage error, 2 data or asset error,
// 3 internal error.

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "synthgen/synthgen.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::optional<long long> seed;
};

struct RenderArgs {
  std::string frames;  // "A..B" or "N"; empty = all
  int spp = 0;         // 0 = config value
  int threads = 0;     // 0 = hardware concurrency
};

// "A..B" inclusive, or a single frame "N".
std::pair<int, int> parse_frame_interval(const std::string& text, int scene_count) {
  auto fail = [&]() -> std::pair<int, int> {
    throw synthgen::ConfigError("--frames expects A..B or a single frame, got '" + text + "'");
  };
  size_t sep = text.find("..");
  try {
    if (sep == std::string::npos) {
      size_t used = 0;
      int frame = std::stoi(text, &used);
      if (used != text.size()) return fail();
      return {frame, frame};
    }
    size_t used_a = 0, used_b = 0;
    std::string a = text.substr(0, sep), b = text.substr(sep + 2);
    int first = std::stoi(a, &used_a);
    int last = std::stoi(b, &used_b);
    if (used_a != a.size() || used_b != b.size()) return fail();
    return {first, last};
  } catch (const std::invalid_argument&) {
    return fail();
  } catch (const std::out_of_range&) {
    return fail();
  }
  (void)scene_count;
}

std::string asset_base_dir(const std::string& config_path) {
  if (const char* root = std::getenv("SYNTHGEN_ASSET_ROOT"); root && *root) return root;
  return std::filesystem::path(config_path).parent_path().string();
}

struct LoadedRun {
  synthgen::GenerationConfig cfg;
  synthgen::AssetCatalog catalog;
  std::string base_dir;
};

LoadedRun load_run_inputs(const CommonArgs& args) {
  LoadedRun run;
  run.cfg = synthgen::parse_config(synthgen::read_text_file(args.config_path));
  if (args.seed) run.cfg.seed = static_cast<uint64_t>(*args.seed);
  run.base_dir = asset_base_dir(args.config_path);
  run.catalog = synthgen::build_catalog(run.cfg, run.base_dir);
  return run;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const std::string& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
}

int run_generate(const CommonArgs& args) {
  LoadedRun run = load_run_inputs(args);
  synthgen::RunPaths paths{args.out_dir};
  synthgen::init_run_dir(paths, run.cfg, run.base_dir);
  std::vector<synthgen::SceneSpec> scenes = synthgen::prepare_run(run.cfg, run.catalog);
  synthgen::write_scene_specs(paths, scenes);
  for (const synthgen::SceneSpec& scene : scenes) print_warnings(scene.warnings);
  std::printf("generated %zu scene specs in %s\n", scenes.size(), args.out_dir.c_str());
  return 0;
}

int run_render(const CommonArgs& args, const RenderArgs& render_args) {
  LoadedRun run = load_run_inputs(args);
  synthgen::RunPaths paths{args.out_dir};
  synthgen::init_run_dir(paths, run.cfg, run.base_dir);

  bool have_specs = true;
  for (int frame = 0; frame < run.cfg.scene_count && have_specs; ++frame)
    have_specs = std::filesystem::exists(paths.scenes() /
                                         (synthgen::frame_stem(frame) + ".json"));
  std::vector<synthgen::SceneSpec> scenes;
  if (have_specs) {
    scenes = synthgen::load_scene_specs(paths, run.cfg.scene_count);
  } else {
    scenes = synthgen::prepare_run(run.cfg, run.catalog);
    synthgen::write_scene_specs(paths, scenes);
  }

  int first = run.cfg.render_start, last = run.cfg.render_end;
  if (last < 0) last = run.cfg.scene_count - 1;
  if (!render_args.frames.empty())
    std::tie(first, last) = parse_frame_interval(render_args.frames, run.cfg.scene_count);

  synthgen::RenderSettings settings = synthgen::render_settings_from(run.cfg);
  if (render_args.spp > 0) settings.spp = render_args.spp;
  settings.threads = render_args.threads;

  synthgen::RenderRunResult result =
      synthgen::render_run(paths, run.cfg, run.catalog, scenes, first, last, settings);
  print_warnings(result.warnings);
  std::printf("rendered %d frame(s) [%d..%d] into %s\n", result.frames_rendered, first, last,
              args.out_dir.c_str());
  return 0;
}

int run_evaluate(const std::string& gt_path, const std::string& det_path,
                 const std::string& report_path) {
  std::map<int, std::string> categories;
  std::vector<synthgen::GroundTruthItem> gt =
      synthgen::ground_truth_from_coco(synthgen::load_json_file(gt_path), &categories);
  std::vector<synthgen::DetectionItem> dets =
      synthgen::detections_from_coco(synthgen::load_json_file(det_path));
  synthgen::EvalResult result = synthgen::evaluate(gt, dets);
  std::printf("%s", synthgen::eval_report_table(result, categories).c_str());
  if (!report_path.empty()) {
    synthgen::write_json_file(report_path, synthgen::eval_report_json(result, categories));
    std::printf("report written to %s\n", report_path.c_str());
  }
  return 0;
}

int run_inspect(const std::string& run_dir) {
  synthgen::RunPaths paths{run_dir};
  if (!std::filesystem::exists(paths.manifest()))
    throw synthgen::DataError("not a run directory (no manifest.json): " + run_dir);
  nlohmann::json manifest = synthgen::load_json_file(paths.manifest().string());

  std::printf("run:          %s\n", run_dir.c_str());
  std::printf("tool version: %s\n", manifest.value("tool_version", std::string{"?"}).c_str());
  std::printf("created:      %s\n", manifest.value("created_at", std::string{"?"}).c_str());
  if (manifest.contains("config")) {
    const auto& cfg = manifest["config"];
    std::printf("seed:         %llu\n",
                static_cast<unsigned long long>(cfg.value("seed", 0ull)));
    std::printf("scenes:       %d\n", cfg.value("scene_count", 0));
  }
  int rendered = manifest.contains("frames") ? static_cast<int>(manifest["frames"].size()) : 0;
  std::printf("rendered:     %d frame(s)\n", rendered);
  for (const auto& entry : manifest.value("assets", nlohmann::json::array()))
    std::printf("asset:        %s  %s\n", entry.value("path", std::string{}).c_str(),
                entry.value("checksum", std::string{}).c_str());
  if (std::filesystem::exists(paths.coco())) {
    nlohmann::json coco = synthgen::load_json_file(paths.coco().string());
    std::printf("annotations:  %zu box(es) over %zu image(s)\n", coco["annotations"].size(),
                coco["images"].size());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"synthgen: physically based synthetic dataset generator"};
  app.require_subcommand(1);

  CommonArgs common;
  RenderArgs render_args;
  std::string gt_path, det_path, report_path, inspect_dir;

  CLI::App* generate = app.add_subcommand("generate", "sample and settle scene specifications");
  generate->add_option("--config", common.config_path, "config JSON")->required();
  generate->add_option("--out", common.out_dir, "run directory")->required();
  generate->add_option("--seed", common.seed, "override the config seed");

  CLI::App* render = app.add_subcommand("render", "render frames and export annotations");
  render->add_option("--config", common.config_path, "config JSON")->required();
  render->add_option("--out", common.out_dir, "run directory")->required();
  render->add_option("--seed", common.seed, "override the config seed");
  render->add_option("--frames", render_args.frames, "frame interval A..B (default: all)");
  render->add_option("--spp", render_args.spp, "override samples per pixel");
  render->add_option("--threads", render_args.threads, "render threads (default: all cores)");

  CLI::App* evaluate = app.add_subcommand("evaluate", "score detections against ground truth");
  evaluate->add_option("--ground-truth", gt_path, "COCO ground-truth JSON")->required();
  evaluate->add_option("--detections", det_path, "COCO results JSON")->required();
  evaluate->add_option("--out", report_path, "write a JSON report here");

  CLI::App* inspect = app.add_subcommand("inspect", "summarize a run directory");
  inspect->add_option("--run", inspect_dir, "run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (generate->parsed()) return run_generate(common);
    if (render->parsed()) return run_render(common, render_args);
    if (evaluate->parsed()) return run_evaluate(gt_path, det_path, report_path);
    if (inspect->parsed()) return run_inspect(inspect_dir);
    return 1;
  } catch (const synthgen::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const synthgen::DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 3;
  }
}

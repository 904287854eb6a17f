// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "synthgen/config.hpp"
#include "synthgen/errors.hpp"
#include "synthgen/material.hpp"
#include "synthgen/mesh.hpp"
#include "synthgen/mesh_io.hpp"
#include "synthgen/rng.hpp"
#include "synthgen/texture.hpp"

namespace synthgen {

// One spawnable asset. Parts stay separate when join_children is off, but an
// instance always places every part rigidly under a single proxy box.
struct CatalogAsset {
  std::string name;
  int category_id = 0;  // >= 1 for targets, 0 otherwise
  int copies = 1;       // per-scene instance capacity
  std::vector<Mesh> parts;
  Material material;
  ProxyBox proxy;            // asset-local, covers all parts
  double bounding_radius = 0;
};

struct AssetCatalog {
  std::vector<CatalogAsset> targets;
  std::vector<CatalogAsset> distractors;
  std::vector<CatalogAsset> fakes;  // deformed target copies, category 0
  std::vector<Material> plane_materials;
  std::vector<std::string> hdri_paths;
  std::map<int, std::string> categories;  // target category id -> class name
};

enum class AssetRole { kTarget, kDistractor, kFake };

inline const char* asset_role_name(AssetRole role) {
  switch (role) {
    case AssetRole::kTarget: return "target";
    case AssetRole::kDistractor: return "distractor";
    case AssetRole::kFake: return "fake";
  }
  return "?";
}

inline const std::vector<CatalogAsset>& catalog_pool(const AssetCatalog& catalog,
                                                     AssetRole role) {
  switch (role) {
    case AssetRole::kTarget: return catalog.targets;
    case AssetRole::kDistractor: return catalog.distractors;
    case AssetRole::kFake: return catalog.fakes;
  }
  return catalog.targets;
}

namespace catalogdetail {

inline std::string resolve_path(const std::string& path, const std::string& base_dir) {
  std::filesystem::path p(path);
  if (p.is_absolute() || base_dir.empty()) return path;
  return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

inline Mesh merged_geometry(const std::vector<Mesh>& parts) {
  return parts.size() == 1 ? parts.front() : merge_children(parts);
}

inline void finish_asset(CatalogAsset& asset) {
  Mesh merged = merged_geometry(asset.parts);
  asset.proxy = compute_proxy_box(merged);
  asset.bounding_radius = bounding_sphere_radius(merged);
}

inline CatalogAsset load_catalog_asset(const std::string& resolved, const std::string& name,
                                       int category_id, double scale, int copies,
                                       bool join_children) {
  LoadedAsset file = load_asset_file(resolved);
  CatalogAsset asset;
  asset.name = name;
  asset.category_id = category_id;
  asset.copies = copies;
  asset.material = file.material;
  if (file.parts.size() > 1 && join_children) {
    for (Mesh& part : file.parts) part.category_id = category_id;
    asset.parts.push_back(merge_children(file.parts));
  } else {
    asset.parts = std::move(file.parts);
  }
  for (Mesh& part : asset.parts) {
    part.category_id = category_id;
    if (scale != 1.0) scale_mesh(part, scale);
  }
  finish_asset(asset);
  return asset;
}

}  // namespace catalogdetail

// Loads every asset referenced by the config. Fake distractors are generated
// here, one deformed copy per target, seeded from the run seed so a run's
// geometry is fully reproducible. base_dir anchors relative paths (normally
// the config file's directory).
inline AssetCatalog build_catalog(const GenerationConfig& cfg, const std::string& base_dir) {
  AssetCatalog catalog;

  for (const TargetAssetConfig& t : cfg.assets.targets) {
    std::string resolved = catalogdetail::resolve_path(t.path, base_dir);
    std::string name =
        t.name.empty() ? std::filesystem::path(t.path).stem().string() : t.name;
    catalog.targets.push_back(catalogdetail::load_catalog_asset(
        resolved, name, t.category_id, t.scale, t.copies, t.join_children));
    catalog.categories[t.category_id] = name;
  }

  for (const DistractorAssetConfig& d : cfg.assets.distractors) {
    std::string resolved = catalogdetail::resolve_path(d.path, base_dir);
    std::string name = std::filesystem::path(d.path).stem().string();
    catalog.distractors.push_back(
        catalogdetail::load_catalog_asset(resolved, name, 0, d.scale, d.copies, d.join_children));
  }

  for (size_t i = 0; i < catalog.targets.size(); ++i) {
    const CatalogAsset& target = catalog.targets[i];
    uint64_t fake_seed = Rng(cfg.seed).fork("assets.fake").fork(i).next_u64();
    Mesh source = catalogdetail::merged_geometry(target.parts);
    source.category_id = 0;
    CatalogAsset fake;
    fake.name = target.name + "_fake";
    fake.category_id = 0;
    fake.copies = target.copies;
    fake.material = target.material;  // deformation preserves the original texture
    fake.parts.push_back(make_fake_model(source, cfg.spawn.fake_amplitude, fake_seed));
    catalogdetail::finish_asset(fake);
    catalog.fakes.push_back(std::move(fake));
  }

  for (const PlaneMaterialConfig& pm : cfg.assets.plane_materials) {
    Material m;
    m.base_color = pm.base_color;
    m.roughness = pm.roughness;
    m.metallic = pm.metallic;
    if (pm.texture)
      m.base_color_texture = std::make_shared<Texture>(
          load_texture_png(catalogdetail::resolve_path(*pm.texture, base_dir)));
    catalog.plane_materials.push_back(std::move(m));
  }

  for (const std::string& h : cfg.assets.hdri) {
    std::string resolved = catalogdetail::resolve_path(h, base_dir);
    if (!std::filesystem::exists(resolved)) throw DataError("HDRI not found: " + resolved);
    catalog.hdri_paths.push_back(resolved);
  }

  return catalog;
}

}  // namespace synthgen

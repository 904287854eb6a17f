// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>

#include "synthgen/math.hpp"
#include "synthgen/rng.hpp"
#include "synthgen/texture.hpp"

namespace synthgen {

// Metallic-roughness surface description. metallic blends linearly between a
// Lambertian diffuse lobe (0) and a GGX conductor lobe (1).
struct Material {
  Vec3 base_color{0.8, 0.8, 0.8};
  double roughness = 0.8;
  double metallic = 0.0;
  std::shared_ptr<Texture> base_color_texture;  // modulates base_color when set

  Vec3 albedo_at(const Vec2& uv) const {
    Vec3 c = base_color;
    if (base_color_texture && !base_color_texture->empty()) {
      Vec3 t = base_color_texture->sample(uv.x, uv.y);
      c = Vec3{c.x * t.x, c.y * t.y, c.z * t.z};
    }
    return c;
  }
};

// Randomized PBR parameters for appearance domain randomization: base color
// channels U[0.05, 0.95], roughness U[0.1, 1.0], metallic 0 or 1 with
// P(metallic = 1) = 0.3. Draw order is fixed for reproducibility.
inline Material sample_random_pbr_material(Rng& rng) {
  Material m;
  m.base_color.x = rng.uniform(0.05, 0.95);
  m.base_color.y = rng.uniform(0.05, 0.95);
  m.base_color.z = rng.uniform(0.05, 0.95);
  m.roughness = rng.uniform(0.1, 1.0);
  m.metallic = rng.bernoulli(0.3) ? 1.0 : 0.0;
  return m;
}

}  // namespace synthgen

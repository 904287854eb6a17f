// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "synthgen/errors.hpp"
#include "synthgen/image.hpp"
#include "synthgen/math.hpp"

namespace synthgen {

// Linear-space RGB texture with bilinear filtering and wrap addressing.
// 8-bit sources are converted from sRGB at load time.
struct Texture {
  int width = 0, height = 0;
  std::vector<float> pixels;  // linear RGB

  bool empty() const { return pixels.empty(); }

  Vec3 texel(int x, int y) const {
    const float* p = &pixels[3u * (static_cast<size_t>(y) * width + x)];
    return {p[0], p[1], p[2]};
  }

  // UV origin is bottom-left; image row 0 is the top of the texture.
  Vec3 sample(double u, double v) const {
    if (empty()) return {1, 1, 1};
    u -= std::floor(u);
    v -= std::floor(v);
    double fx = u * width - 0.5;
    double fy = (1.0 - v) * height - 0.5;
    int x0 = static_cast<int>(std::floor(fx));
    int y0 = static_cast<int>(std::floor(fy));
    double tx = fx - x0, ty = fy - y0;
    auto wrap = [](int a, int n) { return ((a % n) + n) % n; };
    Vec3 c00 = texel(wrap(x0, width), wrap(y0, height));
    Vec3 c10 = texel(wrap(x0 + 1, width), wrap(y0, height));
    Vec3 c01 = texel(wrap(x0, width), wrap(y0 + 1, height));
    Vec3 c11 = texel(wrap(x0 + 1, width), wrap(y0 + 1, height));
    return (c00 * (1 - tx) + c10 * tx) * (1 - ty) + (c01 * (1 - tx) + c11 * tx) * ty;
  }
};

inline Texture texture_from_png(const DecodedPng& png, const std::string& origin) {
  Texture tex;
  tex.width = png.width;
  tex.height = png.height;
  size_t n = static_cast<size_t>(png.width) * png.height;
  tex.pixels.resize(3 * n);
  for (size_t i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c) {
      size_t src = png.channels == 3 ? 3 * i + c : i;
      double v;
      if (png.bit_depth == 8) {
        v = srgb_to_linear(png.bytes[src] / 255.0);
      } else {
        uint16_t raw;
        std::memcpy(&raw, &png.bytes[2 * src], 2);
        v = srgb_to_linear(raw / 65535.0);
      }
      tex.pixels[3 * i + c] = static_cast<float>(v);
    }
  }
  if (tex.pixels.empty()) throw DataError(origin + ": empty texture");
  return tex;
}

inline Texture load_texture_png(const std::string& path) {
  return texture_from_png(read_png(path), path);
}

inline Texture load_texture_png_memory(const uint8_t* data, size_t size, const std::string& origin) {
  return texture_from_png(read_png_memory(data, size, origin), origin);
}

}  // namespace synthgen

// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

// Equirectangular HDR environment maps: Radiance RGBE (.hdr) and PFM input,
// plus the luminance-weighted importance-sampling tables the renderer uses.
// Texel order is row-major from the top-left; row 0 maps to the +z pole.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "synthgen/errors.hpp"
#include "synthgen/image.hpp"
#include "synthgen/math.hpp"

namespace synthgen {

struct HdriMap {
  int width = 0, height = 0;
  std::vector<float> pixels;  // RGB radiance per texel
  double intensity_scale = 1.0;

  const float* at(int x, int y) const {
    return &pixels[3u * (static_cast<size_t>(y) * width + x)];
  }
};

namespace hdridetail {

inline void decode_rgbe(const uint8_t rgbe[4], float* rgb) {
  if (rgbe[3] == 0) {
    rgb[0] = rgb[1] = rgb[2] = 0;
    return;
  }
  float f = std::ldexp(1.0f, static_cast<int>(rgbe[3]) - (128 + 8));
  rgb[0] = rgbe[0] * f;
  rgb[1] = rgbe[1] * f;
  rgb[2] = rgbe[2] * f;
}

inline void encode_rgbe(const float* rgb, uint8_t rgbe[4]) {
  float v = std::max(rgb[0], std::max(rgb[1], rgb[2]));
  if (v < 1e-32f) {
    rgbe[0] = rgbe[1] = rgbe[2] = rgbe[3] = 0;
    return;
  }
  int e;
  float scale = std::frexp(v, &e) * 256.0f / v;
  rgbe[0] = static_cast<uint8_t>(rgb[0] * scale);
  rgbe[1] = static_cast<uint8_t>(rgb[1] * scale);
  rgbe[2] = static_cast<uint8_t>(rgb[2] * scale);
  rgbe[3] = static_cast<uint8_t>(e + 128);
}

inline std::string read_line(std::istream& in, const std::string& path) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": truncated HDR header");
  return line;
}

}  // namespace hdridetail

// Radiance picture format: "#?RADIANCE" header, FORMAT=32-bit_rle_rgbe,
// "-Y H +X W" resolution string, then flat or RLE-compressed RGBE scanlines.
inline HdriMap load_hdr_rgbe(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open: " + path);

  std::string line = hdridetail::read_line(in, path);
  if (line.rfind("#?", 0) != 0) throw DataError(path + ": not a Radiance HDR file");
  bool format_ok = false;
  while (true) {
    line = hdridetail::read_line(in, path);
    if (line.empty()) break;
    if (line.rfind("FORMAT=", 0) == 0) format_ok = (line == "FORMAT=32-bit_rle_rgbe");
  }
  if (!format_ok) throw DataError(path + ": unsupported HDR format (expect 32-bit_rle_rgbe)");

  int w = 0, h = 0;
  line = hdridetail::read_line(in, path);
  if (std::sscanf(line.c_str(), "-Y %d +X %d", &h, &w) != 2 || w <= 0 || h <= 0)
    throw DataError(path + ": unsupported HDR resolution string '" + line + "'");

  HdriMap map;
  map.width = w;
  map.height = h;
  map.pixels.resize(3u * w * h);

  std::vector<uint8_t> scanline(4u * w);
  for (int y = 0; y < h; ++y) {
    uint8_t head[4];
    if (!in.read(reinterpret_cast<char*>(head), 4)) throw DataError(path + ": truncated HDR data");
    if (head[0] == 2 && head[1] == 2 && (head[2] << 8 | head[3]) == w && w >= 8 && w < 32768) {
      // New-style RLE: the four components are stored as separate planes.
      for (int c = 0; c < 4; ++c) {
        int x = 0;
        while (x < w) {
          uint8_t count = 0, value = 0;
          if (!in.read(reinterpret_cast<char*>(&count), 1))
            throw DataError(path + ": truncated HDR scanline");
          if (count > 128) {
            if (!in.read(reinterpret_cast<char*>(&value), 1))
              throw DataError(path + ": truncated HDR scanline");
            int run = count - 128;
            if (x + run > w) throw DataError(path + ": HDR run overflows scanline");
            for (int i = 0; i < run; ++i) scanline[4u * x++ + c] = value;
          } else {
            if (count == 0 || x + count > w)
              throw DataError(path + ": corrupt HDR scanline");
            for (int i = 0; i < count; ++i) {
              if (!in.read(reinterpret_cast<char*>(&value), 1))
                throw DataError(path + ": truncated HDR scanline");
              scanline[4u * x++ + c] = value;
            }
          }
        }
      }
    } else {
      // Flat RGBE scanline.
      std::memcpy(scanline.data(), head, 4);
      if (w > 1 && !in.read(reinterpret_cast<char*>(scanline.data() + 4), 4u * (w - 1)))
        throw DataError(path + ": truncated HDR data");
    }
    for (int x = 0; x < w; ++x)
      hdridetail::decode_rgbe(&scanline[4u * x], &map.pixels[3u * (static_cast<size_t>(y) * w + x)]);
  }
  return map;
}

// Minimal flat (uncompressed) RGBE writer; handy for fixtures and debugging.
inline void write_hdr_rgbe(const std::string& path, const HdriMap& map) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << "#?RADIANCE\nFORMAT=32-bit_rle_rgbe\n\n-Y " << map.height << " +X " << map.width << "\n";
  for (size_t i = 0; i < map.pixels.size() / 3; ++i) {
    uint8_t rgbe[4];
    hdridetail::encode_rgbe(&map.pixels[3 * i], rgbe);
    out.write(reinterpret_cast<const char*>(rgbe), 4);
  }
  if (!out) throw DataError("short write: " + path);
}

inline void validate_hdri(HdriMap& map, const std::string& path) {
  if (map.width != 2 * map.height)
    throw DataError(path + ": equirectangular map must have width = 2 x height (got " +
                    std::to_string(map.width) + "x" + std::to_string(map.height) + ")");
  for (float v : map.pixels) {
    if (std::isnan(v) || std::isinf(v)) throw DataError(path + ": non-finite radiance texel");
    if (v < 0) throw DataError(path + ": negative radiance texel");
  }
}

inline HdriMap load_hdri(const std::string& path) {
  HdriMap map;
  auto ends_with = [&](const char* suffix) {
    std::string s = path;
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    std::string suf(suffix);
    return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
  };
  if (ends_with(".hdr")) {
    map = load_hdr_rgbe(path);
  } else if (ends_with(".pfm")) {
    ImageRgbF img = read_pfm_rgb(path);
    map.width = img.width;
    map.height = img.height;
    map.pixels = std::move(img.pixels);
  } else {
    throw DataError(path + ": unsupported HDRI format (expect .hdr or .pfm)");
  }
  validate_hdri(map, path);
  return map;
}

inline double mean_radiance(const HdriMap& map) {
  if (map.pixels.empty()) return 0;
  double sum = 0;
  for (float v : map.pixels) sum += v;
  return sum / (map.pixels.size() / 3) / 3.0;
}

// ---------------------------------------------------------------------------
// Direction <-> texel mapping and sampling distribution.

inline Vec3 equirect_direction(double u, double v) {
  double theta = v * kPi;           // polar angle from +z
  double phi = u * 2 * kPi - kPi;   // u = 0.5 is +x
  double st = std::sin(theta);
  return {st * std::cos(phi), st * std::sin(phi), std::cos(theta)};
}

inline Vec2 equirect_uv(const Vec3& dir) {
  Vec3 d = normalize(dir);
  double theta = std::acos(std::clamp(d.z, -1.0, 1.0));
  double phi = std::atan2(d.y, d.x);
  double u = (phi + kPi) / (2 * kPi);
  if (u >= 1) u -= 1;
  if (u < 0) u += 1;
  return {u, theta / kPi};
}

// Bilinear radiance lookup (wrap in azimuth, clamp at the poles).
inline Vec3 sample_hdri_bilinear(const HdriMap& map, const Vec3& dir) {
  Vec2 uv = equirect_uv(dir);
  double fx = uv.x * map.width - 0.5;
  double fy = uv.y * map.height - 0.5;
  int x0 = static_cast<int>(std::floor(fx));
  int y0 = static_cast<int>(std::floor(fy));
  double tx = fx - x0, ty = fy - y0;
  auto wrap_x = [&](int x) { return ((x % map.width) + map.width) % map.width; };
  auto clamp_y = [&](int y) { return std::clamp(y, 0, map.height - 1); };
  Vec3 acc{0, 0, 0};
  const double wts[2] = {1 - ty, ty};
  const double wxs[2] = {1 - tx, tx};
  for (int dy = 0; dy < 2; ++dy)
    for (int dx = 0; dx < 2; ++dx) {
      const float* p = map.at(wrap_x(x0 + dx), clamp_y(y0 + dy));
      double w = wxs[dx] * wts[dy];
      acc += Vec3{p[0] * w, p[1] * w, p[2] * w};
    }
  return acc * map.intensity_scale;
}

// Piecewise-constant 2D distribution over texels, weighted by luminance and
// solid angle. Constant maps fall back to uniform sphere sampling.
class EnvironmentDistribution {
 public:
  EnvironmentDistribution() = default;

  explicit EnvironmentDistribution(const HdriMap& map) : width_(map.width), height_(map.height) {
    std::vector<double> weights(static_cast<size_t>(width_) * height_);
    double lum_min = kInf, lum_max = -kInf;
    for (int y = 0; y < height_; ++y) {
      double sin_theta = std::sin(kPi * (y + 0.5) / height_);
      for (int x = 0; x < width_; ++x) {
        const float* p = map.at(x, y);
        double lum = 0.2126 * p[0] + 0.7152 * p[1] + 0.0722 * p[2];
        lum_min = std::min(lum_min, lum);
        lum_max = std::max(lum_max, lum);
        weights[static_cast<size_t>(y) * width_ + x] = lum * sin_theta;
      }
    }
    double total = 0;
    for (double w : weights) total += w;
    uniform_ = total <= 0 || (lum_max - lum_min) <= 1e-9 * lum_max;
    if (uniform_) return;

    row_cdf_.resize(height_ + 1, 0.0);
    cond_cdf_.resize(static_cast<size_t>(height_) * (width_ + 1), 0.0);
    weights_ = std::move(weights);
    total_ = total;
    for (int y = 0; y < height_; ++y) {
      double row_sum = 0;
      double* cdf = &cond_cdf_[static_cast<size_t>(y) * (width_ + 1)];
      for (int x = 0; x < width_; ++x) {
        row_sum += weights_[static_cast<size_t>(y) * width_ + x];
        cdf[x + 1] = row_sum;
      }
      if (row_sum > 0)
        for (int x = 1; x <= width_; ++x) cdf[x] /= row_sum;
      row_cdf_[y + 1] = row_cdf_[y] + row_sum / total_;
    }
    row_cdf_[height_] = 1.0;
  }

  bool uniform() const { return uniform_; }

  // Returns a direction and its solid-angle pdf.
  Vec3 sample(double u1, double u2, double* pdf) const {
    if (uniform_) {
      double z = 1 - 2 * u1;
      double r = std::sqrt(std::max(0.0, 1 - z * z));
      double phi = 2 * kPi * u2;
      *pdf = 1 / (4 * kPi);
      return {r * std::cos(phi), r * std::sin(phi), z};
    }
    int y = segment(row_cdf_.data(), height_, u1);
    double dv = (u1 - row_cdf_[y]) / std::max(row_cdf_[y + 1] - row_cdf_[y], 1e-300);
    const double* cdf = &cond_cdf_[static_cast<size_t>(y) * (width_ + 1)];
    int x = segment(cdf, width_, u2);
    double du = (u2 - cdf[x]) / std::max(cdf[x + 1] - cdf[x], 1e-300);
    double u = (x + du) / width_;
    double v = (y + dv) / height_;
    Vec3 dir = equirect_direction(u, v);
    *pdf = pdf_dir(dir, x, y);
    return dir;
  }

  double pdf(const Vec3& dir) const {
    if (uniform_) return 1 / (4 * kPi);
    Vec2 uv = equirect_uv(dir);
    int x = std::clamp(static_cast<int>(uv.x * width_), 0, width_ - 1);
    int y = std::clamp(static_cast<int>(uv.y * height_), 0, height_ - 1);
    return pdf_dir(dir, x, y);
  }

 private:
  static int segment(const double* cdf, int n, double u) {
    int lo = 0, hi = n;
    while (hi - lo > 1) {
      int mid = (lo + hi) / 2;
      (cdf[mid] <= u ? lo : hi) = mid;
    }
    return std::min(lo, n - 1);
  }

  double pdf_dir(const Vec3& dir, int x, int y) const {
    double sin_theta = std::sqrt(std::max(0.0, 1 - dir.z * dir.z));
    if (sin_theta <= 0) return 0;
    double w = weights_[static_cast<size_t>(y) * width_ + x];
    return w * width_ * height_ / (total_ * 2 * kPi * kPi * sin_theta);
  }

  int width_ = 0, height_ = 0;
  bool uniform_ = true;
  double total_ = 0;
  std::vector<double> weights_;
  std::vector<double> row_cdf_;
  std::vector<double> cond_cdf_;
};

}  // namespace synthgen

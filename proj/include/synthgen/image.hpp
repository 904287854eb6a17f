// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

// Image containers and file IO: 8-bit RGB PNG, 16-bit grayscale PNG, and
// PFM float maps. Pixel order is row-major from the top-left in memory; PFM
// files follow the usual bottom-up scanline convention (see docs/formats.md).

#pragma once

#include <png.h>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "synthgen/errors.hpp"

namespace synthgen {

struct ImageRgbF {
  int width = 0, height = 0;
  std::vector<float> pixels;  // 3 floats per pixel

  static ImageRgbF make(int w, int h) { return {w, h, std::vector<float>(3u * w * h, 0.f)}; }
  float* at(int x, int y) { return &pixels[3u * (static_cast<size_t>(y) * width + x)]; }
  const float* at(int x, int y) const {
    return &pixels[3u * (static_cast<size_t>(y) * width + x)];
  }
};

struct ImageRgb8 {
  int width = 0, height = 0;
  std::vector<uint8_t> pixels;  // 3 bytes per pixel
};

struct ImageGray16 {
  int width = 0, height = 0;
  std::vector<uint16_t> pixels;

  uint16_t at(int x, int y) const { return pixels[static_cast<size_t>(y) * width + x]; }
};

// ---------------------------------------------------------------------------
// sRGB transfer function (no tone mapping, exposure 1).

inline double linear_to_srgb(double c) {
  c = std::fmin(std::fmax(c, 0.0), 1.0);
  return c <= 0.0031308 ? 12.92 * c : 1.055 * std::pow(c, 1.0 / 2.4) - 0.055;
}

inline double srgb_to_linear(double s) {
  return s <= 0.04045 ? s / 12.92 : std::pow((s + 0.055) / 1.055, 2.4);
}

inline ImageRgb8 encode_srgb(const ImageRgbF& img) {
  ImageRgb8 out{img.width, img.height, {}};
  out.pixels.resize(img.pixels.size());
  for (size_t i = 0; i < img.pixels.size(); ++i)
    out.pixels[i] = static_cast<uint8_t>(std::lround(255.0 * linear_to_srgb(img.pixels[i])));
  return out;
}

// ---------------------------------------------------------------------------
// PNG

namespace pngdetail {

struct MemReader {
  const uint8_t* data;
  size_t size;
  size_t pos;
};

inline void mem_read(png_structp png, png_bytep out, png_size_t n) {
  auto* r = static_cast<MemReader*>(png_get_io_ptr(png));
  if (r->pos + n > r->size) png_error(png, "unexpected end of PNG data");
  std::memcpy(out, r->data + r->pos, n);
  r->pos += n;
}

inline bool host_is_little_endian() {
  const uint16_t probe = 1;
  return *reinterpret_cast<const uint8_t*>(&probe) == 1;
}

}  // namespace pngdetail

inline void write_png_rgb8(const std::string& path, const ImageRgb8& img) {
  FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw DataError("cannot open for writing: " + path);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    throw DataError("PNG write failed: " + path);
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, img.width, img.height, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < img.height; ++y)
    png_write_row(png, const_cast<png_bytep>(&img.pixels[3u * static_cast<size_t>(y) * img.width]));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
}

inline void write_png_gray16(const std::string& path, const ImageGray16& img) {
  FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw DataError("cannot open for writing: " + path);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    throw DataError("PNG write failed: " + path);
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, img.width, img.height, 16, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (pngdetail::host_is_little_endian()) png_set_swap(png);
  for (int y = 0; y < img.height; ++y)
    png_write_row(png, const_cast<png_bytep>(reinterpret_cast<const png_byte*>(
                           &img.pixels[static_cast<size_t>(y) * img.width])));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
}

// Decoded PNG with normalized layout: 8-bit channels expanded in place,
// alpha stripped, palette expanded.
struct DecodedPng {
  int width = 0, height = 0;
  int channels = 0;   // 1 or 3
  int bit_depth = 0;  // 8 or 16
  std::vector<uint8_t> bytes;  // row-major, native 16-bit when bit_depth == 16
};

namespace pngdetail {

inline DecodedPng read_png_impl(png_structp png, png_infop info, const std::string& what) {
  png_read_info(png, info);
  png_uint_32 w = png_get_image_width(png, info);
  png_uint_32 h = png_get_image_height(png, info);
  int depth = png_get_bit_depth(png, info);
  int color = png_get_color_type(png, info);

  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color & PNG_COLOR_MASK_ALPHA || png_get_valid(png, info, PNG_INFO_tRNS))
    png_set_strip_alpha(png);
  if (depth == 16 && host_is_little_endian()) png_set_swap(png);
  png_read_update_info(png, info);

  depth = png_get_bit_depth(png, info);
  int channels = png_get_channels(png, info);
  if (channels != 1 && channels != 3)
    png_error(png, "unsupported channel layout");

  DecodedPng out;
  out.width = static_cast<int>(w);
  out.height = static_cast<int>(h);
  out.channels = channels;
  out.bit_depth = depth;
  size_t row_bytes = png_get_rowbytes(png, info);
  out.bytes.resize(row_bytes * h);
  for (png_uint_32 y = 0; y < h; ++y)
    png_read_row(png, out.bytes.data() + row_bytes * y, nullptr);
  png_read_end(png, nullptr);
  (void)what;
  return out;
}

}  // namespace pngdetail

inline DecodedPng read_png(const std::string& path) {
  FILE* fp = std::fopen(path.c_str(), "rb");
  if (!fp) throw DataError("cannot open: " + path);
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    throw DataError("PNG read failed: " + path);
  }
  png_init_io(png, fp);
  DecodedPng out = pngdetail::read_png_impl(png, info, path);
  png_destroy_read_struct(&png, &info, nullptr);
  std::fclose(fp);
  return out;
}

inline DecodedPng read_png_memory(const uint8_t* data, size_t size, const std::string& what) {
  pngdetail::MemReader reader{data, size, 0};
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DataError("PNG decode failed: " + what);
  }
  png_set_read_fn(png, &reader, pngdetail::mem_read);
  DecodedPng out = pngdetail::read_png_impl(png, info, what);
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

inline ImageGray16 read_png_gray16(const std::string& path) {
  DecodedPng p = read_png(path);
  if (p.channels != 1 || p.bit_depth != 16)
    throw DataError(path + ": expected a 16-bit grayscale PNG");
  ImageGray16 img{p.width, p.height, {}};
  img.pixels.resize(static_cast<size_t>(p.width) * p.height);
  std::memcpy(img.pixels.data(), p.bytes.data(), img.pixels.size() * 2);
  return img;
}

inline ImageRgb8 read_png_rgb8(const std::string& path) {
  DecodedPng p = read_png(path);
  if (p.channels != 3 || p.bit_depth != 8)
    throw DataError(path + ": expected an 8-bit RGB PNG");
  return {p.width, p.height, std::move(p.bytes)};
}

// ---------------------------------------------------------------------------
// PFM (little-endian, bottom-up scanlines)

inline void write_pfm_rgb(const std::string& path, const ImageRgbF& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << "PF\n" << img.width << " " << img.height << "\n-1.0\n";
  for (int y = img.height - 1; y >= 0; --y)
    out.write(reinterpret_cast<const char*>(img.at(0, y)),
              static_cast<std::streamsize>(3u * img.width * sizeof(float)));
  if (!out) throw DataError("short write: " + path);
}

inline ImageRgbF read_pfm_rgb(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open: " + path);
  std::string magic;
  int w = 0, h = 0;
  double scale = 0;
  in >> magic >> w >> h >> scale;
  if (!in || magic != "PF" || w <= 0 || h <= 0)
    throw DataError(path + ": not a 3-channel PFM file");
  if (scale >= 0) throw DataError(path + ": big-endian PFM is not supported");
  in.get();  // single whitespace after the header
  ImageRgbF img = ImageRgbF::make(w, h);
  for (int y = h - 1; y >= 0; --y)
    in.read(reinterpret_cast<char*>(img.at(0, y)),
            static_cast<std::streamsize>(3u * w * sizeof(float)));
  if (!in) throw DataError(path + ": truncated PFM data");
  return img;
}

}  // namespace synthgen

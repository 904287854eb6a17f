// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

// Mesh loaders for Wavefront OBJ (with MTL base color), PLY (ascii and
// binary little-endian), and self-contained glTF binary (.glb). Every loader
// normalizes into Mesh via finalize_mesh; unsupported format features raise
// DataError naming the feature instead of silently dropping data.

#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "synthgen/errors.hpp"
#include "synthgen/material.hpp"
#include "synthgen/mesh.hpp"
#include "synthgen/texture.hpp"

namespace synthgen {

enum class MeshFormat { kObj, kPly, kGlb };

inline MeshFormat mesh_format_from_path(const std::string& path) {
  std::string ext = std::filesystem::path(path).extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (ext == ".obj") return MeshFormat::kObj;
  if (ext == ".ply") return MeshFormat::kPly;
  if (ext == ".glb") return MeshFormat::kGlb;
  throw DataError(path + ": unsupported mesh format '" + ext + "' (expect .obj, .ply, .glb)");
}

// One asset file: geometry parts plus a single surface material. Multi-part
// files keep their parts separate so the caller decides whether to merge.
struct LoadedAsset {
  std::vector<Mesh> parts;
  Material material;
};

namespace meshiodetail {

inline std::string strip_cr(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == '\n')) s.pop_back();
  return s;
}

// ---------------------------------------------------------------------------
// Wavefront OBJ. Faces are fan-triangulated; corner (v, vt, vn) triples are
// re-indexed to unique per-vertex records. One material per asset: the first
// usemtl that resolves in a referenced MTL file wins (Kd and map_Kd only).

struct ObjMaterial {
  Vec3 kd{0.8, 0.8, 0.8};
  std::string map_kd;
};

inline std::map<std::string, ObjMaterial> parse_mtl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open material library: " + path);
  std::map<std::string, ObjMaterial> out;
  std::string line, current;
  while (std::getline(in, line)) {
    std::istringstream ss(strip_cr(line));
    std::string tag;
    if (!(ss >> tag) || tag[0] == '#') continue;
    if (tag == "newmtl") {
      ss >> current;
      out[current] = {};
    } else if (tag == "Kd" && out.count(current)) {
      ss >> out[current].kd.x >> out[current].kd.y >> out[current].kd.z;
    } else if (tag == "map_Kd" && out.count(current)) {
      std::string rest;
      std::getline(ss, rest);
      size_t start = rest.find_first_not_of(" \t");
      if (start != std::string::npos) out[current].map_kd = rest.substr(start);
    }
  }
  return out;
}

inline LoadedAsset load_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path);

  std::vector<Vec3> positions, normals;
  std::vector<Vec2> uvs;
  Mesh mesh;
  bool any_uv = false;
  std::map<std::array<long, 3>, uint32_t> corner_index;
  std::map<std::string, ObjMaterial> mtl;
  bool material_set = false;
  LoadedAsset asset;

  auto resolve = [&](long idx, size_t count, const char* what) -> long {
    long r = idx > 0 ? idx - 1 : static_cast<long>(count) + idx;
    if (idx == 0 || r < 0 || r >= static_cast<long>(count))
      throw DataError(path + ": " + what + " index " + std::to_string(idx) + " out of range");
    return r;
  };

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(strip_cr(line));
    std::string tag;
    if (!(ss >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      Vec3 p;
      if (!(ss >> p.x >> p.y >> p.z))
        throw DataError(path + ":" + std::to_string(line_no) + ": malformed vertex");
      positions.push_back(p);
    } else if (tag == "vn") {
      Vec3 n;
      if (!(ss >> n.x >> n.y >> n.z))
        throw DataError(path + ":" + std::to_string(line_no) + ": malformed normal");
      normals.push_back(n);
    } else if (tag == "vt") {
      Vec2 t;
      if (!(ss >> t.x >> t.y))
        throw DataError(path + ":" + std::to_string(line_no) + ": malformed texcoord");
      uvs.push_back(t);
    } else if (tag == "f") {
      std::vector<uint32_t> poly;
      std::string corner;
      while (ss >> corner) {
        long vi = 0, ti = 0, ni = 0;
        // Forms: v, v/t, v//n, v/t/n.
        size_t s1 = corner.find('/');
        if (s1 == std::string::npos) {
          vi = std::stol(corner);
        } else {
          vi = std::stol(corner.substr(0, s1));
          size_t s2 = corner.find('/', s1 + 1);
          if (s2 == std::string::npos) {
            ti = std::stol(corner.substr(s1 + 1));
          } else {
            if (s2 > s1 + 1) ti = std::stol(corner.substr(s1 + 1, s2 - s1 - 1));
            if (s2 + 1 < corner.size()) ni = std::stol(corner.substr(s2 + 1));
          }
        }
        long v = resolve(vi, positions.size(), "vertex");
        long t = ti ? resolve(ti, uvs.size(), "texcoord") : -1;
        long n = ni ? resolve(ni, normals.size(), "normal") : -1;
        std::array<long, 3> key{v, t, n};
        auto it = corner_index.find(key);
        uint32_t out_idx;
        if (it == corner_index.end()) {
          out_idx = static_cast<uint32_t>(mesh.vertices.size());
          mesh.vertices.push_back(positions[v]);
          mesh.normals.push_back(n >= 0 ? normals[n] : Vec3{0, 0, 0});
          mesh.uvs.push_back(t >= 0 ? uvs[t] : Vec2{0, 0});
          if (t >= 0) any_uv = true;
          corner_index.emplace(key, out_idx);
        } else {
          out_idx = it->second;
        }
        poly.push_back(out_idx);
      }
      if (poly.size() < 3)
        throw DataError(path + ":" + std::to_string(line_no) + ": face with fewer than 3 corners");
      for (size_t i = 2; i < poly.size(); ++i)
        mesh.triangles.push_back({poly[0], poly[i - 1], poly[i]});
    } else if (tag == "mtllib") {
      std::string name;
      ss >> name;
      std::filesystem::path mtl_path = std::filesystem::path(path).parent_path() / name;
      if (std::filesystem::exists(mtl_path)) {
        auto lib = parse_mtl(mtl_path.string());
        mtl.insert(lib.begin(), lib.end());
      }
    } else if (tag == "usemtl") {
      std::string name;
      ss >> name;
      auto it = mtl.find(name);
      if (it != mtl.end() && !material_set) {
        material_set = true;
        asset.material.base_color = it->second.kd;
        if (!it->second.map_kd.empty()) {
          std::filesystem::path tex =
              std::filesystem::path(path).parent_path() / it->second.map_kd;
          asset.material.base_color_texture =
              std::make_shared<Texture>(load_texture_png(tex.string()));
        }
      }
    }
    // o/g/s and other statements carry no geometry and are ignored.
  }

  bool any_normal = false;
  for (const Vec3& n : mesh.normals)
    if (length_squared(n) > 0) any_normal = true;
  if (!any_normal) mesh.normals.clear();
  if (!any_uv) mesh.uvs.clear();
  finalize_mesh(mesh, path);
  asset.parts.push_back(std::move(mesh));
  return asset;
}

// ---------------------------------------------------------------------------
// PLY, ascii and binary_little_endian. Recognized vertex properties are
// x y z, nx ny nz, and s t (or u v); everything else is skipped. Faces come
// from a "vertex_indices" (or "vertex_index") list property.

struct PlyProperty {
  std::string name;
  std::string type;       // scalar type, or the value type for lists
  std::string count_type;  // non-empty marks a list
};

struct PlyElement {
  std::string name;
  size_t count = 0;
  std::vector<PlyProperty> props;
};

inline size_t ply_type_size(const std::string& t, const std::string& path) {
  if (t == "char" || t == "uchar" || t == "int8" || t == "uint8") return 1;
  if (t == "short" || t == "ushort" || t == "int16" || t == "uint16") return 2;
  if (t == "int" || t == "uint" || t == "int32" || t == "uint32" || t == "float" ||
      t == "float32")
    return 4;
  if (t == "double" || t == "float64") return 8;
  throw DataError(path + ": unsupported PLY property type '" + t + "'");
}

inline uint64_t le_bytes_to_u64(const uint8_t* p, size_t n) {
  uint64_t v = 0;
  for (size_t i = 0; i < n; ++i) v |= static_cast<uint64_t>(p[i]) << (8 * i);
  return v;
}

inline double ply_read_binary(std::istream& in, const std::string& t, const std::string& path) {
  uint8_t buf[8];
  size_t n = ply_type_size(t, path);
  if (!in.read(reinterpret_cast<char*>(buf), n)) throw DataError(path + ": truncated PLY data");
  uint64_t bits = le_bytes_to_u64(buf, n);
  if (t == "float" || t == "float32") {
    float f;
    uint32_t b32 = static_cast<uint32_t>(bits);
    std::memcpy(&f, &b32, 4);
    return f;
  }
  if (t == "double" || t == "float64") {
    double d;
    std::memcpy(&d, &bits, 8);
    return d;
  }
  if (t[0] != 'u') {  // char/short/int/int8/int16/int32 are signed
    // Sign-extend from the value width.
    uint64_t sign_bit = 1ull << (8 * n - 1);
    if (bits & sign_bit) bits |= ~((sign_bit << 1) - 1);
    int64_t sv;
    std::memcpy(&sv, &bits, 8);
    return static_cast<double>(sv);
  }
  return static_cast<double>(bits);
}

inline double ply_read_ascii(std::istream& in, const std::string& path) {
  double v;
  if (!(in >> v)) throw DataError(path + ": truncated PLY data");
  return v;
}

inline LoadedAsset load_ply(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open: " + path);

  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != "ply")
    throw DataError(path + ": not a PLY file");

  bool binary = false;
  std::vector<PlyElement> elements;
  while (std::getline(in, line)) {
    std::istringstream ss(strip_cr(line));
    std::string tag;
    ss >> tag;
    if (tag == "comment" || tag == "obj_info") continue;
    if (tag == "format") {
      std::string fmt, ver;
      ss >> fmt >> ver;
      if (fmt == "ascii")
        binary = false;
      else if (fmt == "binary_little_endian")
        binary = true;
      else
        throw DataError(path + ": unsupported PLY format '" + fmt + "'");
    } else if (tag == "element") {
      PlyElement el;
      ss >> el.name >> el.count;
      elements.push_back(el);
    } else if (tag == "property") {
      if (elements.empty()) throw DataError(path + ": property before element");
      std::string kind;
      ss >> kind;
      PlyProperty prop;
      if (kind == "list") {
        ss >> prop.count_type >> prop.type >> prop.name;
      } else {
        prop.type = kind;
        ss >> prop.name;
      }
      ply_type_size(prop.type, path);
      if (!prop.count_type.empty()) ply_type_size(prop.count_type, path);
      elements.back().props.push_back(prop);
    } else if (tag == "end_header") {
      break;
    } else if (tag == "ply" || tag.empty()) {
      continue;
    } else {
      throw DataError(path + ": unsupported PLY header statement '" + tag + "'");
    }
  }

  Mesh mesh;
  auto read_scalar = [&](const std::string& type) {
    return binary ? ply_read_binary(in, type, path) : ply_read_ascii(in, path);
  };

  for (const PlyElement& el : elements) {
    if (el.name == "vertex") {
      bool has_n = false, has_uv = false;
      for (const auto& p : el.props) {
        if (p.name == "nx") has_n = true;
        if (p.name == "s" || p.name == "u") has_uv = true;
      }
      mesh.vertices.resize(el.count);
      if (has_n) mesh.normals.resize(el.count);
      if (has_uv) mesh.uvs.resize(el.count);
      for (size_t i = 0; i < el.count; ++i) {
        for (const auto& p : el.props) {
          if (!p.count_type.empty()) {
            size_t n = static_cast<size_t>(read_scalar(p.count_type));
            for (size_t k = 0; k < n; ++k) read_scalar(p.type);
            continue;
          }
          double v = read_scalar(p.type);
          if (p.name == "x") mesh.vertices[i].x = v;
          else if (p.name == "y") mesh.vertices[i].y = v;
          else if (p.name == "z") mesh.vertices[i].z = v;
          else if (p.name == "nx") mesh.normals[i].x = v;
          else if (p.name == "ny") mesh.normals[i].y = v;
          else if (p.name == "nz") mesh.normals[i].z = v;
          else if (p.name == "s" || p.name == "u") mesh.uvs[i].x = v;
          else if (p.name == "t" || p.name == "v") mesh.uvs[i].y = v;
        }
      }
    } else if (el.name == "face") {
      for (size_t i = 0; i < el.count; ++i) {
        for (const auto& p : el.props) {
          if (p.count_type.empty()) {
            read_scalar(p.type);
            continue;
          }
          size_t n = static_cast<size_t>(read_scalar(p.count_type));
          std::vector<uint32_t> poly(n);
          for (size_t k = 0; k < n; ++k)
            poly[k] = static_cast<uint32_t>(read_scalar(p.type));
          if (p.name == "vertex_indices" || p.name == "vertex_index") {
            if (n < 3) throw DataError(path + ": face with fewer than 3 corners");
            for (size_t k = 2; k < n; ++k)
              mesh.triangles.push_back({poly[0], poly[k - 1], poly[k]});
          }
        }
      }
    } else {
      // Unknown element: consume its data.
      for (size_t i = 0; i < el.count; ++i)
        for (const auto& p : el.props) {
          if (!p.count_type.empty()) {
            size_t n = static_cast<size_t>(read_scalar(p.count_type));
            for (size_t k = 0; k < n; ++k) read_scalar(p.type);
          } else {
            read_scalar(p.type);
          }
        }
    }
  }

  finalize_mesh(mesh, path);
  LoadedAsset asset;
  asset.parts.push_back(std::move(mesh));
  return asset;
}

// ---------------------------------------------------------------------------
// glTF binary (.glb), self-contained: geometry and textures come from the BIN
// chunk. Supported: triangle primitives, float POSITION/NORMAL/TEXCOORD_0,
// 8/16/32-bit indices, node TRS or matrix transforms, PNG base color
// textures. Anything else raises a named unsupported-feature error.

inline uint32_t read_u32le(std::istream& in, const std::string& path) {
  uint8_t b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw DataError(path + ": truncated GLB");
  return static_cast<uint32_t>(b[0]) | b[1] << 8 | b[2] << 16 | static_cast<uint32_t>(b[3]) << 24;
}

inline Mat3 invert3(const Mat3& m, const std::string& path) {
  Vec3 c0 = cross(m.r1, m.r2);
  Vec3 c1 = cross(m.r2, m.r0);
  Vec3 c2 = cross(m.r0, m.r1);
  double det = dot(m.r0, c0);
  if (std::abs(det) < 1e-30) throw DataError(path + ": singular node transform");
  Mat3 inv;
  inv.r0 = {c0.x / det, c1.x / det, c2.x / det};
  inv.r1 = {c0.y / det, c1.y / det, c2.y / det};
  inv.r2 = {c0.z / det, c1.z / det, c2.z / det};
  return inv;
}

inline Mat3 quat_to_mat3(double x, double y, double z, double w) {
  double n = std::sqrt(x * x + y * y + z * z + w * w);
  if (n > 0) {
    x /= n; y /= n; z /= n; w /= n;
  }
  Mat3 m;
  m.r0 = {1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)};
  m.r1 = {2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)};
  m.r2 = {2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)};
  return m;
}

struct GlbContext {
  const nlohmann::json* gltf = nullptr;
  std::vector<uint8_t> bin;
  std::string path;
};

struct GlbAccessorView {
  const uint8_t* base = nullptr;
  size_t stride = 0;
  size_t count = 0;
  int component_type = 0;
  int components = 0;
};

inline GlbAccessorView glb_accessor(const GlbContext& ctx, size_t index) {
  const auto& gltf = *ctx.gltf;
  if (index >= gltf["accessors"].size())
    throw DataError(ctx.path + ": accessor index out of range");
  const auto& acc = gltf["accessors"][index];
  if (acc.contains("sparse"))
    throw DataError(ctx.path + ": unsupported glTF feature: sparse accessor");
  if (!acc.contains("bufferView"))
    throw DataError(ctx.path + ": unsupported glTF feature: accessor without buffer view");
  const auto& bv = gltf["bufferViews"][acc["bufferView"].get<size_t>()];
  if (bv.value("buffer", 0) != 0)
    throw DataError(ctx.path + ": unsupported glTF feature: multiple buffers");

  static const std::map<std::string, int> comp_counts{
      {"SCALAR", 1}, {"VEC2", 2}, {"VEC3", 3}, {"VEC4", 4}};
  auto cc = comp_counts.find(acc["type"].get<std::string>());
  if (cc == comp_counts.end())
    throw DataError(ctx.path + ": unsupported glTF feature: accessor type " +
                    acc["type"].get<std::string>());

  GlbAccessorView view;
  view.component_type = acc["componentType"].get<int>();
  view.components = cc->second;
  view.count = acc["count"].get<size_t>();
  size_t comp_size = view.component_type == 5126 || view.component_type == 5125 ? 4
                     : view.component_type == 5123 || view.component_type == 5122 ? 2
                                                                                  : 1;
  size_t packed = comp_size * view.components;
  view.stride = bv.value("byteStride", static_cast<size_t>(0));
  if (view.stride == 0) view.stride = packed;
  size_t offset = bv.value("byteOffset", static_cast<size_t>(0)) +
                  acc.value("byteOffset", static_cast<size_t>(0));
  size_t end = offset + (view.count ? (view.count - 1) * view.stride + packed : 0);
  if (end > ctx.bin.size()) throw DataError(ctx.path + ": accessor reads past BIN chunk");
  view.base = ctx.bin.data() + offset;
  return view;
}

inline float glb_float_at(const GlbAccessorView& v, size_t i, int c) {
  float f;
  std::memcpy(&f, v.base + i * v.stride + 4u * c, 4);
  return f;
}

inline uint32_t glb_index_at(const GlbAccessorView& v, size_t i, const std::string& path) {
  const uint8_t* p = v.base + i * v.stride;
  switch (v.component_type) {
    case 5121: return *p;
    case 5123: {
      uint16_t x;
      std::memcpy(&x, p, 2);
      return x;
    }
    case 5125: {
      uint32_t x;
      std::memcpy(&x, p, 4);
      return x;
    }
    default:
      throw DataError(path + ": unsupported glTF feature: index component type " +
                      std::to_string(v.component_type));
  }
}

inline void glb_load_material(const GlbContext& ctx, size_t index, Material* out) {
  const auto& gltf = *ctx.gltf;
  const auto& mat = gltf["materials"][index];
  if (!mat.contains("pbrMetallicRoughness")) return;
  const auto& pbr = mat["pbrMetallicRoughness"];
  if (pbr.contains("baseColorFactor")) {
    const auto& f = pbr["baseColorFactor"];
    out->base_color = {f[0].get<double>(), f[1].get<double>(), f[2].get<double>()};
  }
  out->roughness = pbr.value("roughnessFactor", 1.0);
  out->metallic = pbr.value("metallicFactor", 1.0);
  if (pbr.contains("baseColorTexture")) {
    size_t tex_index = pbr["baseColorTexture"]["index"].get<size_t>();
    const auto& tex = gltf["textures"][tex_index];
    if (!tex.contains("source"))
      throw DataError(ctx.path + ": unsupported glTF feature: texture without image source");
    const auto& img = gltf["images"][tex["source"].get<size_t>()];
    if (img.contains("uri"))
      throw DataError(ctx.path + ": unsupported glTF feature: external image URI");
    std::string mime = img.value("mimeType", "");
    if (mime != "image/png")
      throw DataError(ctx.path + ": unsupported glTF feature: " +
                      (mime.empty() ? std::string("image without mimeType") : mime + " texture"));
    const auto& bv = gltf["bufferViews"][img["bufferView"].get<size_t>()];
    if (bv.value("buffer", 0) != 0)
      throw DataError(ctx.path + ": unsupported glTF feature: multiple buffers");
    size_t offset = bv.value("byteOffset", static_cast<size_t>(0));
    size_t length = bv["byteLength"].get<size_t>();
    if (offset + length > ctx.bin.size())
      throw DataError(ctx.path + ": image reads past BIN chunk");
    out->base_color_texture = std::make_shared<Texture>(
        load_texture_png_memory(ctx.bin.data() + offset, length, ctx.path + " (embedded PNG)"));
  }
}

inline void glb_load_primitive(const GlbContext& ctx, const nlohmann::json& prim,
                               const Mat3& linear, const Vec3& translation, LoadedAsset* asset,
                               bool* material_set) {
  if (prim.value("mode", 4) != 4)
    throw DataError(ctx.path + ": unsupported glTF feature: non-triangle primitive mode " +
                    std::to_string(prim.value("mode", 4)));
  const auto& attrs = prim["attributes"];
  if (!attrs.contains("POSITION")) throw DataError(ctx.path + ": primitive without POSITION");

  GlbAccessorView pos = glb_accessor(ctx, attrs["POSITION"].get<size_t>());
  if (pos.component_type != 5126 || pos.components != 3)
    throw DataError(ctx.path + ": unsupported glTF feature: non-float POSITION");

  Mesh mesh;
  mesh.vertices.resize(pos.count);
  for (size_t i = 0; i < pos.count; ++i) {
    Vec3 p{glb_float_at(pos, i, 0), glb_float_at(pos, i, 1), glb_float_at(pos, i, 2)};
    mesh.vertices[i] = linear * p + translation;
  }

  if (attrs.contains("NORMAL")) {
    GlbAccessorView nrm = glb_accessor(ctx, attrs["NORMAL"].get<size_t>());
    if (nrm.component_type != 5126 || nrm.components != 3)
      throw DataError(ctx.path + ": unsupported glTF feature: non-float NORMAL");
    Mat3 normal_mat = transpose(invert3(linear, ctx.path));
    mesh.normals.resize(nrm.count);
    for (size_t i = 0; i < nrm.count; ++i) {
      Vec3 n{glb_float_at(nrm, i, 0), glb_float_at(nrm, i, 1), glb_float_at(nrm, i, 2)};
      mesh.normals[i] = normalize(normal_mat * n);
    }
  }
  if (attrs.contains("TEXCOORD_0")) {
    GlbAccessorView uv = glb_accessor(ctx, attrs["TEXCOORD_0"].get<size_t>());
    if (uv.component_type != 5126 || uv.components != 2)
      throw DataError(ctx.path + ": unsupported glTF feature: non-float TEXCOORD_0");
    mesh.uvs.resize(uv.count);
    // glTF UV origin is top-left; Texture::sample expects bottom-left.
    for (size_t i = 0; i < uv.count; ++i)
      mesh.uvs[i] = {glb_float_at(uv, i, 0), 1.0 - glb_float_at(uv, i, 1)};
  }

  if (prim.contains("indices")) {
    GlbAccessorView idx = glb_accessor(ctx, prim["indices"].get<size_t>());
    if (idx.count % 3 != 0) throw DataError(ctx.path + ": index count not divisible by 3");
    for (size_t i = 0; i + 2 < idx.count; i += 3)
      mesh.triangles.push_back({glb_index_at(idx, i, ctx.path),
                                glb_index_at(idx, i + 1, ctx.path),
                                glb_index_at(idx, i + 2, ctx.path)});
  } else {
    for (size_t i = 0; i + 2 < pos.count; i += 3)
      mesh.triangles.push_back({static_cast<uint32_t>(i), static_cast<uint32_t>(i + 1),
                                static_cast<uint32_t>(i + 2)});
  }

  if (prim.contains("material") && !*material_set) {
    glb_load_material(ctx, prim["material"].get<size_t>(), &asset->material);
    *material_set = true;
  }
  finalize_mesh(mesh, ctx.path);
  asset->parts.push_back(std::move(mesh));
}

inline void glb_walk_node(const GlbContext& ctx, size_t node_index, Mat3 linear, Vec3 translation,
                          LoadedAsset* asset, bool* material_set) {
  const auto& gltf = *ctx.gltf;
  const auto& node = gltf["nodes"][node_index];

  Mat3 local_linear;
  Vec3 local_t{0, 0, 0};
  if (node.contains("matrix")) {
    const auto& m = node["matrix"];  // column-major 4x4
    for (int r = 0; r < 3; ++r)
      local_linear.row(r) = {m[0 + r].get<double>(), m[4 + r].get<double>(),
                             m[8 + r].get<double>()};
    local_t = {m[12].get<double>(), m[13].get<double>(), m[14].get<double>()};
  } else {
    Mat3 rot;
    if (node.contains("rotation")) {
      const auto& q = node["rotation"];
      rot = quat_to_mat3(q[0].get<double>(), q[1].get<double>(), q[2].get<double>(),
                         q[3].get<double>());
    }
    Vec3 scale{1, 1, 1};
    if (node.contains("scale")) {
      const auto& s = node["scale"];
      scale = {s[0].get<double>(), s[1].get<double>(), s[2].get<double>()};
    }
    for (int r = 0; r < 3; ++r)
      local_linear.row(r) = {rot.row(r).x * scale.x, rot.row(r).y * scale.y,
                             rot.row(r).z * scale.z};
    if (node.contains("translation")) {
      const auto& t = node["translation"];
      local_t = {t[0].get<double>(), t[1].get<double>(), t[2].get<double>()};
    }
  }
  Vec3 world_t = linear * local_t + translation;
  Mat3 world_linear = linear * local_linear;

  if (node.contains("mesh")) {
    const auto& mesh = gltf["meshes"][node["mesh"].get<size_t>()];
    for (const auto& prim : mesh["primitives"])
      glb_load_primitive(ctx, prim, world_linear, world_t, asset, material_set);
  }
  if (node.contains("children"))
    for (const auto& child : node["children"])
      glb_walk_node(ctx, child.get<size_t>(), world_linear, world_t, asset, material_set);
}

inline LoadedAsset load_glb(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open: " + path);

  uint32_t magic = read_u32le(in, path);
  if (magic != 0x46546C67u) throw DataError(path + ": not a GLB file (bad magic)");
  uint32_t version = read_u32le(in, path);
  if (version != 2)
    throw DataError(path + ": unsupported glTF feature: container version " +
                    std::to_string(version));
  read_u32le(in, path);  // total length; chunks are individually sized

  nlohmann::json gltf;
  GlbContext ctx;
  ctx.path = path;
  bool have_json = false;
  while (in.peek() != EOF) {
    uint32_t chunk_len = read_u32le(in, path);
    uint32_t chunk_type = read_u32le(in, path);
    std::vector<uint8_t> data(chunk_len);
    if (chunk_len && !in.read(reinterpret_cast<char*>(data.data()), chunk_len))
      throw DataError(path + ": truncated GLB chunk");
    if (chunk_type == 0x4E4F534Au) {  // 'JSON'
      try {
        gltf = nlohmann::json::parse(data.begin(), data.end());
      } catch (const nlohmann::json::parse_error& e) {
        throw DataError(path + ": invalid glTF JSON: " + e.what());
      }
      have_json = true;
    } else if (chunk_type == 0x004E4942u) {  // 'BIN'
      ctx.bin = std::move(data);
    }
  }
  if (!have_json) throw DataError(path + ": GLB without JSON chunk");
  if (gltf.contains("buffers"))
    for (const auto& buf : gltf["buffers"])
      if (buf.contains("uri"))
        throw DataError(path + ": unsupported glTF feature: external buffer URI");
  if (gltf.contains("extensionsRequired") && !gltf["extensionsRequired"].empty())
    throw DataError(path + ": unsupported glTF feature: required extension " +
                    gltf["extensionsRequired"][0].get<std::string>());
  ctx.gltf = &gltf;

  LoadedAsset asset;
  bool material_set = false;
  std::vector<size_t> roots;
  if (gltf.contains("scenes")) {
    size_t scene = gltf.value("scene", 0);
    for (const auto& n : gltf["scenes"][scene]["nodes"]) roots.push_back(n.get<size_t>());
  } else if (gltf.contains("nodes")) {
    for (size_t i = 0; i < gltf["nodes"].size(); ++i) roots.push_back(i);
  }
  for (size_t r : roots) glb_walk_node(ctx, r, Mat3{}, Vec3{0, 0, 0}, &asset, &material_set);
  if (asset.parts.empty()) throw DataError(path + ": mesh has no usable geometry");
  return asset;
}

}  // namespace meshiodetail

inline LoadedAsset load_asset_file(const std::string& path, MeshFormat format) {
  switch (format) {
    case MeshFormat::kObj: return meshiodetail::load_obj(path);
    case MeshFormat::kPly: return meshiodetail::load_ply(path);
    case MeshFormat::kGlb: return meshiodetail::load_glb(path);
  }
  throw DataError(path + ": unknown mesh format");
}

inline LoadedAsset load_asset_file(const std::string& path) {
  return load_asset_file(path, mesh_format_from_path(path));
}

// Single-mesh entry point: multi-part files are merged when join_children is
// set and rejected otherwise, per-asset scale applied after the merge.
inline Mesh load_mesh(const std::string& path, MeshFormat format, double scale = 1.0,
                      bool join_children = true) {
  LoadedAsset asset = load_asset_file(path, format);
  Mesh mesh;
  if (asset.parts.size() == 1) {
    mesh = std::move(asset.parts.front());
  } else if (join_children) {
    mesh = merge_children(asset.parts);
  } else {
    throw DataError(path + ": file contains " + std::to_string(asset.parts.size()) +
                    " sub-meshes; enable join_children to merge them");
  }
  if (scale != 1.0) scale_mesh(mesh, scale);
  return mesh;
}

inline Mesh load_mesh(const std::string& path, double scale = 1.0, bool join_children = true) {
  return load_mesh(path, mesh_format_from_path(path), scale, join_children);
}

}  // namespace synthgen

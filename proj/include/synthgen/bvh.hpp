// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

// Bounding-volume hierarchy over triangles. Nearest-hit queries are totally
// ordered by (t, triangle id), which makes the result independent of tree
// shape and bit-identical to brute force over the same triangle list.

#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "synthgen/errors.hpp"
#include "synthgen/math.hpp"

namespace synthgen {

struct BvhTriangle {
  Vec3 v0, v1, v2;
};

struct Hit {
  double t = kInf;
  int triangle = -1;
  double u = 0, v = 0;  // barycentrics of v1, v2

  bool valid() const { return triangle >= 0; }
};

// Moller-Trumbore, double precision, two-sided. Accepts hits strictly inside
// (ray.t_min, ray.t_max).
inline bool intersect_triangle(const Ray& ray, const Vec3& v0, const Vec3& v1, const Vec3& v2,
                               double* t_out, double* u_out, double* v_out) {
  Vec3 e1 = v1 - v0;
  Vec3 e2 = v2 - v0;
  Vec3 p = cross(ray.direction, e2);
  double det = dot(e1, p);
  if (det == 0) return false;
  double inv_det = 1.0 / det;
  Vec3 s = ray.origin - v0;
  double u = dot(s, p) * inv_det;
  if (u < 0 || u > 1) return false;
  Vec3 q = cross(s, e1);
  double v = dot(ray.direction, q) * inv_det;
  if (v < 0 || u + v > 1) return false;
  double t = dot(e2, q) * inv_det;
  if (t <= ray.t_min || t >= ray.t_max) return false;
  *t_out = t;
  *u_out = u;
  *v_out = v;
  return true;
}

// Reference implementation; the BVH must agree with this exactly.
inline Hit brute_force_intersect(const std::vector<BvhTriangle>& triangles, const Ray& ray) {
  Hit best;
  for (size_t i = 0; i < triangles.size(); ++i) {
    double t, u, v;
    if (intersect_triangle(ray, triangles[i].v0, triangles[i].v1, triangles[i].v2, &t, &u, &v)) {
      int id = static_cast<int>(i);
      if (t < best.t || (t == best.t && id < best.triangle)) best = {t, id, u, v};
    }
  }
  return best;
}

class Bvh {
 public:
  Bvh() = default;

  explicit Bvh(const std::vector<BvhTriangle>& triangles) { build(triangles); }

  void build(const std::vector<BvhTriangle>& triangles) {
    if (triangles.empty()) throw DataError("bvh: cannot build over an empty scene");
    triangles_ = &triangles;
    order_.resize(triangles.size());
    for (size_t i = 0; i < order_.size(); ++i) order_[i] = static_cast<int>(i);
    centroids_.resize(triangles.size());
    for (size_t i = 0; i < triangles.size(); ++i)
      centroids_[i] = (triangles[i].v0 + triangles[i].v1 + triangles[i].v2) / 3.0;
    nodes_.clear();
    nodes_.reserve(2 * triangles.size());
    build_node(0, static_cast<int>(order_.size()));
    centroids_.clear();
    centroids_.shrink_to_fit();
  }

  const Aabb& root_bounds() const { return nodes_.front().bounds; }
  const std::vector<int>& triangle_order() const { return order_; }

  struct ChildBounds {
    bool leaf = true;
    Aabb left, right;
  };
  ChildBounds root_children() const {
    ChildBounds cb;
    if (nodes_.front().count == 0) {
      cb.leaf = false;
      cb.left = nodes_[nodes_.front().left].bounds;
      cb.right = nodes_[nodes_.front().right].bounds;
    }
    return cb;
  }

  // Nearest hit; ties on t resolve to the lower triangle id.
  Hit intersect(const Ray& ray) const {
    Hit best;
    Vec3 inv_dir{1.0 / ray.direction.x, 1.0 / ray.direction.y, 1.0 / ray.direction.z};
    int stack[96];
    int sp = 0;
    stack[sp++] = 0;
    while (sp > 0) {
      const Node& node = nodes_[stack[--sp]];
      if (!hit_aabb(node.bounds, ray, inv_dir, best.t)) continue;
      if (node.count > 0) {
        for (int k = node.first; k < node.first + node.count; ++k) {
          int id = order_[k];
          const BvhTriangle& tri = (*triangles_)[id];
          double t, u, v;
          if (intersect_triangle(ray, tri.v0, tri.v1, tri.v2, &t, &u, &v)) {
            if (t < best.t || (t == best.t && id < best.triangle)) best = {t, id, u, v};
          }
        }
      } else {
        // Near child first; the far child stays deeper on the stack.
        int near = node.left, far = node.right;
        if (ray.direction[node.axis] < 0) std::swap(near, far);
        stack[sp++] = far;
        stack[sp++] = near;
      }
    }
    return best;
  }

  // Any-hit visibility query over (ray.t_min, ray.t_max).
  bool occluded(const Ray& ray) const {
    Vec3 inv_dir{1.0 / ray.direction.x, 1.0 / ray.direction.y, 1.0 / ray.direction.z};
    int stack[96];
    int sp = 0;
    stack[sp++] = 0;
    while (sp > 0) {
      const Node& node = nodes_[stack[--sp]];
      if (!hit_aabb(node.bounds, ray, inv_dir, ray.t_max)) continue;
      if (node.count > 0) {
        for (int k = node.first; k < node.first + node.count; ++k) {
          const BvhTriangle& tri = (*triangles_)[order_[k]];
          double t, u, v;
          if (intersect_triangle(ray, tri.v0, tri.v1, tri.v2, &t, &u, &v)) return true;
        }
      } else {
        stack[sp++] = node.right;
        stack[sp++] = node.left;
      }
    }
    return false;
  }

 private:
  struct Node {
    Aabb bounds;
    int left = -1, right = -1;  // inner nodes
    int first = 0, count = 0;   // leaves: range in order_
    int axis = 0;
  };

  static constexpr int kLeafSize = 4;

  // Slab test against [t_min, min(t_max, t_best)]. Nodes at exactly the best
  // t are still visited so the (t, id) tie-break stays tree-shape invariant.
  static bool hit_aabb(const Aabb& box, const Ray& ray, const Vec3& inv_dir, double t_best) {
    double t0 = ray.t_min, t1 = std::min(ray.t_max, t_best);
    for (int a = 0; a < 3; ++a) {
      double lo = (box.lo[a] - ray.origin[a]) * inv_dir[a];
      double hi = (box.hi[a] - ray.origin[a]) * inv_dir[a];
      if (lo > hi) std::swap(lo, hi);
      t0 = std::max(t0, lo);
      t1 = std::min(t1, hi);
      if (t0 > t1) return false;
    }
    return true;
  }

  int build_node(int begin, int end) {
    int index = static_cast<int>(nodes_.size());
    nodes_.emplace_back();

    Aabb bounds, centroid_bounds;
    for (int k = begin; k < end; ++k) {
      const BvhTriangle& tri = (*triangles_)[order_[k]];
      bounds.expand(tri.v0);
      bounds.expand(tri.v1);
      bounds.expand(tri.v2);
      centroid_bounds.expand(centroids_[order_[k]]);
    }
    nodes_[index].bounds = bounds;

    int count = end - begin;
    Vec3 extent = centroid_bounds.hi - centroid_bounds.lo;
    int axis = extent.x >= extent.y && extent.x >= extent.z ? 0 : extent.y >= extent.z ? 1 : 2;
    if (count <= kLeafSize || !(extent[axis] > 0)) {
      nodes_[index].first = begin;
      nodes_[index].count = count;
      return index;
    }

    // Median split on centroids along the widest axis; the id tie-break keeps
    // the partition deterministic.
    int mid = begin + count / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](int a, int b) {
                       double ca = centroids_[a][axis], cb = centroids_[b][axis];
                       return ca < cb || (ca == cb && a < b);
                     });

    int left = build_node(begin, mid);
    int right = build_node(mid, end);
    nodes_[index].axis = axis;
    nodes_[index].left = left;
    nodes_[index].right = right;
    nodes_[index].count = 0;
    return index;
  }

  const std::vector<BvhTriangle>* triangles_ = nullptr;
  std::vector<Node> nodes_;
  std::vector<int> order_;
  std::vector<Vec3> centroids_;
};

}  // namespace synthgen

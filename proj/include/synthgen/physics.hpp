// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

// Placement and settling on oriented proxy boxes. Collision tests are
// separating-axis tests over the 15 candidate axes; settling is fixed-step
// semi-implicit Euler with impulse contacts, a per-step positional pass, and
// a final projection that drives residual penetration under the tolerance.
// Everything here is deterministic: no wall clock, no unordered iteration.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "synthgen/camera.hpp"
#include "synthgen/catalog.hpp"
#include "synthgen/config.hpp"
#include "synthgen/math.hpp"
#include "synthgen/rng.hpp"
#include "synthgen/sampler.hpp"

namespace synthgen {

// Max box-box or box-plane penetration accepted in a settled scene, meters.
constexpr double kPenetrationTolerance = 1e-4;

enum class BodyRole { kActive, kPassive };

struct RigidBodyState {
  Vec3 position{0, 0, 0};  // asset-origin world position
  Mat3 rotation;
  Vec3 linear_velocity{0, 0, 0};
  Vec3 angular_velocity{0, 0, 0};
  BodyRole role = BodyRole::kActive;
};

struct SettleParams {
  double gravity = 9.81;        // m/s^2, along -z
  double timestep = 1.0 / 240;  // s
  int max_steps = 2400;
  double rest_speed = 1e-3;  // m/s, termination threshold
  double restitution = 0.0;
  double friction = 0.5;
};

// Oriented box in world space; columns of `axes` are the box axes.
struct Obb {
  Vec3 center;
  Vec3 half;
  Mat3 axes;
};

inline Obb world_obb(const ProxyBox& proxy, const Mat3& rotation, const Vec3& position) {
  Obb box;
  box.center = rotation * proxy.center + position;
  box.axes = rotation * proxy.orientation;
  box.half = proxy.half_extents;
  return box;
}

inline std::array<Vec3, 8> obb_corners(const Obb& box) {
  std::array<Vec3, 8> corners;
  int k = 0;
  for (int sx : {-1, 1})
    for (int sy : {-1, 1})
      for (int sz : {-1, 1})
        corners[k++] = box.center + box.axes.col(0) * (sx * box.half.x) +
                       box.axes.col(1) * (sy * box.half.y) + box.axes.col(2) * (sz * box.half.z);
  return corners;
}

// Separating-axis test. Returns penetration depth along the least-overlap
// axis (negative means separated) and the unit axis pointing from b to a.
inline double obb_penetration(const Obb& a, const Obb& b, Vec3* axis_out = nullptr) {
  std::array<Vec3, 15> axes;
  int n = 0;
  for (int i = 0; i < 3; ++i) axes[n++] = a.axes.col(i);
  for (int i = 0; i < 3; ++i) axes[n++] = b.axes.col(i);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      Vec3 c = cross(a.axes.col(i), b.axes.col(j));
      double len = length(c);
      if (len > 1e-9) axes[n++] = c / len;
    }

  Vec3 d = a.center - b.center;
  double best = kInf;
  Vec3 best_axis{0, 0, 1};
  for (int i = 0; i < n; ++i) {
    const Vec3& axis = axes[i];
    double ra = a.half.x * std::abs(dot(axis, a.axes.col(0))) +
                a.half.y * std::abs(dot(axis, a.axes.col(1))) +
                a.half.z * std::abs(dot(axis, a.axes.col(2)));
    double rb = b.half.x * std::abs(dot(axis, b.axes.col(0))) +
                b.half.y * std::abs(dot(axis, b.axes.col(1))) +
                b.half.z * std::abs(dot(axis, b.axes.col(2)));
    double overlap = ra + rb - std::abs(dot(axis, d));
    if (overlap < best) {
      best = overlap;
      best_axis = dot(axis, d) < 0 ? -axis : axis;
    }
    if (overlap < 0) break;  // separated; keep the separating axis sign
  }
  if (axis_out) *axis_out = best_axis;
  return best;
}

inline bool obb_overlap(const Obb& a, const Obb& b, double tolerance = 0) {
  return obb_penetration(a, b) > tolerance;
}

// Support point of the box along a world direction.
inline Vec3 obb_support(const Obb& box, const Vec3& dir) {
  Vec3 p = box.center;
  for (int i = 0; i < 3; ++i) {
    Vec3 axis = box.axes.col(i);
    p += axis * (dot(axis, dir) >= 0 ? box.half[i] : -box.half[i]);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Penetration audit.

struct PenetrationReport {
  bool ok = true;
  double max_penetration = 0;
  // Offending pairs as body indices; -1 denotes the ground plane.
  std::vector<std::pair<int, int>> offenders;
};

inline double plane_penetration(const Obb& box) {
  double deepest = -kInf;
  for (const Vec3& c : obb_corners(box)) deepest = std::max(deepest, -c.z);
  return deepest;  // > 0 means below the plane
}

inline PenetrationReport check_no_penetration(const std::vector<Obb>& boxes, double tolerance,
                                              bool include_plane = false) {
  PenetrationReport report;
  for (size_t i = 0; i < boxes.size(); ++i) {
    for (size_t j = i + 1; j < boxes.size(); ++j) {
      double pen = obb_penetration(boxes[i], boxes[j]);
      if (pen > tolerance) {
        report.ok = false;
        report.offenders.emplace_back(static_cast<int>(i), static_cast<int>(j));
      }
      report.max_penetration = std::max(report.max_penetration, pen);
    }
    if (include_plane) {
      double pen = plane_penetration(boxes[i]);
      if (pen > tolerance) {
        report.ok = false;
        report.offenders.emplace_back(static_cast<int>(i), -1);
      }
      report.max_penetration = std::max(report.max_penetration, pen);
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Collision-free placement by rejection sampling.

struct PlacementResult {
  std::vector<ObjectInstanceSpec> instances;  // survivors, draw order preserved
  std::vector<std::string> warnings;
};

namespace physicsdetail {

inline bool box_in_frustum(const Obb& box, const std::array<Plane, 5>& planes) {
  std::array<Vec3, 8> corners = obb_corners(box);
  for (const Plane& plane : planes) {
    bool any_inside = false;
    for (const Vec3& c : corners)
      if (plane.distance(c) >= 0) {
        any_inside = true;
        break;
      }
    if (!any_inside) return false;  // all corners outside one plane
  }
  return true;
}

}  // namespace physicsdetail

// Re-draws poses for instances that overlap already-placed ones or fall
// outside the camera frustum; gives up on an instance after max_attempts and
// drops it with a warning. Draw order and the instance_ids of survivors are
// never changed.
inline PlacementResult place_collision_free(const GenerationConfig& cfg,
                                            const AssetCatalog& catalog,
                                            const AnchorSpec& anchor, const CameraSpec& camera,
                                            const std::vector<ObjectInstanceSpec>& instances,
                                            int max_attempts, Rng& rng) {
  if (max_attempts < 1) throw ConfigError("placement max_attempts must be >= 1");
  std::array<Plane, 5> frustum = frustum_planes(make_camera_frame(camera));

  PlacementResult result;
  std::vector<Obb> placed;
  for (const ObjectInstanceSpec& original : instances) {
    const CatalogAsset& asset = catalog_pool(catalog, original.role)[original.asset_index];
    ObjectInstanceSpec inst = original;
    bool ok = false;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
      if (attempt > 0) {
        // Resample within the same configured ranges.
        inst.offset = {
            rng.uniform(cfg.spawn.position_offset.x.min, cfg.spawn.position_offset.x.max),
            rng.uniform(cfg.spawn.position_offset.y.min, cfg.spawn.position_offset.y.max),
            rng.uniform(cfg.spawn.position_offset.z.min, cfg.spawn.position_offset.z.max)};
        inst.position = anchor.position + inst.offset;
        inst.orientation_deg = {
            rng.uniform(cfg.spawn.orientation.x.min, cfg.spawn.orientation.x.max),
            rng.uniform(cfg.spawn.orientation.y.min, cfg.spawn.orientation.y.max),
            rng.uniform(cfg.spawn.orientation.z.min, cfg.spawn.orientation.z.max)};
      }
      Obb box = world_obb(asset.proxy, rotation_from_euler_deg(inst.orientation_deg),
                          inst.position);
      bool collides = false;
      for (const Obb& other : placed)
        if (obb_overlap(box, other)) {
          collides = true;
          break;
        }
      if (collides || !physicsdetail::box_in_frustum(box, frustum)) continue;
      placed.push_back(box);
      result.instances.push_back(inst);
      ok = true;
      break;
    }
    if (!ok)
      result.warnings.push_back("instance " + std::to_string(original.instance_id) + " (" +
                                asset_role_name(original.role) + " '" + asset.name +
                                "') dropped after " + std::to_string(max_attempts) +
                                " placement attempts");
  }
  return result;
}

// ---------------------------------------------------------------------------
// Gravity settling.

struct SettleOutcome {
  std::vector<RigidBodyState> bodies;
  bool converged = false;         // rest speeds reached within max_steps
  bool penetration_free = false;  // projection reached the tolerance
  int steps = 0;
};

namespace physicsdetail {

struct WorkBody {
  Vec3 cm;  // center of mass (box center)
  Mat3 rotation;
  Vec3 v{0, 0, 0}, w{0, 0, 0};
  Vec3 half;
  Vec3 local_center;  // proxy center in asset frame
  Mat3 local_axes;    // proxy orientation in asset frame
  double inv_mass = 0;
  Vec3 inv_inertia_local{0, 0, 0};  // diagonal, box frame
  bool active = false;
};

struct Contact {
  int a = -1, b = -1;  // body indices; b == -1 is the static ground plane
  Vec3 point;
  Vec3 normal;  // unit, pushes a away from b
  double penetration = 0;
  double target_vn = 0;  // restitution target, set at detection time
};

inline Obb body_obb(const WorkBody& body) {
  return {body.cm, body.half, body.rotation * body.local_axes};
}

inline Mat3 scale_columns(const Mat3& m, const Vec3& s) {
  Mat3 r = m;
  for (int i = 0; i < 3; ++i) {
    r.r0[i] *= s[i];
    r.r1[i] *= s[i];
    r.r2[i] *= s[i];
  }
  return r;
}

// World-space inverse inertia: R * diag(inv_local) * R^T with R the box-axes
// rotation.
inline Mat3 world_inv_inertia(const WorkBody& body) {
  Mat3 axes = body.rotation * body.local_axes;
  return scale_columns(axes, body.inv_inertia_local) * transpose(axes);
}

inline Vec3 velocity_at(const WorkBody& body, const Vec3& point) {
  return body.v + cross(body.w, point - body.cm);
}

inline void apply_impulse(WorkBody& body, const Mat3& inv_inertia, const Vec3& impulse,
                          const Vec3& point) {
  body.v += impulse * body.inv_mass;
  body.w += inv_inertia * cross(point - body.cm, impulse);
}

// Sutherland-Hodgman clip of `poly` against the half-space dot(p, n) <= d.
// A quad clipped by the four side planes never exceeds eight vertices.
inline void clip_polygon(std::array<Vec3, 8>& poly, int& count, const Vec3& n, double d) {
  std::array<Vec3, 8> out;
  int m = 0;
  for (int i = 0; i < count; ++i) {
    const Vec3& p = poly[i];
    const Vec3& q = poly[(i + 1) % count];
    double dp = dot(p, n) - d;
    double dq = dot(q, n) - d;
    if (dp <= 0) out[m++] = p;
    if ((dp < 0 && dq > 0) || (dp > 0 && dq < 0)) out[m++] = p + (q - p) * (dp / (dp - dq));
  }
  poly = out;
  count = m;
}

// Face-clipped manifold for face-dominant box-box contacts. The reference
// face is the face (of either box) whose normal is most parallel to the
// separating axis; the incident face of the other box is clipped against its
// side planes, and every clipped vertex within `margin` of the face becomes
// a contact. A face-to-face stack gets a polygon of support this way instead
// of one rocking point. Returns false for edge-dominant axes or an empty
// clip; the caller then falls back to a single support-midpoint contact.
inline bool append_face_manifold(const Obb& box_a, const Obb& box_b, const Vec3& axis,
                                 int ia, int ib, double margin,
                                 std::vector<Contact>* contacts) {
  double best = 0;
  bool on_a = false;
  int ref_k = 0;
  for (int k = 0; k < 3; ++k) {
    double da = std::abs(dot(axis, box_a.axes.col(k)));
    if (da > best) {
      best = da;
      on_a = true;
      ref_k = k;
    }
    double db = std::abs(dot(axis, box_b.axes.col(k)));
    if (db > best) {
      best = db;
      on_a = false;
      ref_k = k;
    }
  }
  if (best < 0.99) return false;

  const Obb& ref = on_a ? box_a : box_b;
  const Obb& inc = on_a ? box_b : box_a;
  // Outward normal of the reference face that looks at the other box. The
  // separating axis points from b to a, so it leaves B and enters A.
  double d_ref = dot(axis, ref.axes.col(ref_k));
  double ref_sign = (d_ref > 0) == on_a ? -1.0 : 1.0;
  Vec3 ref_n = ref.axes.col(ref_k) * ref_sign;
  double face_d = dot(ref.center, ref_n) + ref.half[ref_k];

  // Incident face: the face of the other box most anti-parallel to ref_n.
  int inc_k = 0;
  double inc_s = 1.0;
  double lowest = kInf;
  for (int k = 0; k < 3; ++k)
    for (double s : {1.0, -1.0}) {
      double d = dot(ref_n, inc.axes.col(k)) * s;
      if (d < lowest) {
        lowest = d;
        inc_k = k;
        inc_s = s;
      }
    }
  Vec3 face_c = inc.center + inc.axes.col(inc_k) * (inc_s * inc.half[inc_k]);
  Vec3 eu = inc.axes.col((inc_k + 1) % 3) * inc.half[(inc_k + 1) % 3];
  Vec3 ev = inc.axes.col((inc_k + 2) % 3) * inc.half[(inc_k + 2) % 3];
  std::array<Vec3, 8> poly{face_c + eu + ev, face_c + eu - ev, face_c - eu - ev,
                           face_c - eu + ev};
  int count = 4;
  for (int t = 0; t < 3; ++t) {
    if (t == ref_k) continue;
    Vec3 tangent = ref.axes.col(t);
    double c = dot(ref.center, tangent);
    clip_polygon(poly, count, tangent, c + ref.half[t]);
    if (count == 0) return false;
    clip_polygon(poly, count, tangent * -1.0, ref.half[t] - c);
    if (count == 0) return false;
  }

  Vec3 normal = on_a ? ref_n * -1.0 : ref_n;  // pushes a away from b
  bool any = false;
  for (int i = 0; i < count; ++i) {
    double sep = dot(poly[i], ref_n) - face_d;
    if (sep >= margin) continue;
    Contact c;
    c.a = ia;
    c.b = ib;
    c.point = poly[i];
    c.normal = normal;
    c.penetration = std::max(-sep, 0.0);
    contacts->push_back(c);
    any = true;
  }
  return any;
}

inline void collect_contacts(const std::vector<WorkBody>& bodies, double margin,
                             std::vector<Contact>* contacts) {
  contacts->clear();
  for (size_t i = 0; i < bodies.size(); ++i) {
    const WorkBody& body = bodies[i];
    if (body.active) {
      // Plane contacts: every corner at or below the margin.
      for (const Vec3& corner : obb_corners(body_obb(body))) {
        if (corner.z < margin) {
          Contact c;
          c.a = static_cast<int>(i);
          c.b = -1;
          c.point = corner;
          c.normal = {0, 0, 1};
          c.penetration = -corner.z;
          contacts->push_back(c);
        }
      }
    }
    for (size_t j = i + 1; j < bodies.size(); ++j) {
      if (!bodies[i].active && !bodies[j].active) continue;
      Obb box_a = body_obb(bodies[i]);
      Obb box_b = body_obb(bodies[j]);
      Vec3 axis;
      double pen = obb_penetration(box_a, box_b, &axis);
      if (pen < -margin) continue;
      int ia = static_cast<int>(i);
      int ib = static_cast<int>(j);
      if (append_face_manifold(box_a, box_b, axis, ia, ib, margin, contacts)) continue;
      // Edge-dominant contact: midpoint of the facing support points.
      Contact c;
      c.a = ia;
      c.b = ib;
      c.normal = axis;  // points from b to a
      Vec3 pa = obb_support(box_a, -axis);
      Vec3 pb = obb_support(box_b, axis);
      c.point = (pa + pb) * 0.5;
      c.penetration = std::max(pen, 0.0);
      contacts->push_back(c);
    }
  }
}

}  // namespace physicsdetail

// Settles active bodies under gravity against the z = 0 plane and each other.
// Passive bodies are immovable obstacles and are returned bit-identical.
inline SettleOutcome settle(const std::vector<RigidBodyState>& initial,
                            const std::vector<ProxyBox>& proxies, const SettleParams& params) {
  if (initial.size() != proxies.size())
    throw DataError("settle: body/proxy count mismatch");
  if (!(params.timestep > 0) || !(params.rest_speed > 0))
    throw ConfigError("settle: timestep and rest threshold must be > 0");

  using physicsdetail::Contact;
  using physicsdetail::WorkBody;

  std::vector<WorkBody> bodies(initial.size());
  for (size_t i = 0; i < initial.size(); ++i) {
    const RigidBodyState& s = initial[i];
    const ProxyBox& p = proxies[i];
    WorkBody& b = bodies[i];
    b.rotation = s.rotation;
    b.local_center = p.center;
    b.local_axes = p.orientation;
    b.half = p.half_extents;
    b.cm = s.rotation * p.center + s.position;
    b.v = s.linear_velocity;
    b.w = s.angular_velocity;
    b.active = s.role == BodyRole::kActive;
    if (b.active) {
      double mass = 8.0 * p.half_extents.x * p.half_extents.y * p.half_extents.z * 1000.0;
      b.inv_mass = 1.0 / mass;
      Vec3 h = p.half_extents;
      b.inv_inertia_local = {3.0 / (mass * (h.y * h.y + h.z * h.z)),
                             3.0 / (mass * (h.x * h.x + h.z * h.z)),
                             3.0 / (mass * (h.x * h.x + h.y * h.y))};
    }
  }

  const double dt = params.timestep;
  const double slop = 2e-5;
  const double restitution_threshold = 4 * params.gravity * dt;
  std::vector<Contact> contacts;
  SettleOutcome outcome;
  bool resting = false;

  for (int step = 0; step < params.max_steps && !resting; ++step) {
    outcome.steps = step + 1;
    for (WorkBody& b : bodies)
      if (b.active) b.v.z -= params.gravity * dt;

    physicsdetail::collect_contacts(bodies, 1e-9, &contacts);
    for (Contact& c : contacts) {
      WorkBody& a = bodies[c.a];
      double vn = dot(physicsdetail::velocity_at(a, c.point) -
                          (c.b >= 0 ? physicsdetail::velocity_at(bodies[c.b], c.point)
                                    : Vec3{0, 0, 0}),
                      c.normal);
      c.target_vn = vn < -restitution_threshold ? -params.restitution * vn : 0.0;
    }

    // Velocity iterations (no positional bias; positions are corrected
    // separately so rest detection is not polluted by correction velocity).
    std::vector<double> accumulated(contacts.size(), 0.0);
    for (int iteration = 0; iteration < 16; ++iteration) {
      for (size_t ci = 0; ci < contacts.size(); ++ci) {
        const Contact& c = contacts[ci];
        WorkBody& a = bodies[c.a];
        WorkBody* b = c.b >= 0 ? &bodies[c.b] : nullptr;
        Mat3 inv_ia = physicsdetail::world_inv_inertia(a);
        Mat3 inv_ib = b ? physicsdetail::world_inv_inertia(*b) : Mat3{{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};

        Vec3 ra = c.point - a.cm;
        Vec3 v_rel = physicsdetail::velocity_at(a, c.point) -
                     (b ? physicsdetail::velocity_at(*b, c.point) : Vec3{0, 0, 0});
        double vn = dot(v_rel, c.normal);
        double k = a.inv_mass + (b ? b->inv_mass : 0.0) +
                   dot(c.normal, cross(inv_ia * cross(ra, c.normal), ra));
        if (b) {
          Vec3 rb = c.point - b->cm;
          k += dot(c.normal, cross(inv_ib * cross(rb, c.normal), rb));
        }
        if (k <= 0) continue;
        double jn = (c.target_vn - vn) / k;
        double new_total = std::max(accumulated[ci] + jn, 0.0);
        jn = new_total - accumulated[ci];
        accumulated[ci] = new_total;
        Vec3 impulse = c.normal * jn;
        if (a.active) physicsdetail::apply_impulse(a, inv_ia, impulse, c.point);
        if (b && b->active) physicsdetail::apply_impulse(*b, inv_ib, -impulse, c.point);

        // Coulomb friction against the accumulated normal impulse.
        v_rel = physicsdetail::velocity_at(a, c.point) -
                (b ? physicsdetail::velocity_at(*b, c.point) : Vec3{0, 0, 0});
        Vec3 vt = v_rel - c.normal * dot(v_rel, c.normal);
        double vt_len = length(vt);
        if (vt_len > 1e-9) {
          Vec3 tangent = vt / vt_len;
          double kt = a.inv_mass + (b ? b->inv_mass : 0.0) +
                      dot(tangent, cross(inv_ia * cross(ra, tangent), ra));
          if (b) {
            Vec3 rb = c.point - b->cm;
            kt += dot(tangent, cross(inv_ib * cross(rb, tangent), rb));
          }
          if (kt > 0) {
            double jt = std::clamp(-vt_len / kt, -params.friction * accumulated[ci],
                                   params.friction * accumulated[ci]);
            Vec3 friction_impulse = tangent * jt;
            if (a.active) physicsdetail::apply_impulse(a, inv_ia, friction_impulse, c.point);
            if (b && b->active) physicsdetail::apply_impulse(*b, inv_ib, -friction_impulse, c.point);
          }
        }
      }
    }

    // Rest check before integrating: an equilibrium start stays bit-still.
    double max_speed = 0;
    for (const WorkBody& b : bodies)
      if (b.active) {
        double extent = max_component(b.half);
        max_speed = std::max(max_speed, length(b.v));
        max_speed = std::max(max_speed, length(b.w) * extent);
      }
    if (max_speed < params.rest_speed) {
      resting = true;
      break;
    }

    for (WorkBody& b : bodies) {
      if (!b.active) continue;
      b.cm += b.v * dt;
      Mat3 skew{{0, -b.w.z, b.w.y}, {b.w.z, 0, -b.w.x}, {-b.w.y, b.w.x, 0}};
      Mat3 r = b.rotation;
      Mat3 dr = skew * r;
      r.r0 += dr.r0 * dt;
      r.r1 += dr.r1 * dt;
      r.r2 += dr.r2 * dt;
      // Gram-Schmidt re-orthonormalization, column order x, y, z.
      Vec3 c0 = normalize(r.col(0));
      Vec3 c1 = r.col(1) - c0 * dot(c0, r.col(1));
      c1 = normalize(c1);
      Vec3 c2 = cross(c0, c1);
      b.rotation = {{c0.x, c1.x, c2.x}, {c0.y, c1.y, c2.y}, {c0.z, c1.z, c2.z}};
    }

    // Positional pass: translate penetrating active bodies apart.
    for (int iteration = 0; iteration < 4; ++iteration) {
      physicsdetail::collect_contacts(bodies, 0.0, &contacts);
      for (const Contact& c : contacts) {
        double push = 0.2 * std::max(c.penetration - slop, 0.0);
        if (push <= 0) continue;
        WorkBody& a = bodies[c.a];
        WorkBody* b = c.b >= 0 ? &bodies[c.b] : nullptr;
        double wa = a.active ? a.inv_mass : 0.0;
        double wb = b && b->active ? b->inv_mass : 0.0;
        if (wa + wb <= 0) continue;
        if (a.active) a.cm += c.normal * (push * wa / (wa + wb));
        if (b && b->active) b->cm -= c.normal * (push * wb / (wa + wb));
      }
    }
  }
  outcome.converged = resting;

  // Final projection: drive residual penetration below the tolerance.
  bool clean = false;
  for (int iteration = 0; iteration < 256 && !clean; ++iteration) {
    physicsdetail::collect_contacts(bodies, 0.0, &contacts);
    clean = true;
    for (const Contact& c : contacts) {
      if (c.penetration <= kPenetrationTolerance * 0.5) continue;
      clean = false;
      double push = c.penetration - kPenetrationTolerance * 0.25;
      WorkBody& a = bodies[c.a];
      WorkBody* b = c.b >= 0 ? &bodies[c.b] : nullptr;
      double wa = a.active ? a.inv_mass : 0.0;
      double wb = b && b->active ? b->inv_mass : 0.0;
      if (wa + wb <= 0) continue;
      if (a.active) a.cm += c.normal * (push * wa / (wa + wb));
      if (b && b->active) b->cm -= c.normal * (push * wb / (wa + wb));
    }
  }
  outcome.penetration_free = clean;

  outcome.bodies = initial;
  for (size_t i = 0; i < bodies.size(); ++i) {
    if (!bodies[i].active) continue;  // passive bodies returned untouched
    RigidBodyState& s = outcome.bodies[i];
    const WorkBody& b = bodies[i];
    s.rotation = b.rotation;
    s.position = b.cm - b.rotation * b.local_center;
    s.linear_velocity = b.v;
    s.angular_velocity = b.w;
  }
  return outcome;
}

}  // namespace synthgen

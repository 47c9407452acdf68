/*
 * Copyright (c) 2026 risim authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */
#include "risim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "risim/errors.hpp"

namespace risim {

Vec3 Surface::unit_normal() const {
  const Vec3 n = edge_u().cross(edge_v());
  const double len = n.norm();
  if (!(len > 1e-15))
    throw std::invalid_argument("surface '" + name + "' is degenerate (zero normal)");
  return n / len;
}

bool Surface::contains(const Vec3& p, double tol) const {
  const Vec3 n = unit_normal();
  const Vec3 r = p - origin();
  if (std::abs(r.dot(n)) > tol) return false;
  const Vec3 u = edge_u();
  const Vec3 v = edge_v();
  // Edges of a rectangle/parallelogram facet are the coordinate axes of the
  // in-plane parameterisation.
  const double uu = u.squaredNorm();
  const double vv = v.squaredNorm();
  const double uv = u.dot(v);
  const double ru = r.dot(u);
  const double rv = r.dot(v);
  const double det = uu * vv - uv * uv;
  if (!(det > 1e-18)) return false;
  const double s = (ru * vv - rv * uv) / det;
  const double t = (rv * uu - ru * uv) / det;
  const double edge_tol = tol;
  return s >= -edge_tol && s <= 1.0 + edge_tol && t >= -edge_tol &&
         t <= 1.0 + edge_tol;
}

void Surface::validate() const {
  const Vec3 n = unit_normal();
  // All four corners coplanar.
  if (std::abs((corners[2] - corners[0]).dot(n)) > 1e-9)
    throw ValidationError("surface '" + name + "' corners are not coplanar");
  if (gamma < 0.0 || gamma > 1.0)
    throw ValidationError("surface '" + name + "' gamma outside [0, 1]");
}

std::vector<Surface> Room::wall_surfaces() const {
  const Vec3& lo = min_corner;
  const Vec3& hi = max_corner;
  auto make = [](Vec3 c0, Vec3 c1, Vec3 c2, Vec3 c3, double g, std::string n) {
    return Surface{{c0, c1, c2, c3}, g, std::move(n)};
  };
  std::vector<Surface> walls;
  walls.reserve(6);
  walls.push_back(make({lo.x(), lo.y(), lo.z()}, {lo.x(), hi.y(), lo.z()},
                       {lo.x(), hi.y(), hi.z()}, {lo.x(), lo.y(), hi.z()},
                       wall_gamma[0], "wall_x_min"));
  walls.push_back(make({hi.x(), lo.y(), lo.z()}, {hi.x(), hi.y(), lo.z()},
                       {hi.x(), hi.y(), hi.z()}, {hi.x(), lo.y(), hi.z()},
                       wall_gamma[1], "wall_x_max"));
  walls.push_back(make({lo.x(), lo.y(), lo.z()}, {hi.x(), lo.y(), lo.z()},
                       {hi.x(), lo.y(), hi.z()}, {lo.x(), lo.y(), hi.z()},
                       wall_gamma[2], "wall_y_min"));
  walls.push_back(make({lo.x(), hi.y(), lo.z()}, {hi.x(), hi.y(), lo.z()},
                       {hi.x(), hi.y(), hi.z()}, {lo.x(), hi.y(), hi.z()},
                       wall_gamma[3], "wall_y_max"));
  walls.push_back(make({lo.x(), lo.y(), lo.z()}, {hi.x(), lo.y(), lo.z()},
                       {hi.x(), hi.y(), lo.z()}, {lo.x(), hi.y(), lo.z()},
                       wall_gamma[4], "floor"));
  walls.push_back(make({lo.x(), lo.y(), hi.z()}, {hi.x(), lo.y(), hi.z()},
                       {hi.x(), hi.y(), hi.z()}, {lo.x(), hi.y(), hi.z()},
                       wall_gamma[5], "ceiling"));
  return walls;
}

bool Room::inside(const Vec3& p, double margin) const {
  return p.x() > min_corner.x() + margin && p.x() < max_corner.x() - margin &&
         p.y() > min_corner.y() + margin && p.y() < max_corner.y() - margin &&
         p.z() > min_corner.z() + margin && p.z() < max_corner.z() - margin;
}

void Room::validate() const {
  if (!(max_corner.x() > min_corner.x() && max_corner.y() > min_corner.y() &&
        max_corner.z() > min_corner.z()))
    throw ValidationError("room max corner must exceed min corner");
  for (double g : wall_gamma)
    if (g < 0.0 || g > 1.0) throw ValidationError("wall gamma outside [0, 1]");
}

std::vector<Surface> Scene::all_surfaces() const {
  std::vector<Surface> out = room.wall_surfaces();
  out.insert(out.end(), scatterers.begin(), scatterers.end());
  return out;
}

void Scene::validate() const {
  if (!(carrier_frequency_hz > 0.0))
    throw ValidationError("carrier frequency must be positive");
  room.validate();
  for (const Surface& s : scatterers) s.validate();
  for (const auto& [name, pose] : nodes)
    if (!room.inside(pose.position))
      throw ValidationError("node '" + name + "' is not strictly inside the room");
}

Vec3 mirror_point(const Vec3& point, const Surface& plane) {
  const Vec3 n = plane.unit_normal();  // throws on degenerate facet
  const double d = (point - plane.origin()).dot(n);
  return point - 2.0 * d * n;
}

namespace {

// Intersection of segment a->b with the facet's supporting plane, if the
// crossing parameter lies strictly inside (eps, 1-eps).
std::optional<Vec3> segment_plane_hit(const Vec3& a, const Vec3& b,
                                      const Surface& s, double eps) {
  const Vec3 n = s.unit_normal();
  const double da = (a - s.origin()).dot(n);
  const double db = (b - s.origin()).dot(n);
  const double denom = da - db;
  if (std::abs(denom) < 1e-15) return std::nullopt;  // parallel
  const double t = da / denom;
  if (t <= eps || t >= 1.0 - eps) return std::nullopt;
  return a + t * (b - a);
}

struct PathGeometry {
  std::vector<Vec3> points;  // tx, reflections..., rx
  std::vector<int> surfaces;
};

PathRecord build_record(const Scene& scene, const std::vector<Surface>& surfs,
                        const PathGeometry& g) {
  PathRecord rec;
  rec.order = static_cast<int>(g.surfaces.size());
  rec.tx_position = g.points.front();
  rec.rx_position = g.points.back();
  rec.reflection_points.assign(g.points.begin() + 1, g.points.end() - 1);
  rec.surface_indices = g.surfaces;
  double len = 0.0;
  for (size_t i = 0; i + 1 < g.points.size(); ++i)
    len += (g.points[i + 1] - g.points[i]).norm();
  rec.length = len;
  rec.delay = len / kSpeedOfLight;
  double gamma_prod = 1.0;
  for (int idx : g.surfaces) {
    gamma_prod *= surfs[static_cast<size_t>(idx)].gamma;
    rec.surface_names.push_back(surfs[static_cast<size_t>(idx)].name);
  }
  rec.gain = scene.wavelength() / (4.0 * kPi * len) * gamma_prod;
  const Vec3 first = g.points[1] - g.points[0];
  const Vec3 last = g.points[g.points.size() - 2] - g.points.back();
  rec.aod_azimuth = azimuth_of(first);
  rec.aod_elevation = elevation_of(first);
  rec.aoa_azimuth = azimuth_of(last);
  rec.aoa_elevation = elevation_of(last);
  return rec;
}

bool occluded_by_any(const std::vector<Surface>& surfs, const Vec3& a,
                     const Vec3& b, double eps) {
  for (const Surface& s : surfs) {
    const auto hit = segment_plane_hit(a, b, s, eps);
    if (hit && s.contains(*hit, 1e-7)) return true;
  }
  return false;
}

// Both endpoints strictly on the same side of the facet plane: a specular
// bounce keeps the physical path on one side of its reflector.
bool same_side(const Surface& s, const Vec3& a, const Vec3& b) {
  const Vec3 n = s.unit_normal();
  const double da = (a - s.origin()).dot(n);
  const double db = (b - s.origin()).dot(n);
  return da * db > 0.0;
}

}  // namespace

bool segment_occluded(const Scene& scene, const Vec3& a, const Vec3& b,
                      double eps) {
  return occluded_by_any(scene.all_surfaces(), a, b, eps);
}

std::vector<PathRecord> trace_paths(const Scene& scene, const std::string& tx,
                                    const std::string& rx, int max_order) {
  if (max_order < 0 || max_order > 2)
    throw UnsupportedOrderError("trace_paths supports reflection orders 0..2");
  if (tx == rx) throw std::invalid_argument("trace_paths: tx must differ from rx");
  const Pose& tx_pose = scene.nodes.at(tx);
  const Pose& rx_pose = scene.nodes.at(rx);
  const Vec3 t = tx_pose.position;
  const Vec3 r = rx_pose.position;
  const std::vector<Surface> surfs = scene.all_surfaces();
  constexpr double kEps = 1e-9;

  std::vector<PathRecord> out;

  if (!occluded_by_any(surfs, t, r, kEps))
    out.push_back(build_record(scene, surfs, {{t, r}, {}}));

  if (max_order >= 1) {
    for (size_t i = 0; i < surfs.size(); ++i) {
      const Surface& si = surfs[i];
      if (si.gamma <= 0.0) continue;
      if (!same_side(si, t, r)) continue;
      const Vec3 image = mirror_point(t, si);
      const auto p = segment_plane_hit(image, r, si, kEps);
      if (!p || !si.contains(*p, 1e-7)) continue;
      if (occluded_by_any(surfs, t, *p, kEps)) continue;
      if (occluded_by_any(surfs, *p, r, kEps)) continue;
      out.push_back(build_record(scene, surfs, {{t, *p, r}, {static_cast<int>(i)}}));
    }
  }

  if (max_order >= 2) {
    for (size_t i = 0; i < surfs.size(); ++i) {
      const Surface& si = surfs[i];
      if (si.gamma <= 0.0) continue;
      const Vec3 image1 = mirror_point(t, si);
      for (size_t j = 0; j < surfs.size(); ++j) {
        if (j == i) continue;
        const Surface& sj = surfs[j];
        if (sj.gamma <= 0.0) continue;
        const Vec3 image2 = mirror_point(image1, sj);
        const auto p2 = segment_plane_hit(image2, r, sj, kEps);
        if (!p2 || !sj.contains(*p2, 1e-7)) continue;
        const auto p1 = segment_plane_hit(image1, *p2, si, kEps);
        if (!p1 || !si.contains(*p1, 1e-7)) continue;
        if (!same_side(si, t, *p2)) continue;
        if (!same_side(sj, *p1, r)) continue;
        if (occluded_by_any(surfs, t, *p1, kEps)) continue;
        if (occluded_by_any(surfs, *p1, *p2, kEps)) continue;
        if (occluded_by_any(surfs, *p2, r, kEps)) continue;
        out.push_back(build_record(
            scene, surfs,
            {{t, *p1, *p2, r}, {static_cast<int>(i), static_cast<int>(j)}}));
      }
    }
  }

  std::stable_sort(out.begin(), out.end(),
                   [](const PathRecord& a, const PathRecord& b) {
                     return a.delay < b.delay;
                   });
  return out;
}

bool validate_path(const PathRecord& candidate, const Scene& scene) {
  const std::vector<Surface> surfs = scene.all_surfaces();
  if (candidate.reflection_points.size() != candidate.surface_indices.size())
    return false;
  for (size_t k = 0; k < candidate.reflection_points.size(); ++k) {
    const int idx = candidate.surface_indices[k];
    if (idx < 0 || static_cast<size_t>(idx) >= surfs.size()) return false;
    if (!surfs[static_cast<size_t>(idx)].contains(candidate.reflection_points[k], 1e-7))
      return false;
  }
  std::vector<Vec3> chain;
  chain.push_back(candidate.tx_position);
  chain.insert(chain.end(), candidate.reflection_points.begin(),
               candidate.reflection_points.end());
  chain.push_back(candidate.rx_position);
  for (size_t k = 0; k + 1 < chain.size(); ++k)
    if (occluded_by_any(surfs, chain[k], chain[k + 1], 1e-9)) return false;
  return true;
}

}  // namespace risim

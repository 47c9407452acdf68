/*
 * Copyright (c) 2026 risim authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "risim/types.hpp"

namespace risim {

/// Planar rectangular (or parallelogram) facet with a real reflection
/// coefficient. Corners must be coplanar and listed in perimeter order.
struct Surface {
  std::array<Vec3, 4> corners;
  double gamma = 0.7;  // amplitude reflection coefficient, [0, 1]
  std::string name;

  Vec3 origin() const { return corners[0]; }
  Vec3 edge_u() const { return corners[1] - corners[0]; }
  Vec3 edge_v() const { return corners[3] - corners[0]; }
  /// Unit normal; throws for a degenerate (zero-area) facet.
  Vec3 unit_normal() const;
  /// True if p lies on the facet (within tol meters of the plane and inside
  /// the edge-spanned parallelogram).
  bool contains(const Vec3& p, double tol = 1e-9) const;
  void validate() const;
};

/// Axis-aligned shoebox room. Walls become six inward-facing facets with
/// individually assignable reflection coefficients.
struct Room {
  Vec3 min_corner{0, 0, 0};
  Vec3 max_corner{1, 1, 1};
  // x_min, x_max, y_min, y_max, z_min (floor), z_max (ceiling)
  std::array<double, 6> wall_gamma{0.7, 0.7, 0.7, 0.7, 0.7, 0.7};

  std::vector<Surface> wall_surfaces() const;
  bool inside(const Vec3& p, double margin = 0.0) const;
  void validate() const;
};

struct Scene {
  Room room;
  std::vector<Surface> scatterers;
  std::map<std::string, Pose> nodes;
  double carrier_frequency_hz = 3.5e9;

  double wavelength() const { return kSpeedOfLight / carrier_frequency_hz; }
  /// Room walls followed by scatterer facets; index order is stable.
  std::vector<Surface> all_surfaces() const;
  void validate() const;
};

/// One propagation path. Angles are global-frame; AoD points from the
/// transmitter along the first segment, AoA from the receiver back toward
/// the last reflection point (or the transmitter for LoS).
struct PathRecord {
  int order = 0;                       // number of reflections
  double gain = 0.0;                   // linear amplitude
  double delay = 0.0;                  // seconds
  double length = 0.0;                 // meters
  double aod_azimuth = 0.0;
  double aod_elevation = 0.0;
  double aoa_azimuth = 0.0;
  double aoa_elevation = 0.0;
  std::vector<Vec3> reflection_points;
  std::vector<int> surface_indices;    // into Scene::all_surfaces()
  std::vector<std::string> surface_names;
  Vec3 tx_position{0, 0, 0};
  Vec3 rx_position{0, 0, 0};
};

/// Reflect a point across the facet's supporting plane.
Vec3 mirror_point(const Vec3& point, const Surface& plane);

/// Image-method tracer: the unobstructed LoS path plus every valid specular
/// path of order <= max_order (0..2). Gain is lambda/(4*pi*d_total) times the
/// product of surface reflection coefficients; paths sort by delay ascending.
std::vector<PathRecord> trace_paths(const Scene& scene, const std::string& tx,
                                    const std::string& rx, int max_order);

/// True iff every reflection point lies on its designated facet and no
/// segment of the chain is blocked by any other facet.
bool validate_path(const PathRecord& candidate, const Scene& scene);

/// True if the open segment a->b is blocked by any facet. Intersections
/// within eps of either endpoint are ignored so that reflection points do
/// not occlude their own segments.
bool segment_occluded(const Scene& scene, const Vec3& a, const Vec3& b,
                      double eps = 1e-9);

}  // namespace risim

/*
 * Copyright (c) 2026 risim authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>

namespace risim {

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;
using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kPi = 3.14159265358979323846;

/// Position plus yaw about the vertical (z) axis. All node orientations in
/// this codebase are yaw-only; arrays live in one shared azimuth plane.
struct Pose {
  Vec3 position{0.0, 0.0, 0.0};
  double yaw = 0.0;  // radians, counter-clockwise about +z
};

/// Azimuth/elevation pair, radians. Azimuth is measured counter-clockwise
/// from +x in (-pi, pi]; elevation from the azimuth plane, up positive.
struct AnglePair {
  double azimuth = 0.0;
  double elevation = 0.0;
};

/// Wrap an angle to (-pi, pi].
inline double wrap_angle(double a) {
  double w = std::remainder(a, 2.0 * kPi);
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

inline double deg_to_rad(double d) { return d * kPi / 180.0; }
inline double rad_to_deg(double r) { return r * 180.0 / kPi; }

/// Azimuth of a direction vector, (-pi, pi].
inline double azimuth_of(const Vec3& d) {
  return wrap_angle(std::atan2(d.y(), d.x()));
}

/// Elevation of a direction vector, [-pi/2, pi/2].
inline double elevation_of(const Vec3& d) {
  return std::atan2(d.z(), std::hypot(d.x(), d.y()));
}

/// Unit direction for an azimuth/elevation pair.
inline Vec3 unit_from_angles(double azimuth, double elevation) {
  const double ce = std::cos(elevation);
  return {ce * std::cos(azimuth), ce * std::sin(azimuth), std::sin(elevation)};
}

inline AnglePair angles_of(const Vec3& d) {
  return {azimuth_of(d), elevation_of(d)};
}

/// Convert a global-frame angle pair into the local frame of a yaw-only pose.
/// Yaw rotation about z leaves elevation unchanged.
inline AnglePair to_local_frame(const AnglePair& global, const Pose& pose) {
  return {wrap_angle(global.azimuth - pose.yaw), global.elevation};
}

inline AnglePair to_global_frame(const AnglePair& local, const Pose& pose) {
  return {wrap_angle(local.azimuth + pose.yaw), local.elevation};
}

}  // namespace risim

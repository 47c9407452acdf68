/*
 * Copyright (c) 2026 risim authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */
#include "risim/arrays.hpp"

#include <stdexcept>

#include "risim/errors.hpp"

namespace risim {

void ArraySpec::validate() const {
  if (count_h < 1 || count_v < 1)
    throw ValidationError("array element counts must be positive");
  if (kind == ArrayKind::ULA && count_v != 1)
    throw ValidationError("a ULA must have count_v == 1");
  if (!(spacing > 0.0))
    throw ValidationError("array spacing must be positive");
}

ArraySpec make_ula(int count, double spacing, const Pose& pose) {
  ArraySpec spec{ArrayKind::ULA, count, 1, spacing, pose};
  spec.validate();
  return spec;
}

ArraySpec make_ura(int count_h, int count_v, double spacing, const Pose& pose) {
  ArraySpec spec{ArrayKind::URA, count_h, count_v, spacing, pose};
  spec.validate();
  return spec;
}

WaveVector wave_vector(double azimuth, double elevation, double wavelength) {
  if (!(wavelength > 0.0))
    throw std::invalid_argument("wave_vector: wavelength must be positive");
  const double k = 2.0 * kPi / wavelength;
  return WaveVector{k * unit_from_angles(azimuth, elevation)};
}

namespace {

// Unrotated lattice in meters: ULA along local x, URA in local x-z,
// horizontal index fastest.
std::vector<Vec3> local_lattice(const ArraySpec& spec, double wavelength) {
  spec.validate();
  const double d = spec.spacing * wavelength;
  std::vector<Vec3> out;
  out.reserve(static_cast<size_t>(spec.size()));
  for (int iv = 0; iv < spec.count_v; ++iv)
    for (int ih = 0; ih < spec.count_h; ++ih)
      out.emplace_back(ih * d, 0.0, iv * d);
  return out;
}

}  // namespace

std::vector<Vec3> element_positions(const ArraySpec& spec, double wavelength) {
  if (!(wavelength > 0.0))
    throw std::invalid_argument("element_positions: wavelength must be positive");
  std::vector<Vec3> pts = local_lattice(spec, wavelength);
  const double c = std::cos(spec.pose.yaw);
  const double s = std::sin(spec.pose.yaw);
  for (Vec3& p : pts) {
    const double x = c * p.x() - s * p.y();
    const double y = s * p.x() + c * p.y();
    p = Vec3(x, y, p.z()) + spec.pose.position;
  }
  return pts;
}

CVec array_response(const ArraySpec& spec, double azimuth, double elevation,
                    double wavelength) {
  const std::vector<Vec3> pts = local_lattice(spec, wavelength);
  const Vec3 k = wave_vector(azimuth, elevation, wavelength).components;
  CVec a(static_cast<Eigen::Index>(pts.size()));
  for (size_t i = 0; i < pts.size(); ++i) {
    const double phase = -k.dot(pts[i]);
    a(static_cast<Eigen::Index>(i)) = cplx(std::cos(phase), std::sin(phase));
  }
  return a;
}

}  // namespace risim

/*
 * Copyright (c) 2026 risim authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <vector>

#include "risim/types.hpp"

namespace risim {

enum class ArrayKind { ULA, URA };

/// Antenna aperture description. Element spacing is given in carrier
/// wavelengths, so steering vectors depend only on the spacing ratio.
///
/// Local lattice convention: a ULA lies along local +x, a URA in the local
/// x-z plane; element ordering is row-major with the horizontal index
/// fastest. The front halfspace of an aperture is local y > 0, i.e. local
/// azimuths in (0, pi). Yaw rotates the lattice about +z into the global
/// frame.
struct ArraySpec {
  ArrayKind kind = ArrayKind::ULA;
  int count_h = 1;         // N_H (or N for a ULA)
  int count_v = 1;         // N_V, must be 1 for a ULA
  double spacing = 0.5;    // wavelengths
  Pose pose;

  int size() const { return count_h * count_v; }
  void validate() const;
};

ArraySpec make_ula(int count, double spacing, const Pose& pose);
ArraySpec make_ura(int count_h, int count_v, double spacing, const Pose& pose);

/// Plane-wave propagation vector; |components| == 2*pi/wavelength.
struct WaveVector {
  Vec3 components;
};

/// k(azimuth, elevation) = (2*pi/lambda) * [cos(el)cos(az), cos(el)sin(az), sin(el)].
WaveVector wave_vector(double azimuth, double elevation, double wavelength);

/// Element positions in the global frame (meters): local lattice scaled by
/// spacing*wavelength, rotated by pose yaw, translated by pose origin.
std::vector<Vec3> element_positions(const ArraySpec& spec, double wavelength);

/// Far-field response a(az, el), entry i = exp(-j k^T u_i) over the LOCAL
/// element coordinates. Caller contract: angles must already be expressed in
/// the array's local frame (subtract pose yaw from a global azimuth first).
/// Because positions scale with spacing*wavelength and k with 1/wavelength,
/// the result is independent of the wavelength argument's absolute value.
CVec array_response(const ArraySpec& spec, double azimuth, double elevation,
                    double wavelength);

}  // namespace risim

/*
 * Copyright (c) 2026 risim authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <string>
#include <vector>

#include "risim/arrays.hpp"
#include "risim/types.hpp"

namespace risim {

enum class BitDepth { continuous, one_bit };

/// Per-element reflection phases. Weights are unit modulus by construction;
/// a one-bit config restricts every phase to {-pi/2, +pi/2}.
struct RISConfig {
  Eigen::VectorXd phases;
  BitDepth bit_depth = BitDepth::continuous;
  double target_azimuth = 0.0;    // beam direction served by this entry (RIS local)
  double target_elevation = 0.0;

  int size() const { return static_cast<int>(phases.size()); }
  CVec weights() const;
  void validate() const;
};

/// Angle-indexed collection of configs sharing one incidence pair.
struct Codebook {
  std::vector<RISConfig> entries;
  double angle_step = 0.0;  // radians
  AnglePair incidence;      // fixed AP->RIS arrival pair, RIS local frame
  BitDepth bit_depth = BitDepth::continuous;

  int size() const { return static_cast<int>(entries.size()); }
};

/// |w^T (a(incidence) .* conj(a(reflect)))|^2, angles in the RIS local frame.
double power_pattern(const RISConfig& config, double reflect_azimuth,
                     double reflect_elevation, const AnglePair& incidence,
                     const ArraySpec& ris_spec);

/// Co-phasing solution: w^T = (a(incidence) .* conj(a(target)))^H. Attains
/// the global pattern maximum N^2 at its own target.
RISConfig mrt_config(const AnglePair& incidence, const AnglePair& target,
                     const ArraySpec& ris_spec);

/// Map each phase to the nearer of {-pi/2, +pi/2} on the unit circle;
/// exact ties resolve to +pi/2.
RISConfig quantize_config(const RISConfig& config);

/// Flip the sign of every weight (phase + pi); a one-bit config stays
/// one-bit with every element toggled between -pi/2 and +pi/2.
RISConfig negate_config(const RISConfig& config);

/// One entry per grid azimuth in [azimuth_min, azimuth_max] at the given
/// step (elevation fixed at 0), each an MRT solution, quantized when
/// bit_depth is one_bit. The range must lie in the RIS front halfspace.
Codebook build_codebook(const AnglePair& incidence, double azimuth_min,
                        double azimuth_max, double angle_step,
                        const ArraySpec& ris_spec, BitDepth bit_depth);

/// Structured-text export/import. One-bit phases serialize as +/-1 signs
/// (+1 for +pi/2), continuous ones as raw radians.
std::string codebook_to_json(const Codebook& cb);
Codebook codebook_from_json(const std::string& text);

}  // namespace risim

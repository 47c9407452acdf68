/*
 * Copyright (c) 2026 risim authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <algorithm>
#include <random>

#include "risim/geometry.hpp"
#include "risim/protocol.hpp"

// Shared fixtures and independent oracles for the unit and acceptance
// suites. Everything here is test-only code and must stay independent of
// the implementation paths it checks.
namespace risim::testsupport {

inline Scene empty_room(double fc = 3.0e9) {
  Scene scene;
  scene.room.min_corner = {0, 0, 0};
  scene.room.max_corner = {6, 8, 3};
  scene.room.wall_gamma.fill(0.0);
  scene.carrier_frequency_hz = fc;
  return scene;
}

/// Brute-force Fermat search: minimize |tx - p| + |p - rx| over a dense
/// grid of the facet, shrinking the window around the best cell. Entirely
/// independent of the image-method construction.
inline Vec3 fermat_point(const Surface& s, const Vec3& tx, const Vec3& rx) {
  const Vec3 o = s.origin();
  const Vec3 eu = s.edge_u();
  const Vec3 ev = s.edge_v();
  auto len = [&](double a, double b) {
    const Vec3 p = o + a * eu + b * ev;
    return (tx - p).norm() + (p - rx).norm();
  };
  double best_a = 0.5, best_b = 0.5, best = len(0.5, 0.5);
  double lo_a = 0.0, hi_a = 1.0, lo_b = 0.0, hi_b = 1.0;
  for (int pass = 0; pass < 14; ++pass) {
    const int kGrid = 24;
    for (int i = 0; i <= kGrid; ++i)
      for (int j = 0; j <= kGrid; ++j) {
        const double a = lo_a + (hi_a - lo_a) * i / kGrid;
        const double b = lo_b + (hi_b - lo_b) * j / kGrid;
        const double l = len(a, b);
        if (l < best) {
          best = l;
          best_a = a;
          best_b = b;
        }
      }
    const double span_a = (hi_a - lo_a) / kGrid * 2.0;
    const double span_b = (hi_b - lo_b) / kGrid * 2.0;
    lo_a = std::max(0.0, best_a - span_a);
    hi_a = std::min(1.0, best_a + span_a);
    lo_b = std::max(0.0, best_b - span_b);
    hi_b = std::min(1.0, best_b + span_b);
  }
  return o + best_a * eu + best_b * ev;
}

/// Small arrays and a coarse codebook keep per-scene protocol runs cheap.
inline ProtocolParams small_params(uint64_t seed = 1) {
  ProtocolParams p;
  p.ap_antennas = 2;
  p.ue_antennas = 4;
  p.ris_count_h = 4;
  p.ris_count_v = 4;
  p.n_pilots = 64;
  p.snr_db = std::numeric_limits<double>::infinity();
  p.max_order = 1;
  p.codebook_step = deg_to_rad(10.0);
  p.codebook_azimuth_min = deg_to_rad(20.0);
  p.codebook_azimuth_max = deg_to_rad(160.0);
  p.seed = seed;
  return p;
}

/// Random furnished room: reflective walls, one to three vertical panels,
/// unobstructed node placements with the RIS near the y=0 wall.
inline Scene random_scene(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  Scene scene;
  scene.room.min_corner = {0, 0, 0};
  scene.room.max_corner = {6, 8, 3};
  scene.room.wall_gamma.fill(0.3 + 0.4 * u01(rng));
  scene.carrier_frequency_hz = 3.5e9;
  const int n_scat = 1 + static_cast<int>(u01(rng) * 2.0);
  for (int s = 0; s < n_scat; ++s) {
    const double cx = 1.0 + 4.0 * u01(rng);
    const double cy = 2.6 + 1.6 * u01(rng);
    const double alpha = kPi * u01(rng);
    const double w = 0.3 + 0.5 * u01(rng);
    const double h = 0.8 + 1.5 * u01(rng);
    const Vec3 e(std::cos(alpha) * w, std::sin(alpha) * w, 0.0);
    const Vec3 c(cx, cy, 0.2);
    scene.scatterers.push_back(
        {{c - e, c + e, c + e + Vec3(0, 0, h), c - e + Vec3(0, 0, h)},
         0.5 + 0.4 * u01(rng),
         "panel"});
  }
  scene.nodes["ap"] = {
      {3.5 + 2.0 * u01(rng), 0.5 + 1.2 * u01(rng), 1.2 + 1.2 * u01(rng)}, kPi};
  scene.nodes["ris"] = {{0.6 + 1.2 * u01(rng), 0.05 + 0.2 * u01(rng), 1.5}, 0.0};
  scene.nodes["ue"] = {{1.0 + 4.0 * u01(rng), 4.8 + 2.5 * u01(rng), 1.5}, kPi};
  return scene;
}

inline RISConfig random_one_bit(int n, std::mt19937_64& rng) {
  RISConfig cfg;
  cfg.bit_depth = BitDepth::one_bit;
  cfg.phases.resize(n);
  for (int i = 0; i < n; ++i)
    cfg.phases(i) = (rng() & 1) ? kPi / 2.0 : -kPi / 2.0;
  return cfg;
}

/// Direct branch placed on the simulator's composite time axis using only
/// public channel operations.
inline Frame aligned_direct_frame(const SceneSimulator& sim) {
  Frame zero_ris = sim.ris_component(make_onoff_config(sim.ris_spec().size()));
  zero_ris.samples.setZero();
  return combine_received(zero_ris, *sim.direct_component(), sim.delay_ris(),
                          sim.delay_direct(), sim.h1().sample_rate);
}

}  // namespace risim::testsupport

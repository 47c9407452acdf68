/*
 * Copyright (c) 2026 risim authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "risim/channel.hpp"
#include "risim/estimation.hpp"
#include "risim/geometry.hpp"
#include "risim/ris.hpp"

namespace risim {

/// One received block plus the absolute time of its first sample on the
/// shared system clock (the receiver timestamps its own window).
struct Acquisition {
  Frame frame;
  double start_time = 0.0;  // seconds
};

/// Channel evaluation callback: transmit the pilot block under the given
/// RIS configuration and return the UE's composite observation.
using SimulateFn = std::function<Acquisition(const RISConfig&)>;

struct SweepResult {
  std::vector<double> powers;  // mean received power per codebook entry
  int best_index = -1;
  RISConfig best_config;
};

struct PositionEstimate {
  double azimuth_est = 0.0;     // departure azimuth from the RIS, RIS local
  double ue_aoa_azimuth = 0.0;  // arrival azimuth at the UE, UE local (NaN if no refinement)
  double range_est = 0.0;       // meters
  double toa_est = 0.0;         // seconds, range_est / c
  Vec3 position{0, 0, 0};
};

struct ScattererEstimate {
  Vec3 position{0, 0, 0};
  double beam_azimuth = 0.0;  // RIS-local codebook target that activated the path
  double ue_aoa = 0.0;        // UE-local arrival azimuth
  int codebook_index = -1;
};

struct MappingResult {
  std::vector<ScattererEstimate> scatterer_estimates;
  int rejected_count = 0;
};

/// Single-tap LoS channel reconstructions used for cancellation.
struct LosReconstruction {
  ChannelTaps h2_los;  // RIS -> UE, from the position estimate
  ChannelTaps h1_los;  // AP -> RIS, from exact known geometry
};

/// All elements at +pi/2 (weight j): the base configuration of the
/// direct-path extraction protocol.
RISConfig make_onoff_config(int n);

/// Transmit every codebook entry, measure mean received power of the
/// composite observation and return the argmax entry (first index on ties).
SweepResult beam_sweep(const SimulateFn& simulate, const Codebook& codebook);

struct OnOffResult {
  Frame direct;  // (r1 + r2) / 2
  Frame ris;     // (r1 - r2) / 2, the RIS-path component under base_config
  double start_time = 0.0;
};

/// Acquire under base_config and its negation; the half-sum isolates the
/// direct channel, the half-difference the RIS path. Intended base_config
/// is make_onoff_config(N), but the identity holds for any configuration.
OnOffResult onoff_direct_estimate(const SimulateFn& simulate,
                                  const RISConfig& base_config);

/// Place the UE on the ray leaving the RIS at the estimated departure
/// azimuth (elevation 0) at range c * toa_est. music_azimuth is the
/// MUSIC-refined departure azimuth mapped into the RIS frame; pass NaN to
/// fall back to the codebook beam azimuth.
PositionEstimate locate_ue(double beam_azimuth, double music_azimuth,
                           double toa_est, const Pose& ris_pose);

/// Build the rank-one LoS terms: the RIS->UE side from the position
/// estimate, the AP->RIS side from the exact poses carried by the specs.
LosReconstruction reconstruct_los(const PositionEstimate& estimate,
                                  const ArraySpec& ap_spec,
                                  const ArraySpec& ris_spec,
                                  const ArraySpec& ue_spec, double fc);

/// Subtract the reconstructed LoS observation for this configuration,
/// shifted by shift_samples, from r_tot. The caller derives the shift from
/// the estimated ToA and the frame's time origin.
Frame cancel_los(const Frame& r_tot, const RISConfig& config,
                 const LosReconstruction& recon, const Frame& pilot,
                 int shift_samples);

/// Crossing of two azimuth-plane rays; throws GeometryError when they are
/// near-parallel (|sin(az1 - az2)| <= 1e-9).
Vec2 intersect_rays(const Vec2& origin1, double azimuth1, const Vec2& origin2,
                    double azimuth2);

struct MappingContext {
  LosReconstruction recon;
  Frame pilot;
  double known_ap_ris_delay = 0.0;  // seconds, exact geometry
  double fs = 0.0;
  Pose ris_pose;
  Pose ue_pose;  // known orientation; position is taken from the estimate
  Room room;
  ArraySpec ue_spec;
  double music_grid_step = 0.0;   // radians
  double reject_threshold = 0.0;  // radians, LoS/NLoS decision
  double merge_radius = 0.0;      // meters, duplicate clustering
  double power_gate = 0.25;       // fraction of the strongest detection
  double noise_floor = 0.0;       // per-sample noise variance in the residual
};

/// Sweep the codebook again: per entry run the +/- configuration split,
/// cancel the reconstructed LoS term, run single-source MUSIC on the
/// residual and triangulate whenever the picked angle departs from the LoS
/// angle by more than the rejection threshold. Estimates behind the RIS, in
/// the UE back halfplane or outside the room are rejected; surviving points
/// closer than the merge radius collapse to one representative (the member
/// nearest the cluster centroid, so it stays on its defining rays).
MappingResult map_scatterers(const SimulateFn& simulate,
                             const Codebook& codebook,
                             const PositionEstimate& ue_estimate,
                             double los_azimuth, const MappingContext& ctx);

enum class EstimationMode { sweep_only, sweep_plus_music };

struct ProtocolParams {
  int ap_antennas = 4;
  int ue_antennas = 8;
  int ris_count_h = 32;
  int ris_count_v = 32;
  double ap_spacing = 0.5;
  double ue_spacing = 0.5;
  double ris_spacing = 0.5;

  double sample_rate = 122.88e6;
  int n_pilots = 256;
  double snr_db = 20.0;
  int max_order = 1;

  double codebook_step = deg_to_rad(2.0);
  double codebook_azimuth_min = deg_to_rad(10.0);
  double codebook_azimuth_max = deg_to_rad(170.0);
  BitDepth bit_depth = BitDepth::one_bit;

  EstimationMode estimation = EstimationMode::sweep_plus_music;
  double music_grid_step = deg_to_rad(0.1);
  int n_sources = 1;

  double toa_sigma = 0.0;  // seconds; 0 matches the perfect-ToA assumption

  bool do_mapping = false;
  double reject_threshold = deg_to_rad(4.0);
  double merge_radius = 0.3;
  double mapping_power_gate = 0.25;

  uint64_t seed = 1;
};

/// Per-trial outcome: positioning estimate, sweep diagnostics, optional
/// mapping output and ground-truth comparison errors.
struct RunReport {
  uint64_t seed = 0;
  Vec3 ue_true{0, 0, 0};

  std::vector<double> sweep_powers;
  int best_index = -1;
  double best_azimuth = 0.0;   // RIS local, radians
  double music_ue_aoa = 0.0;   // UE local, radians; NaN in sweep-only modes

  PositionEstimate estimate;
  double aod_true = 0.0;       // RIS local, radians
  double angle_error = 0.0;    // radians
  double range_true = 0.0;     // meters
  double position_error = 0.0; // meters

  MappingResult mapping;
  std::vector<Vec3> scatterers_true;
  std::vector<double> scatterer_errors;  // per estimate, meters to nearest truth

  bool ok = true;
  std::string error;
};

/// Deterministic per-trial simulator: traces the scene once, synthesizes
/// the three channels, and serves composite observations per RIS
/// configuration with seeded noise. Paths that arrive at or depart from
/// the RIS backside are dropped (a passive surface neither receives nor
/// radiates behind its plane).
class SceneSimulator {
 public:
  SceneSimulator(const Scene& scene, const ProtocolParams& params);

  /// Noisy composite observation; consecutive calls draw fresh noise.
  Acquisition acquire(const RISConfig& config);
  /// Deterministic noiseless composite (memoized; negated configurations
  /// reuse the cached result by linearity).
  Frame noiseless_composite(const RISConfig& config) const;
  /// RIS-branch component only, starting at delay_ris().
  Frame ris_component(const RISConfig& config) const;

  double delay_ris() const { return delay_ris_; }
  double delay_direct() const { return delay_d_; }
  double start_time() const { return t0_; }
  double noise_variance() const { return noise_variance_; }
  /// Fix the noise floor: peak mean composite power over the codebook
  /// divided by the linear SNR. Infinite SNR disables noise.
  void calibrate_noise(const Codebook& codebook, double snr_db);

  const Frame& pilot() const { return pilot_; }
  const ChannelTaps& h1() const { return h1_; }
  const ChannelTaps& h2() const { return h2_; }
  const std::optional<ChannelTaps>& hd() const { return hd_; }
  const std::optional<Frame>& direct_component() const { return r_d_; }
  const std::vector<PathRecord>& ris_ue_paths() const { return paths_h2_; }
  const ArraySpec& ap_spec() const { return ap_; }
  const ArraySpec& ris_spec() const { return ris_; }
  const ArraySpec& ue_spec() const { return ue_; }
  /// AP->RIS LoS arrival at the RIS, local frame.
  AnglePair incidence() const { return incidence_; }

 private:
  Frame fast_ris_component(const RISConfig& config) const;
  Frame ris_cached(const RISConfig& config) const;

  ArraySpec ap_, ris_, ue_;
  AnglePair incidence_;
  double fs_ = 0.0;
  double fc_ = 0.0;
  std::vector<PathRecord> paths_h2_;
  ChannelTaps h1_, h2_;
  std::optional<ChannelTaps> hd_;
  Frame pilot_;
  Frame h1_pilot_;  // h1 * pilot, reused across configurations
  std::optional<Frame> r_d_;
  CMat direct_aligned_;  // direct branch on the composite time axis
  int s_ris_ = 0;        // composite-axis offset of the RIS branch
  int composite_len_ = 0;
  double delay_ris_ = 0.0;
  double delay_d_ = 0.0;
  double t0_ = 0.0;
  double noise_variance_ = 0.0;
  uint64_t noise_seed_base_ = 0;
  uint64_t noise_counter_ = 0;

  struct PathTerm {
    cplx gain;
    int tap = 0;
    CVec a_ue;
    CVec a_ris_conj;
  };
  std::vector<PathTerm> terms_;
  mutable std::map<std::vector<double>, Frame> memo_;
};

/// Execute the full positioning (and optionally mapping) protocol on one
/// scene instance.
RunReport run_protocol(const Scene& scene, const ProtocolParams& params);

}  // namespace risim

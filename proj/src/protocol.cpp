/*
 * Copyright (c) 2026 risim authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */
#include "risim/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "risim/errors.hpp"
#include "risim/rng.hpp"

namespace risim {

namespace {

constexpr uint64_t kPilotStream = 0x70696c6f74ULL;
constexpr uint64_t kNoiseStream = 0x6e6f697365ULL;
constexpr uint64_t kToaStream = 0x746f61ULL;

bool front_of(const Pose& pose, double global_azimuth) {
  return std::sin(wrap_angle(global_azimuth - pose.yaw)) > 1e-12;
}

// Passive-surface halfspace filter: keep only paths whose endpoint at the
// RIS lies in the front halfplane (local azimuth in (0, pi)).
std::vector<PathRecord> keep_ris_front(std::vector<PathRecord> paths,
                                       const Pose& ris_pose, bool at_arrival) {
  std::vector<PathRecord> out;
  out.reserve(paths.size());
  for (PathRecord& p : paths) {
    const double az = at_arrival ? p.aoa_azimuth : p.aod_azimuth;
    if (front_of(ris_pose, az)) out.push_back(std::move(p));
  }
  return out;
}

Frame qpsk_pilot(const ArraySpec& ap_spec, const AnglePair& aod_local,
                 int n_samples, double fs, double wavelength, uint64_t seed) {
  Rng rng(seed);
  CVec stream(n_samples);
  constexpr double kInvSqrt2 = 0.70710678118654752440;
  for (int n = 0; n < n_samples; ++n) {
    const uint64_t bits = rng.next_u64();
    const double re = (bits & 1) ? kInvSqrt2 : -kInvSqrt2;
    const double im = (bits & 2) ? kInvSqrt2 : -kInvSqrt2;
    stream(n) = cplx(re, im);
  }
  // Conjugate steering toward the RIS: a directive transmitter pointed at
  // the surface.
  CVec w = array_response(ap_spec, aod_local.azimuth, aod_local.elevation,
                          wavelength)
               .conjugate() /
           std::sqrt(static_cast<double>(ap_spec.size()));
  Frame x;
  x.sample_rate = fs;
  x.samples = w * stream.transpose();
  return x;
}

}  // namespace

RISConfig make_onoff_config(int n) {
  if (n < 1) throw std::invalid_argument("make_onoff_config: need n >= 1");
  RISConfig cfg;
  cfg.bit_depth = BitDepth::one_bit;
  cfg.phases = Eigen::VectorXd::Constant(n, kPi / 2.0);
  return cfg;
}

SweepResult beam_sweep(const SimulateFn& simulate, const Codebook& codebook) {
  if (codebook.entries.empty())
    throw std::invalid_argument("beam_sweep: empty codebook");
  SweepResult result;
  result.powers.reserve(codebook.entries.size());
  for (const RISConfig& entry : codebook.entries) {
    const Acquisition acq = simulate(entry);
    result.powers.push_back(mean_power(acq.frame));
  }
  result.best_index = 0;
  for (size_t i = 1; i < result.powers.size(); ++i)
    if (result.powers[i] > result.powers[static_cast<size_t>(result.best_index)])
      result.best_index = static_cast<int>(i);
  result.best_config = codebook.entries[static_cast<size_t>(result.best_index)];
  return result;
}

OnOffResult onoff_direct_estimate(const SimulateFn& simulate,
                                  const RISConfig& base_config) {
  const Acquisition r1 = simulate(base_config);
  const Acquisition r2 = simulate(negate_config(base_config));
  if (r1.frame.samples.rows() != r2.frame.samples.rows() ||
      r1.frame.samples.cols() != r2.frame.samples.cols())
    throw ShapeError("onoff_direct_estimate: acquisition shapes differ");
  OnOffResult out;
  out.start_time = r1.start_time;
  out.direct.sample_rate = r1.frame.sample_rate;
  out.ris.sample_rate = r1.frame.sample_rate;
  out.direct.samples = 0.5 * (r1.frame.samples + r2.frame.samples);
  out.ris.samples = 0.5 * (r1.frame.samples - r2.frame.samples);
  return out;
}

PositionEstimate locate_ue(double beam_azimuth, double music_azimuth,
                           double toa_est, const Pose& ris_pose) {
  if (!(toa_est > 0.0))
    throw std::invalid_argument("locate_ue: toa_est must be positive");
  PositionEstimate est;
  est.azimuth_est =
      std::isnan(music_azimuth) ? beam_azimuth : music_azimuth;
  est.ue_aoa_azimuth = std::numeric_limits<double>::quiet_NaN();
  est.toa_est = toa_est;
  est.range_est = kSpeedOfLight * toa_est;
  const double az_global = wrap_angle(est.azimuth_est + ris_pose.yaw);
  est.position =
      ris_pose.position + est.range_est * unit_from_angles(az_global, 0.0);
  return est;
}

LosReconstruction reconstruct_los(const PositionEstimate& estimate,
                                  const ArraySpec& ap_spec,
                                  const ArraySpec& ris_spec,
                                  const ArraySpec& ue_spec, double fc) {
  if (!(estimate.range_est > 0.0))
    throw std::invalid_argument("reconstruct_los: range must be positive");
  const double lambda = kSpeedOfLight / fc;

  // RIS -> UE side, built entirely from the estimate.
  const double aod_global = wrap_angle(estimate.azimuth_est + ris_spec.pose.yaw);
  const double aoa_ue_local = wrap_angle(aod_global + kPi - ue_spec.pose.yaw);
  double phi2 = std::fmod(-2.0 * kPi * fc * estimate.toa_est, 2.0 * kPi);
  if (phi2 < 0.0) phi2 += 2.0 * kPi;
  const cplx g2 = lambda / (4.0 * kPi * estimate.range_est) *
                  cplx(std::cos(phi2), std::sin(phi2));
  const CVec a_ue = array_response(ue_spec, aoa_ue_local, 0.0, lambda);
  const CVec a_ris_dep =
      array_response(ris_spec, estimate.azimuth_est, 0.0, lambda);

  LosReconstruction recon;
  recon.h2_los.sample_rate = 0.0;
  recon.h2_los.carrier_frequency = fc;
  recon.h2_los.first_tap_delay = estimate.toa_est;
  recon.h2_los.taps = {g2 * (a_ue * a_ris_dep.adjoint())};

  // AP -> RIS side from exact known geometry.
  const Vec3 d = ap_spec.pose.position - ris_spec.pose.position;
  const double r1 = d.norm();
  if (!(r1 > 0.0))
    throw std::invalid_argument("reconstruct_los: AP and RIS coincide");
  const double tau1 = r1 / kSpeedOfLight;
  const AnglePair arrival_ris = to_local_frame(angles_of(d), ris_spec.pose);
  const AnglePair departure_ap = to_local_frame(angles_of(-d), ap_spec.pose);
  const double phase1 = -2.0 * kPi * fc * tau1;
  const cplx g1 =
      lambda / (4.0 * kPi * r1) * cplx(std::cos(phase1), std::sin(phase1));
  const CVec a_ris_arr = array_response(ris_spec, arrival_ris.azimuth,
                                        arrival_ris.elevation, lambda);
  const CVec a_ap = array_response(ap_spec, departure_ap.azimuth,
                                   departure_ap.elevation, lambda);
  recon.h1_los.sample_rate = 0.0;
  recon.h1_los.carrier_frequency = fc;
  recon.h1_los.first_tap_delay = tau1;
  recon.h1_los.taps = {g1 * (a_ris_arr * a_ap.adjoint())};
  return recon;
}

Frame cancel_los(const Frame& r_tot, const RISConfig& config,
                 const LosReconstruction& recon, const Frame& pilot,
                 int shift_samples) {
  if (recon.h1_los.n_rx() != config.size() ||
      recon.h2_los.n_tx() != config.size())
    throw ShapeError("cancel_los: RIS size mismatch");
  if (recon.h1_los.n_tx() != pilot.n_antennas())
    throw ShapeError("cancel_los: pilot antenna count mismatch");
  if (shift_samples < 0 || shift_samples >= r_tot.n_samples())
    throw AlignmentError("cancel_los: shift exceeds frame length");

  const CMat r_los = recon.h2_los.taps[0] *
                     (config.weights().asDiagonal() *
                      (recon.h1_los.taps[0] * pilot.samples));
  const int overlap =
      std::min<int>(static_cast<int>(r_los.cols()), r_tot.n_samples() - shift_samples);
  Frame out = r_tot;
  out.samples.middleCols(shift_samples, overlap) -= r_los.leftCols(overlap);
  return out;
}

Vec2 intersect_rays(const Vec2& origin1, double azimuth1, const Vec2& origin2,
                    double azimuth2) {
  if (std::abs(std::sin(azimuth1 - azimuth2)) <= 1e-9)
    throw GeometryError("intersect_rays: rays are near-parallel");
  const Vec2 d1(std::cos(azimuth1), std::sin(azimuth1));
  const Vec2 d2(std::cos(azimuth2), std::sin(azimuth2));
  // origin1 + t1 d1 = origin2 + t2 d2
  const double det = d1.x() * (-d2.y()) - (-d2.x()) * d1.y();
  const Vec2 rhs = origin2 - origin1;
  const double t1 = (rhs.x() * (-d2.y()) - (-d2.x()) * rhs.y()) / det;
  return origin1 + t1 * d1;
}

MappingResult map_scatterers(const SimulateFn& simulate,
                             const Codebook& codebook,
                             const PositionEstimate& ue_estimate,
                             double los_azimuth, const MappingContext& ctx) {
  MappingResult result;
  std::vector<ScattererEstimate> raw;
  std::vector<double> raw_power;

  for (int e = 0; e < codebook.size(); ++e) {
    const RISConfig& entry = codebook.entries[static_cast<size_t>(e)];
    const Acquisition r1 = simulate(entry);
    const Acquisition r2 = simulate(negate_config(entry));
    Frame r_ris = r1.frame;
    r_ris.samples = 0.5 * (r1.frame.samples - r2.frame.samples);

    const int shift = static_cast<int>(std::lround(
        (ctx.known_ap_ris_delay + ue_estimate.toa_est - r1.start_time) *
        ctx.fs));
    Frame residual;
    try {
      residual = cancel_los(r_ris, entry, ctx.recon, ctx.pilot, shift);
    } catch (const AlignmentError&) {
      ++result.rejected_count;
      continue;
    }

    // Nothing was activated if the residual sits at the noise floor of the
    // on/off half-difference (variance sigma^2/2); running the angle test on
    // noise alone would fabricate detections.
    if (mean_power(residual) < 2.0 * ctx.noise_floor) {
      ++result.rejected_count;
      continue;
    }

    double ue_aoa;
    try {
      const Spectrum sp =
          music_spectrum(sample_covariance(residual), ctx.ue_spec, 1,
                         ctx.music_grid_step);
      ue_aoa = pick_peak(sp);
    } catch (const std::exception&) {
      ++result.rejected_count;
      continue;
    }

    // A residual still dominated by the imperfectly cancelled LoS term
    // resolves back to the LoS angle; only a clear departure indicates an
    // activated reflection.
    if (std::abs(wrap_angle(ue_aoa - los_azimuth)) <= ctx.reject_threshold) {
      ++result.rejected_count;
      continue;
    }

    const double beam_global = wrap_angle(entry.target_azimuth + ctx.ris_pose.yaw);
    const double arrival_global = wrap_angle(ue_aoa + ctx.ue_pose.yaw);
    const Vec2 ris_xy(ctx.ris_pose.position.x(), ctx.ris_pose.position.y());
    const Vec2 ue_xy(ue_estimate.position.x(), ue_estimate.position.y());
    Vec2 point;
    try {
      point = intersect_rays(ris_xy, beam_global, ue_xy, arrival_global);
    } catch (const GeometryError&) {
      ++result.rejected_count;
      continue;
    }

    // Both crossing parameters must be positive (the point lies on the
    // physical rays), the point must be in front of the RIS plane and
    // roughly within the room.
    const Vec2 d1(std::cos(beam_global), std::sin(beam_global));
    const Vec2 d2(std::cos(arrival_global), std::sin(arrival_global));
    const double t1 = (point - ris_xy).dot(d1);
    const double t2 = (point - ue_xy).dot(d2);
    const Vec3 p3(point.x(), point.y(), ctx.ris_pose.position.z());
    const bool in_front_of_ris = front_of(ctx.ris_pose, azimuth_of(p3 - ctx.ris_pose.position));
    if (t1 < 0.05 || t2 < 0.05 || !in_front_of_ris ||
        !ctx.room.inside(p3, -0.05)) {
      ++result.rejected_count;
      continue;
    }

    raw.push_back({p3, entry.target_azimuth, ue_aoa, e});
    raw_power.push_back(mean_power(residual));
  }

  // Side lobes leak enough power onto a strong reflector to trip the angle
  // test even when the beam points elsewhere, which would smear estimates
  // along the arrival ray. A detection only counts when its entry actually
  // delivers power: gate on the residual power relative to the strongest
  // detection.
  if (!raw.empty()) {
    const double gate =
        ctx.power_gate * *std::max_element(raw_power.begin(), raw_power.end());
    std::vector<ScattererEstimate> kept;
    for (size_t i = 0; i < raw.size(); ++i) {
      if (raw_power[i] >= gate)
        kept.push_back(raw[i]);
      else
        ++result.rejected_count;
    }
    raw = std::move(kept);
  }

  // Adjacent entries illuminate the same reflector; cluster detections
  // within the merge radius.
  std::vector<std::vector<ScattererEstimate>> clusters;
  for (const ScattererEstimate& est : raw) {
    bool placed = false;
    for (auto& cluster : clusters) {
      Vec3 mean = Vec3::Zero();
      for (const auto& m : cluster) mean += m.position;
      mean /= static_cast<double>(cluster.size());
      if ((est.position - mean).norm() <= ctx.merge_radius) {
        cluster.push_back(est);
        placed = true;
        break;
      }
    }
    if (!placed) clusters.push_back({est});
  }
  for (const auto& cluster : clusters) {
    // The medoid (member nearest the centroid) represents the cluster, so
    // every reported estimate still lies exactly on its two defining rays.
    Vec3 mean = Vec3::Zero();
    for (const auto& m : cluster) mean += m.position;
    mean /= static_cast<double>(cluster.size());
    const ScattererEstimate* best = &cluster.front();
    for (const auto& m : cluster)
      if ((m.position - mean).norm() < (best->position - mean).norm()) best = &m;
    result.scatterer_estimates.push_back(*best);
  }
  return result;
}

SceneSimulator::SceneSimulator(const Scene& scene, const ProtocolParams& params) {
  scene.validate();
  if (!scene.nodes.count("ap") || !scene.nodes.count("ris") ||
      !scene.nodes.count("ue"))
    throw ValidationError("scene must define 'ap', 'ris' and 'ue' nodes");

  ap_ = make_ula(params.ap_antennas, params.ap_spacing, scene.nodes.at("ap"));
  ue_ = make_ula(params.ue_antennas, params.ue_spacing, scene.nodes.at("ue"));
  ris_ = make_ura(params.ris_count_h, params.ris_count_v, params.ris_spacing,
                  scene.nodes.at("ris"));
  fs_ = params.sample_rate;
  fc_ = scene.carrier_frequency_hz;
  noise_seed_base_ = mix_seed(params.seed, kNoiseStream);

  const Pose& ris_pose = ris_.pose;
  std::vector<PathRecord> paths_h1 = keep_ris_front(
      trace_paths(scene, "ap", "ris", params.max_order), ris_pose, true);
  paths_h2_ = keep_ris_front(trace_paths(scene, "ris", "ue", params.max_order),
                             ris_pose, false);
  std::vector<PathRecord> paths_d =
      trace_paths(scene, "ap", "ue", params.max_order);

  if (paths_h1.empty())
    throw ValidationError("no usable AP->RIS paths in this scene");
  if (paths_h2_.empty())
    throw ValidationError("no usable RIS->UE paths in this scene");

  // The codebook incidence pair and the pilot beamformer both use the
  // AP->RIS LoS, which the deployment geometry guarantees.
  const auto los_it =
      std::find_if(paths_h1.begin(), paths_h1.end(),
                   [](const PathRecord& p) { return p.order == 0; });
  if (los_it == paths_h1.end())
    throw ValidationError("AP->RIS LoS path is obstructed");
  incidence_ =
      to_local_frame({los_it->aoa_azimuth, los_it->aoa_elevation}, ris_pose);

  h1_ = synthesize_channel(paths_h1, ap_, ris_, fc_, fs_);
  h2_ = synthesize_channel(paths_h2_, ris_, ue_, fc_, fs_);
  if (!paths_d.empty())
    hd_ = synthesize_channel(paths_d, ap_, ue_, fc_, fs_);

  const AnglePair aod_ap =
      to_local_frame({los_it->aod_azimuth, los_it->aod_elevation}, ap_.pose);
  pilot_ = qpsk_pilot(ap_, aod_ap, params.n_pilots, fs_, scene.wavelength(),
                      mix_seed(params.seed, kPilotStream));
  h1_pilot_ = apply_channel(h1_, pilot_);

  // Path-factored form of h2 for fast per-configuration evaluation; kept
  // consistent with synthesize_channel (see the equivalence test).
  const double lambda = scene.wavelength();
  for (const PathRecord& p : paths_h2_) {
    PathTerm term;
    term.tap = static_cast<int>(
        std::lround((p.delay - h2_.first_tap_delay) * fs_));
    const double phase = -2.0 * kPi * p.delay * fc_;
    term.gain = p.gain * cplx(std::cos(phase), std::sin(phase));
    const AnglePair aoa = to_local_frame({p.aoa_azimuth, p.aoa_elevation}, ue_.pose);
    const AnglePair aod = to_local_frame({p.aod_azimuth, p.aod_elevation}, ris_pose);
    term.a_ue = array_response(ue_, aoa.azimuth, aoa.elevation, lambda);
    term.a_ris_conj =
        array_response(ris_, aod.azimuth, aod.elevation, lambda).conjugate();
    terms_.push_back(std::move(term));
  }

  delay_ris_ = h1_.first_tap_delay + h2_.first_tap_delay;
  const int ris_len = h1_pilot_.n_samples() + h2_.n_taps() - 1;
  if (hd_) {
    r_d_ = apply_channel(*hd_, pilot_);
    delay_d_ = hd_->first_tap_delay;
    t0_ = std::min(delay_ris_, delay_d_);
    s_ris_ = static_cast<int>(std::lround((delay_ris_ - t0_) * fs_));
    const int s_d = static_cast<int>(std::lround((delay_d_ - t0_) * fs_));
    composite_len_ = std::max(s_ris_ + ris_len, s_d + r_d_->n_samples());
    direct_aligned_ = CMat::Zero(ue_.size(), composite_len_);
    direct_aligned_.middleCols(s_d, r_d_->n_samples()) = r_d_->samples;
  } else {
    delay_d_ = 0.0;
    t0_ = delay_ris_;
    s_ris_ = 0;
    composite_len_ = ris_len;
    direct_aligned_ = CMat::Zero(ue_.size(), composite_len_);
  }
}

Frame SceneSimulator::fast_ris_component(const RISConfig& config) const {
  if (config.size() != ris_.size())
    throw ShapeError("simulator: RIS configuration size mismatch");
  const CVec w = config.weights();
  const int n_out = h1_pilot_.n_samples() + h2_.n_taps() - 1;
  Frame out;
  out.sample_rate = fs_;
  out.samples = CMat::Zero(ue_.size(), n_out);
  for (const PathTerm& term : terms_) {
    // (conj(a_ris) .* w)^T * (h1 * x): the per-sample RIS-aperture sum of
    // this path, then its rank-one spread across the UE array.
    const Eigen::RowVectorXcd s =
        (term.a_ris_conj.cwiseProduct(w)).transpose() * h1_pilot_.samples;
    out.samples.middleCols(term.tap, s.cols()).noalias() +=
        term.gain * (term.a_ue * s);
  }
  return out;
}

Frame SceneSimulator::ris_component(const RISConfig& config) const {
  return ris_cached(config);
}

Frame SceneSimulator::ris_cached(const RISConfig& config) const {
  std::vector<double> key(config.phases.data(),
                          config.phases.data() + config.phases.size());
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  // The RIS branch is linear in the weights, so a cached result for the
  // negated configuration (the other half of every on/off pair) is reused.
  const RISConfig negated = negate_config(config);
  std::vector<double> neg_key(negated.phases.data(),
                              negated.phases.data() + negated.phases.size());
  if (auto it = memo_.find(neg_key); it != memo_.end()) {
    Frame flipped = it->second;
    flipped.samples = -flipped.samples;
    return memo_.emplace(std::move(key), std::move(flipped)).first->second;
  }
  return memo_.emplace(std::move(key), fast_ris_component(config)).first->second;
}

Frame SceneSimulator::noiseless_composite(const RISConfig& config) const {
  const Frame ris = ris_cached(config);
  Frame out;
  out.sample_rate = fs_;
  out.samples = direct_aligned_;
  out.samples.middleCols(s_ris_, ris.n_samples()) += ris.samples;
  return out;
}

void SceneSimulator::calibrate_noise(const Codebook& codebook, double snr_db) {
  if (std::isinf(snr_db) && snr_db > 0.0) {
    noise_variance_ = 0.0;
    return;
  }
  double peak = 0.0;
  for (const RISConfig& entry : codebook.entries)
    peak = std::max(peak, mean_power(noiseless_composite(entry)));
  if (!(peak > 0.0))
    throw NumericalError("noise calibration: zero received power across codebook");
  noise_variance_ = peak / std::pow(10.0, snr_db / 10.0);
}

Acquisition SceneSimulator::acquire(const RISConfig& config) {
  const Frame clean = noiseless_composite(config);
  const uint64_t seed = mix_seed(noise_seed_base_, noise_counter_++);
  return Acquisition{add_noise_with_variance(clean, noise_variance_, seed), t0_};
}

namespace {

// Rethrow with a protocol-stage label, preserving the error category the
// CLI maps to exit codes.
template <typename Fn>
auto stage(const char* label, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string(label) + ": " + e.what());
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string(label) + ": " + e.what());
  }
}

// Ground-truth single-bounce reflection points the protocol is scoped to
// resolve: in-plane (elevation ~ 0), in front of both the RIS and the UE.
std::vector<Vec3> resolvable_scatterer_points(
    const std::vector<PathRecord>& ris_ue_paths, const Pose& ris_pose,
    const Pose& ue_pose) {
  std::vector<Vec3> out;
  const double elev_tol = deg_to_rad(0.5);
  for (const PathRecord& p : ris_ue_paths) {
    if (p.order != 1) continue;
    if (std::abs(p.aoa_elevation) > elev_tol) continue;
    if (!front_of(ris_pose, p.aod_azimuth)) continue;
    if (!front_of(ue_pose, p.aoa_azimuth)) continue;
    out.push_back(p.reflection_points.front());
  }
  return out;
}

}  // namespace

RunReport run_protocol(const Scene& scene, const ProtocolParams& params) {
  RunReport report;
  report.seed = params.seed;
  report.ue_true = scene.nodes.at("ue").position;

  const Pose ris_pose = scene.nodes.at("ris");
  const Pose ue_pose = scene.nodes.at("ue");

  SceneSimulator sim = stage("scene setup", [&] { return SceneSimulator(scene, params); });
  const Codebook codebook = stage("codebook design", [&] {
    return build_codebook(sim.incidence(), params.codebook_azimuth_min,
                          params.codebook_azimuth_max, params.codebook_step,
                          sim.ris_spec(), params.bit_depth);
  });
  stage("noise calibration", [&] { sim.calibrate_noise(codebook, params.snr_db); return 0; });
  SimulateFn simulate = [&sim](const RISConfig& cfg) { return sim.acquire(cfg); };

  // Beam scan.
  const SweepResult sweep =
      stage("beam sweep", [&] { return beam_sweep(simulate, codebook); });
  report.sweep_powers = sweep.powers;
  report.best_index = sweep.best_index;
  report.best_azimuth = sweep.best_config.target_azimuth;

  // Angle refinement: extract the direct term, observe under the selected
  // beam with the direct term removed, and run single-source MUSIC.
  double music_ue_aoa = std::numeric_limits<double>::quiet_NaN();
  double refined_aod = std::numeric_limits<double>::quiet_NaN();
  if (params.estimation == EstimationMode::sweep_plus_music) {
    stage("angle refinement", [&] {
      const OnOffResult onoff = onoff_direct_estimate(
          simulate, make_onoff_config(sim.ris_spec().size()));
      const Acquisition under_beam = simulate(sweep.best_config);
      Frame observation = under_beam.frame;
      observation.samples -= onoff.direct.samples;
      const Spectrum sp =
          music_spectrum(sample_covariance(observation), sim.ue_spec(),
                         params.n_sources, params.music_grid_step);
      music_ue_aoa = pick_peak(sp);
      const double arrival_global = wrap_angle(music_ue_aoa + ue_pose.yaw);
      refined_aod = wrap_angle(arrival_global + kPi - ris_pose.yaw);
      return 0;
    });
  }
  report.music_ue_aoa = music_ue_aoa;

  // Ranging oracle: true LoS delay plus configurable jitter.
  const double range_true = (ue_pose.position - ris_pose.position).norm();
  report.range_true = range_true;
  double toa_est = range_true / kSpeedOfLight;
  if (params.toa_sigma > 0.0) {
    Rng toa_rng(mix_seed(params.seed, kToaStream));
    toa_est = std::max(toa_est + params.toa_sigma * toa_rng.normal(), 1e-12);
  }

  report.estimate = stage("localization", [&] {
    return locate_ue(sweep.best_config.target_azimuth, refined_aod, toa_est,
                     ris_pose);
  });
  report.estimate.ue_aoa_azimuth = music_ue_aoa;

  report.aod_true =
      wrap_angle(azimuth_of(ue_pose.position - ris_pose.position) - ris_pose.yaw);
  report.angle_error = std::abs(wrap_angle(report.aod_true - report.estimate.azimuth_est));
  report.position_error = (report.estimate.position - report.ue_true).norm();

  report.scatterers_true =
      resolvable_scatterer_points(sim.ris_ue_paths(), ris_pose, ue_pose);

  if (params.do_mapping) {
    if (params.estimation != EstimationMode::sweep_plus_music)
      throw ValidationError("mapping requires the MUSIC estimation mode");
    MappingContext ctx;
    ctx.recon = stage("LoS reconstruction", [&] {
      return reconstruct_los(report.estimate, sim.ap_spec(), sim.ris_spec(),
                             sim.ue_spec(), scene.carrier_frequency_hz);
    });
    ctx.pilot = sim.pilot();
    ctx.known_ap_ris_delay =
        (sim.ap_spec().pose.position - ris_pose.position).norm() / kSpeedOfLight;
    ctx.fs = params.sample_rate;
    ctx.ris_pose = ris_pose;
    ctx.ue_pose = ue_pose;
    ctx.room = scene.room;
    ctx.ue_spec = sim.ue_spec();
    ctx.music_grid_step = params.music_grid_step;
    ctx.reject_threshold = params.reject_threshold;
    ctx.merge_radius = params.merge_radius;
    ctx.power_gate = params.mapping_power_gate;
    ctx.noise_floor = sim.noise_variance() / 2.0;
    report.mapping = stage("scatterer mapping", [&] {
      return map_scatterers(simulate, codebook, report.estimate, music_ue_aoa, ctx);
    });

    for (const ScattererEstimate& est : report.mapping.scatterer_estimates) {
      double best = std::numeric_limits<double>::infinity();
      for (const Vec3& truth : report.scatterers_true)
        best = std::min(best, (est.position - truth).norm());
      report.scatterer_errors.push_back(best);
    }
  }
  return report;
}

}  // namespace risim

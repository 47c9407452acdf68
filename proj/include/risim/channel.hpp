/*
 * Copyright (c) 2026 risim authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>
#include <vector>

#include "risim/arrays.hpp"
#include "risim/geometry.hpp"
#include "risim/ris.hpp"
#include "risim/types.hpp"

namespace risim {

/// Discrete-time MIMO channel filter. taps[k] is the n_rx x n_tx matrix at
/// sample offset k; tap index 0 corresponds to absolute delay
/// first_tap_delay.
struct ChannelTaps {
  std::vector<CMat> taps;
  double sample_rate = 0.0;
  double carrier_frequency = 0.0;
  double first_tap_delay = 0.0;

  int n_taps() const { return static_cast<int>(taps.size()); }
  int n_rx() const { return taps.empty() ? 0 : static_cast<int>(taps[0].rows()); }
  int n_tx() const { return taps.empty() ? 0 : static_cast<int>(taps[0].cols()); }
};

/// Baseband sample block, one row per antenna.
struct Frame {
  CMat samples;  // n_antennas x n_samples
  double sample_rate = 0.0;

  int n_antennas() const { return static_cast<int>(samples.rows()); }
  int n_samples() const { return static_cast<int>(samples.cols()); }
};

/// Mean |sample|^2 over all antennas and samples.
double mean_power(const Frame& x);

/// How a path's fractional sample delay maps onto the tap grid.
enum class DelayModel {
  nearest_tap,    // Kronecker delta at the rounded delay (default)
  windowed_sinc,  // Hann-windowed sinc interpolation around the true delay
};

/// Build channel taps from traced paths. Per path: complex gain
/// alpha * exp(-j*2*pi*tau*fc), rank-one response outer product, placed at
/// the sample-rounded relative delay (or spread by a windowed sinc when
/// requested). Path angles are global; they are converted into each
/// array's local frame using the spec poses.
ChannelTaps synthesize_channel(const std::vector<PathRecord>& paths,
                               const ArraySpec& tx_spec,
                               const ArraySpec& rx_spec, double fc, double fs,
                               DelayModel delay_model = DelayModel::nearest_tap);

/// Per-tap matrix convolution; output has n_samples + n_taps - 1 columns.
Frame apply_channel(const ChannelTaps& h, const Frame& x);

/// h2 * (diag(config) * (h1 * x)): the reflecting surface acts as a single
/// frequency-flat tap between the two filters.
Frame cascade_through_ris(const ChannelTaps& h1, const RISConfig& config,
                          const ChannelTaps& h2, const Frame& x);

/// Circularly-symmetric complex Gaussian noise at the given per-sample
/// variance; deterministic for a fixed seed.
Frame add_noise_with_variance(const Frame& x, double variance, uint64_t seed);

/// Noise scaled to (mean signal power) / 10^(snr_db/10). An infinite SNR
/// disables noise and returns the input unchanged.
Frame add_awgn(const Frame& x, double snr_db, uint64_t seed);

/// Align two frames on a shared time axis (integer shifts of
/// round(delay * fs) relative to the earlier arrival), zero-pad and sum.
Frame combine_received(const Frame& r_ris, const Frame& r_d, double delay_ris,
                       double delay_d, double fs);

}  // namespace risim

/*
 * Copyright (c) 2026 risim authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */
#include "risim/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "risim/errors.hpp"
#include "risim/rng.hpp"

namespace risim {

double mean_power(const Frame& x) {
  if (x.samples.size() == 0) return 0.0;
  return x.samples.squaredNorm() / static_cast<double>(x.samples.size());
}

namespace {

// Hann-windowed sinc interpolation weights for a fractional tap position;
// an integer position degenerates to a single unit weight.
constexpr int kSincHalfwidth = 8;

std::vector<std::pair<int, double>> delay_weights(double position,
                                                  DelayModel model) {
  if (model == DelayModel::nearest_tap)
    return {{static_cast<int>(std::lround(position)), 1.0}};
  std::vector<std::pair<int, double>> w;
  const int lo = static_cast<int>(std::ceil(position)) - kSincHalfwidth;
  const int hi = static_cast<int>(std::floor(position)) + kSincHalfwidth;
  for (int k = std::max(0, lo); k <= hi; ++k) {
    const double x = k - position;
    const double sinc = x == 0.0 ? 1.0 : std::sin(kPi * x) / (kPi * x);
    const double hann = 0.5 + 0.5 * std::cos(kPi * x / kSincHalfwidth);
    if (sinc * hann != 0.0) w.emplace_back(k, sinc * hann);
  }
  return w;
}

}  // namespace

ChannelTaps synthesize_channel(const std::vector<PathRecord>& paths,
                               const ArraySpec& tx_spec,
                               const ArraySpec& rx_spec, double fc, double fs,
                               DelayModel delay_model) {
  if (paths.empty())
    throw EmptyChannelError("synthesize_channel: no propagation paths");
  if (!(fs > 0.0)) throw std::invalid_argument("sample rate must be positive");
  if (!(fc > 0.0)) throw std::invalid_argument("carrier frequency must be positive");

  const double lambda = kSpeedOfLight / fc;
  double tau_min = paths.front().delay;
  for (const PathRecord& p : paths) tau_min = std::min(tau_min, p.delay);

  int n_taps = 1;
  for (const PathRecord& p : paths)
    for (const auto& [k, w] : delay_weights((p.delay - tau_min) * fs, delay_model))
      n_taps = std::max(n_taps, k + 1);

  ChannelTaps h;
  h.sample_rate = fs;
  h.carrier_frequency = fc;
  h.first_tap_delay = tau_min;
  h.taps.assign(static_cast<size_t>(n_taps),
                CMat::Zero(rx_spec.size(), tx_spec.size()));

  for (const PathRecord& p : paths) {
    const double phase = -2.0 * kPi * p.delay * fc;
    const cplx g = p.gain * cplx(std::cos(phase), std::sin(phase));
    const AnglePair aoa = to_local_frame({p.aoa_azimuth, p.aoa_elevation}, rx_spec.pose);
    const AnglePair aod = to_local_frame({p.aod_azimuth, p.aod_elevation}, tx_spec.pose);
    const CVec a_rx = array_response(rx_spec, aoa.azimuth, aoa.elevation, lambda);
    const CVec a_tx = array_response(tx_spec, aod.azimuth, aod.elevation, lambda);
    const CMat outer = a_rx * a_tx.adjoint();
    for (const auto& [k, w] : delay_weights((p.delay - tau_min) * fs, delay_model))
      h.taps[static_cast<size_t>(k)] += (g * w) * outer;
  }
  return h;
}

Frame apply_channel(const ChannelTaps& h, const Frame& x) {
  if (h.n_taps() == 0) throw EmptyChannelError("apply_channel: empty channel");
  if (x.n_antennas() != h.n_tx())
    throw ShapeError("apply_channel: frame antenna count does not match n_tx");
  if (x.sample_rate != h.sample_rate)
    throw ShapeError("apply_channel: sample rate mismatch");

  const int n_out = x.n_samples() + h.n_taps() - 1;
  Frame y;
  y.sample_rate = x.sample_rate;
  y.samples = CMat::Zero(h.n_rx(), n_out);
  for (int k = 0; k < h.n_taps(); ++k) {
    if (h.taps[static_cast<size_t>(k)].isZero(0.0)) continue;
    y.samples.middleCols(k, x.n_samples()) +=
        h.taps[static_cast<size_t>(k)] * x.samples;
  }
  return y;
}

Frame cascade_through_ris(const ChannelTaps& h1, const RISConfig& config,
                          const ChannelTaps& h2, const Frame& x) {
  if (h1.n_rx() != config.size() || h2.n_tx() != config.size())
    throw ShapeError("cascade_through_ris: RIS size mismatch");
  Frame v = apply_channel(h1, x);
  v.samples = config.weights().asDiagonal() * v.samples;
  return apply_channel(h2, v);
}

Frame add_noise_with_variance(const Frame& x, double variance, uint64_t seed) {
  if (!(variance >= 0.0))
    throw std::invalid_argument("noise variance must be non-negative");
  Frame y = x;
  if (variance == 0.0) return y;
  Rng rng(seed);
  const double scale = std::sqrt(variance);
  for (int j = 0; j < y.n_samples(); ++j)
    for (int i = 0; i < y.n_antennas(); ++i)
      y.samples(i, j) += scale * rng.complex_normal();
  return y;
}

Frame add_awgn(const Frame& x, double snr_db, uint64_t seed) {
  if (std::isnan(snr_db)) throw std::invalid_argument("snr_db must not be NaN");
  if (std::isinf(snr_db) && snr_db > 0.0) return x;  // noise disabled
  const double variance = mean_power(x) / std::pow(10.0, snr_db / 10.0);
  return add_noise_with_variance(x, variance, seed);
}

Frame combine_received(const Frame& r_ris, const Frame& r_d, double delay_ris,
                       double delay_d, double fs) {
  if (delay_ris < 0.0 || delay_d < 0.0)
    throw std::invalid_argument("combine_received: delays must be non-negative");
  if (!(fs > 0.0)) throw std::invalid_argument("sample rate must be positive");
  if (r_ris.n_antennas() != r_d.n_antennas())
    throw ShapeError("combine_received: antenna count mismatch");
  if (r_ris.sample_rate != r_d.sample_rate)
    throw ShapeError("combine_received: sample rate mismatch");

  const double t0 = std::min(delay_ris, delay_d);
  const int s_ris = static_cast<int>(std::lround((delay_ris - t0) * fs));
  const int s_d = static_cast<int>(std::lround((delay_d - t0) * fs));
  const int n_out =
      std::max(s_ris + r_ris.n_samples(), s_d + r_d.n_samples());

  Frame out;
  out.sample_rate = r_ris.sample_rate;
  out.samples = CMat::Zero(r_ris.n_antennas(), n_out);
  out.samples.middleCols(s_ris, r_ris.n_samples()) += r_ris.samples;
  out.samples.middleCols(s_d, r_d.n_samples()) += r_d.samples;
  return out;
}

}  // namespace risim

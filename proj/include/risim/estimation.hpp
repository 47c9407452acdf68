/*
 * Copyright (c) 2026 risim authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <optional>

#include "risim/arrays.hpp"
#include "risim/channel.hpp"
#include "risim/types.hpp"

namespace risim {

/// Hermitian PSD sample covariance.
struct Covariance {
  CMat matrix;
  int n_snapshots = 0;
};

/// Pseudo-spectrum sampled on a strictly increasing azimuth grid over
/// [0, pi] (the receiver's front halfplane).
struct Spectrum {
  Eigen::VectorXd grid;    // radians
  Eigen::VectorXd values;  // > 0
  double grid_step = 0.0;  // radians
};

struct ExcludeWindow {
  double angle = 0.0;      // radians
  double halfwidth = 0.0;  // radians
};

/// R = (1/N_s) sum_n r[n] r[n]^H, symmetrised to exact Hermitian form.
Covariance sample_covariance(const Frame& frame);

/// Subspace pseudo-spectrum P(az) = 1 / (a(az)^H E_n E_n^H a(az)) on the
/// local-frame grid over [0, pi]. The noise subspace spans the eigenvectors
/// of the n_rx - n_sources smallest eigenvalues (ties broken by descending
/// eigenvalue then ascending index).
Spectrum music_spectrum(const Covariance& cov, const ArraySpec& rx_spec,
                        int n_sources, double grid_step);

/// Grid azimuth of the global spectrum maximum (first index on exact ties),
/// skipping grid points within the optional exclusion window. The discrete
/// peak is refined by fitting a parabola to the reciprocal values (the
/// smooth null-spectrum minimum) of the three surrounding points.
double pick_peak(const Spectrum& spectrum,
                 const std::optional<ExcludeWindow>& exclude = std::nullopt);

}  // namespace risim

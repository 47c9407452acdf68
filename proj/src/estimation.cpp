/*
 * Copyright (c) 2026 risim authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */
#include "risim/estimation.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <vector>

#include "risim/errors.hpp"

namespace risim {

Covariance sample_covariance(const Frame& frame) {
  if (frame.n_samples() < 1 || frame.n_antennas() < 1)
    throw std::invalid_argument("sample_covariance: empty frame");
  if (frame.n_samples() < frame.n_antennas())
    std::cerr << "sample_covariance: fewer snapshots (" << frame.n_samples()
              << ") than antennas (" << frame.n_antennas() << ")\n";
  CMat r = frame.samples * frame.samples.adjoint() /
           static_cast<double>(frame.n_samples());
  r = 0.5 * (r + r.adjoint().eval());
  return Covariance{std::move(r), frame.n_samples()};
}

Spectrum music_spectrum(const Covariance& cov, const ArraySpec& rx_spec,
                        int n_sources, double grid_step) {
  const int n_rx = static_cast<int>(cov.matrix.rows());
  if (cov.matrix.rows() != cov.matrix.cols())
    throw ShapeError("music_spectrum: covariance is not square");
  if (n_rx != rx_spec.size())
    throw ShapeError("music_spectrum: covariance size does not match array");
  if (n_sources < 1 || n_sources >= n_rx)
    throw std::invalid_argument("music_spectrum: need 1 <= n_sources < n_rx");
  if (!(grid_step > 0.0))
    throw std::invalid_argument("music_spectrum: grid step must be positive");

  Eigen::SelfAdjointEigenSolver<CMat> eig(cov.matrix);
  if (eig.info() != Eigen::Success)
    throw NumericalError("music_spectrum: eigendecomposition failed");
  const Eigen::VectorXd evals = eig.eigenvalues();  // ascending
  const double max_eval = evals.maxCoeff();
  if (evals.minCoeff() < -1e-10 * std::max(max_eval, 1e-300))
    throw NumericalError("music_spectrum: covariance is not positive semi-definite");

  // Order eigenpairs by descending eigenvalue, ascending index on ties, and
  // span the noise subspace with the trailing n_rx - n_sources of them.
  std::vector<int> order(static_cast<size_t>(n_rx));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return evals(a) > evals(b); });
  const int n_noise = n_rx - n_sources;
  CMat noise_basis(n_rx, n_noise);
  for (int k = 0; k < n_noise; ++k)
    noise_basis.col(k) = eig.eigenvectors().col(order[static_cast<size_t>(n_sources + k)]);
  const CMat projector = noise_basis * noise_basis.adjoint();

  const int n_grid = static_cast<int>(std::floor(kPi / grid_step + 1e-9)) + 1;
  Spectrum sp;
  sp.grid_step = grid_step;
  sp.grid.resize(n_grid);
  sp.values.resize(n_grid);
  for (int i = 0; i < n_grid; ++i) {
    const double az = std::min(i * grid_step, kPi);
    const CVec a = array_response(rx_spec, az, 0.0, 1.0);
    const double denom = std::real(a.dot(projector * a));  // a^H P a
    sp.grid(i) = az;
    sp.values(i) = 1.0 / std::max(denom, 1e-300);
  }
  return sp;
}

double pick_peak(const Spectrum& spectrum,
                 const std::optional<ExcludeWindow>& exclude) {
  const Eigen::Index n = spectrum.grid.size();
  if (n < 1) throw std::invalid_argument("pick_peak: empty spectrum");

  auto excluded = [&](Eigen::Index i) {
    return exclude &&
           std::abs(spectrum.grid(i) - exclude->angle) <= exclude->halfwidth;
  };

  Eigen::Index best = -1;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (excluded(i)) continue;
    if (best < 0 || spectrum.values(i) > spectrum.values(best)) best = i;
  }
  if (best < 0)
    throw NoPeakError("pick_peak: exclusion window covers the entire grid");
  if (best == 0 || best == n - 1) return spectrum.grid(best);

  // The reciprocal of the spectrum is smooth and locally quadratic around a
  // peak, so the parabola vertex of 1/P recovers sub-grid accuracy even when
  // the peak sample itself is near-singular.
  const double zm = 1.0 / spectrum.values(best - 1);
  const double z0 = 1.0 / spectrum.values(best);
  const double zp = 1.0 / spectrum.values(best + 1);
  const double curvature = zm - 2.0 * z0 + zp;
  if (!(curvature > 0.0)) return spectrum.grid(best);
  const double h = spectrum.grid(best + 1) - spectrum.grid(best);
  double offset = 0.5 * h * (zm - zp) / curvature;
  offset = std::clamp(offset, -h, h);
  return spectrum.grid(best) + offset;
}

}  // namespace risim

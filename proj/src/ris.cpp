/*
 * Copyright (c) 2026 risim authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */
#include "risim/ris.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "risim/errors.hpp"

namespace risim {

namespace {
constexpr double kHalfPi = kPi / 2.0;
}

CVec RISConfig::weights() const {
  CVec w(phases.size());
  for (Eigen::Index i = 0; i < phases.size(); ++i)
    w(i) = cplx(std::cos(phases(i)), std::sin(phases(i)));
  return w;
}

void RISConfig::validate() const {
  if (phases.size() < 1) throw ValidationError("RIS config must be non-empty");
  if (bit_depth == BitDepth::one_bit) {
    for (Eigen::Index i = 0; i < phases.size(); ++i)
      if (std::abs(std::abs(phases(i)) - kHalfPi) > 1e-12)
        throw ValidationError("one-bit config phases must be +/- pi/2");
  }
}

double power_pattern(const RISConfig& config, double reflect_azimuth,
                     double reflect_elevation, const AnglePair& incidence,
                     const ArraySpec& ris_spec) {
  if (config.size() != ris_spec.size())
    throw ShapeError("power_pattern: config length does not match RIS size");
  const double lambda = 1.0;  // response depends only on spacing in wavelengths
  const CVec a_in =
      array_response(ris_spec, incidence.azimuth, incidence.elevation, lambda);
  const CVec a_out =
      array_response(ris_spec, reflect_azimuth, reflect_elevation, lambda);
  const CVec v = a_in.cwiseProduct(a_out.conjugate());
  const cplx s = config.weights().transpose() * v;
  return std::norm(s);
}

RISConfig mrt_config(const AnglePair& incidence, const AnglePair& target,
                     const ArraySpec& ris_spec) {
  const double lambda = 1.0;
  const CVec a_in =
      array_response(ris_spec, incidence.azimuth, incidence.elevation, lambda);
  const CVec a_tgt =
      array_response(ris_spec, target.azimuth, target.elevation, lambda);
  RISConfig cfg;
  cfg.bit_depth = BitDepth::continuous;
  cfg.target_azimuth = target.azimuth;
  cfg.target_elevation = target.elevation;
  cfg.phases.resize(ris_spec.size());
  for (Eigen::Index i = 0; i < cfg.phases.size(); ++i) {
    // w = conj(a_in .* conj(a_tgt)) makes every pattern summand unity at
    // the target.
    cfg.phases(i) = wrap_angle(std::arg(std::conj(a_in(i)) * a_tgt(i)));
  }
  return cfg;
}

RISConfig quantize_config(const RISConfig& config) {
  RISConfig q = config;
  q.bit_depth = BitDepth::one_bit;
  for (Eigen::Index i = 0; i < q.phases.size(); ++i) {
    const double theta = wrap_angle(config.phases(i));
    // Nearer of the two codes on the circle maximises cos(theta - code);
    // sin(theta) >= 0 (including both ties at 0 and pi) picks +pi/2.
    q.phases(i) = std::sin(theta) >= 0.0 ? kHalfPi : -kHalfPi;
  }
  return q;
}

RISConfig negate_config(const RISConfig& config) {
  RISConfig n = config;
  for (Eigen::Index i = 0; i < n.phases.size(); ++i)
    n.phases(i) = wrap_angle(config.phases(i) + kPi);
  return n;
}

Codebook build_codebook(const AnglePair& incidence, double azimuth_min,
                        double azimuth_max, double angle_step,
                        const ArraySpec& ris_spec, BitDepth bit_depth) {
  if (!(angle_step > 0.0))
    throw std::invalid_argument("build_codebook: angle step must be positive");
  if (azimuth_max < azimuth_min)
    throw std::invalid_argument("build_codebook: empty azimuth range");
  if (azimuth_min < 0.0 || azimuth_max > kPi)
    throw std::invalid_argument(
        "build_codebook: range must lie in the RIS front halfspace [0, pi]");

  const int count =
      static_cast<int>(std::floor((azimuth_max - azimuth_min) / angle_step + 1e-9)) + 1;
  Codebook cb;
  cb.angle_step = angle_step;
  cb.incidence = incidence;
  cb.bit_depth = bit_depth;
  cb.entries.reserve(static_cast<size_t>(count));
  for (int k = 0; k < count; ++k) {
    const double az = azimuth_min + k * angle_step;
    RISConfig cfg = mrt_config(incidence, {az, 0.0}, ris_spec);
    if (bit_depth == BitDepth::one_bit) cfg = quantize_config(cfg);
    cb.entries.push_back(std::move(cfg));
  }
  return cb;
}

std::string codebook_to_json(const Codebook& cb) {
  nlohmann::json j;
  j["schema"] = 1;
  j["bit_depth"] = cb.bit_depth == BitDepth::one_bit ? "one_bit" : "continuous";
  j["angle_step_deg"] = rad_to_deg(cb.angle_step);
  j["incidence_azimuth_deg"] = rad_to_deg(cb.incidence.azimuth);
  j["incidence_elevation_deg"] = rad_to_deg(cb.incidence.elevation);
  nlohmann::json entries = nlohmann::json::array();
  for (const RISConfig& e : cb.entries) {
    nlohmann::json je;
    je["target_azimuth_deg"] = rad_to_deg(e.target_azimuth);
    je["target_elevation_deg"] = rad_to_deg(e.target_elevation);
    if (cb.bit_depth == BitDepth::one_bit) {
      std::vector<int> signs(static_cast<size_t>(e.size()));
      for (Eigen::Index i = 0; i < e.phases.size(); ++i)
        signs[static_cast<size_t>(i)] = e.phases(i) > 0.0 ? 1 : -1;
      je["signs"] = signs;
    } else {
      std::vector<double> ph(e.phases.data(), e.phases.data() + e.phases.size());
      je["phases_rad"] = ph;
    }
    entries.push_back(std::move(je));
  }
  j["entries"] = std::move(entries);
  return j.dump(2);
}

Codebook codebook_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("codebook parse failure: ") + e.what());
  }
  Codebook cb;
  cb.bit_depth = j.at("bit_depth").get<std::string>() == "one_bit"
                     ? BitDepth::one_bit
                     : BitDepth::continuous;
  cb.angle_step = deg_to_rad(j.at("angle_step_deg").get<double>());
  cb.incidence.azimuth = deg_to_rad(j.at("incidence_azimuth_deg").get<double>());
  cb.incidence.elevation =
      deg_to_rad(j.at("incidence_elevation_deg").get<double>());
  for (const auto& je : j.at("entries")) {
    RISConfig e;
    e.bit_depth = cb.bit_depth;
    e.target_azimuth = deg_to_rad(je.at("target_azimuth_deg").get<double>());
    e.target_elevation = deg_to_rad(je.at("target_elevation_deg").get<double>());
    if (cb.bit_depth == BitDepth::one_bit) {
      const auto signs = je.at("signs").get<std::vector<int>>();
      e.phases.resize(static_cast<Eigen::Index>(signs.size()));
      for (size_t i = 0; i < signs.size(); ++i)
        e.phases(static_cast<Eigen::Index>(i)) =
            signs[i] >= 0 ? kPi / 2.0 : -kPi / 2.0;
    } else {
      const auto ph = je.at("phases_rad").get<std::vector<double>>();
      e.phases.resize(static_cast<Eigen::Index>(ph.size()));
      for (size_t i = 0; i < ph.size(); ++i)
        e.phases(static_cast<Eigen::Index>(i)) = ph[i];
    }
    cb.entries.push_back(std::move(e));
  }
  return cb;
}

}  // namespace risim

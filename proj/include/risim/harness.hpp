/*
 * Copyright (c) 2026 risim authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "risim/protocol.hpp"

namespace risim {

/// Rectangular test grid of UE positions.
struct UEGrid {
  double x_min = 0.0, x_max = 0.0;
  double y_min = 0.0, y_max = 0.0;
  int n_x = 1, n_y = 1;
  double z = 1.5;

  /// Grid coordinate; a single-point axis sits at the range midpoint.
  Vec3 point(int ix, int iy) const;
};

/// A full experiment description: scene, UE grid, signalling and protocol
/// parameters, and the seed list.
struct Scenario {
  std::string name;
  Scene scene;
  UEGrid ue_grid;
  std::vector<uint64_t> seeds{1};
  ProtocolParams protocol;  // per-trial defaults; seed/mode filled per run

  void validate() const;
};

enum class RunMode { continuous_sweep, onebit_sweep, onebit_sweep_music };

std::string to_string(RunMode mode);
RunMode run_mode_from_string(const std::string& s);

/// Peak / mean / population-variance statistics of absolute angle errors in
/// degrees.
struct ErrorStats {
  double peak = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  int n_trials = 0;
};

ErrorStats error_stats(const std::vector<double>& errors_deg);

struct TrialRecord {
  int trial_index = 0;
  int grid_ix = 0, grid_iy = 0;
  uint64_t seed = 0;
  RunReport report;
};

struct MonteCarloResult {
  RunMode mode = RunMode::onebit_sweep_music;
  std::vector<TrialRecord> trials;  // ordered by trial index
  ErrorStats stats;                 // over successful trials
  int failures = 0;
};

/// Parse and validate a scenario file (versioned JSON schema). All defaults
/// are filled in, so serializing the result echoes the complete
/// configuration.
Scenario load_scenario(const std::string& path);
Scenario scenario_from_json(const std::string& text);
std::string scenario_to_json(const Scenario& scenario);

/// FNV-1a over the canonical serialized scenario; stamped into every report
/// for provenance.
uint64_t scenario_hash(const Scenario& scenario);

struct MonteCarloOptions {
  int jobs = 0;             // 0: hardware concurrency
  bool do_mapping = false;  // requires a MUSIC mode
};

/// run_protocol at every grid point x seed. Sweep-only modes take the best
/// codebook entry's target azimuth as the angle estimate; the MUSIC mode
/// refines it. Trial failures are recorded and excluded from the stats.
MonteCarloResult run_montecarlo(const Scenario& scenario, RunMode mode,
                                const MonteCarloOptions& options = {});

enum class ReportFormat { csv, structured_text };

/// Emit per-trial results: CSV with a fixed documented column order, or a
/// nested JSON report. Both carry the scenario hash and tool version.
void emit_report(const Scenario& scenario, const MonteCarloResult& result,
                 ReportFormat format, const std::string& path);
void emit_report(const Scenario& scenario, const MonteCarloResult& result,
                 ReportFormat format, std::ostream& out);

/// Round-trip helper for the structured format.
MonteCarloResult report_from_json(const std::string& text);

/// The documented CSV header.
std::string csv_header();

}  // namespace risim

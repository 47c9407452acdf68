/*
 * Copyright (c) 2026 risim authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "risim/errors.hpp"
#include "risim/harness.hpp"
#include "risim/version.hpp"

namespace {

using namespace risim;

// Bare names resolve against the bundled scenario directory.
std::string resolve_scenario(const std::string& arg) {
  namespace fs = std::filesystem;
  if (fs::exists(arg)) return arg;
  const fs::path bundled = fs::path(RISIM_SCENARIO_DIR) / (arg + ".json");
  if (fs::exists(bundled)) return bundled.string();
  throw ValidationError("scenario not found: " + arg +
                        " (no such file, and no bundled scenario of that name)");
}

struct CommonOptions {
  std::string scenario;
  std::string out;
  int jobs = 0;
  int64_t seed = -1;  // <0: use the scenario's seed list
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--scenario", opt.scenario,
                  "Scenario file, or the name of a bundled scenario "
                  "(paper_replica, single_wall, los_only)")
      ->required();
  cmd->add_option("--out", opt.out, "Output file path");
  cmd->add_option("--jobs", opt.jobs,
                  "Worker threads (default: hardware concurrency)");
  cmd->add_option("--seed", opt.seed,
                  "Replace the scenario seed list with this single seed");
}

Scenario load_common(const CommonOptions& opt) {
  Scenario sc = load_scenario(resolve_scenario(opt.scenario));
  if (opt.seed >= 0) sc.seeds = {static_cast<uint64_t>(opt.seed)};
  return sc;
}

void print_stats_row(const std::string& label, const MonteCarloResult& r) {
  std::printf("%-20s %10.3f %10.3f %12.3f %8d %8d\n", label.c_str(),
              r.stats.peak, r.stats.mean, r.stats.variance, r.stats.n_trials,
              r.failures);
}

int cmd_sweep_table(const CommonOptions& opt, const std::string& mode_arg,
                    const std::string& report_path) {
  const Scenario sc = load_common(opt);
  std::vector<RunMode> modes;
  if (mode_arg == "all")
    modes = {RunMode::continuous_sweep, RunMode::onebit_sweep,
             RunMode::onebit_sweep_music};
  else
    modes = {run_mode_from_string(mode_arg)};

  MonteCarloOptions mc;
  mc.jobs = opt.jobs;
  std::printf("%-20s %10s %10s %12s %8s %8s\n", "mode", "peak_deg", "mean_deg",
              "var_deg2", "trials", "failed");
  bool first = true;
  for (RunMode mode : modes) {
    const MonteCarloResult r = run_montecarlo(sc, mode, mc);
    print_stats_row(to_string(mode), r);
    if (!opt.out.empty()) {
      // one concatenated CSV: header once, then rows per mode
      std::ofstream out(opt.out, first ? std::ios::binary
                                       : std::ios::binary | std::ios::app);
      if (!out) throw IoError("cannot open output file: " + opt.out);
      if (first) {
        emit_report(sc, r, ReportFormat::csv, out);
      } else {
        std::ostringstream tmp;
        emit_report(sc, r, ReportFormat::csv, tmp);
        const std::string text = tmp.str();
        out << text.substr(text.find('\n') + 1);
      }
    }
    if (!report_path.empty()) {
      const std::string path = modes.size() == 1
                                   ? report_path
                                   : report_path + "." + to_string(mode) + ".json";
      emit_report(sc, r, ReportFormat::structured_text, path);
    }
    first = false;
  }
  return 0;
}

int cmd_map(const CommonOptions& opt, const std::string& report_path) {
  const Scenario sc = load_common(opt);
  MonteCarloOptions mc;
  mc.jobs = opt.jobs;
  mc.do_mapping = true;
  const MonteCarloResult r = run_montecarlo(sc, RunMode::onebit_sweep_music, mc);

  int with_estimate = 0, ok_trials = 0;
  double err_sum = 0.0, err_max = 0.0;
  int err_n = 0;
  for (const TrialRecord& t : r.trials) {
    if (!t.report.ok) continue;
    ++ok_trials;
    if (!t.report.mapping.scatterer_estimates.empty()) ++with_estimate;
    for (double e : t.report.scatterer_errors) {
      err_sum += e;
      err_max = std::max(err_max, e);
      ++err_n;
    }
  }
  std::printf("trials: %d (failed %d)\n", ok_trials, r.failures);
  std::printf("trials with at least one scatterer estimate: %d\n", with_estimate);
  if (err_n > 0) {
    std::printf(
        "scatterer position error: mean %.3f m, max %.3f m over %d estimates\n",
        err_sum / err_n, err_max, err_n);
  }
  std::printf("angle error: mean %.3f deg, peak %.3f deg\n", r.stats.mean,
              r.stats.peak);
  if (!opt.out.empty()) emit_report(sc, r, ReportFormat::csv, opt.out);
  if (!report_path.empty())
    emit_report(sc, r, ReportFormat::structured_text, report_path);
  return 0;
}

int cmd_trace(const CommonOptions& opt, const std::string& tx,
              const std::string& rx, int max_order) {
  const Scenario sc = load_common(opt);
  const auto paths = trace_paths(sc.scene, tx, rx, max_order);
  const Pose rx_pose = sc.scene.nodes.at(rx);

  std::printf("%-4s %-6s %12s %12s %12s %12s %10s  %s\n", "#", "type",
              "aoa_az_deg", "aoa_el_deg", "aod_az_deg", "delay_ns", "gain",
              "via");
  std::ostringstream csv;
  csv << "index,type,aoa_azimuth_local_deg,aoa_elevation_deg,aod_azimuth_deg,"
         "delay_ns,gain,surfaces\n";
  for (size_t i = 0; i < paths.size(); ++i) {
    const PathRecord& p = paths[i];
    const double aoa_local = wrap_angle(p.aoa_azimuth - rx_pose.yaw);
    std::string via;
    for (const std::string& s : p.surface_names)
      via += (via.empty() ? "" : "+") + s;
    if (via.empty()) via = "-";
    std::printf("%-4zu %-6s %12.2f %12.2f %12.2f %12.3f %10.3e  %s\n", i + 1,
                p.order == 0 ? "LoS" : "NLoS", rad_to_deg(aoa_local),
                rad_to_deg(p.aoa_elevation), rad_to_deg(p.aod_azimuth),
                p.delay * 1e9, p.gain, via.c_str());
    csv << i + 1 << "," << (p.order == 0 ? "LoS" : "NLoS") << ","
        << rad_to_deg(aoa_local) << "," << rad_to_deg(p.aoa_elevation) << ","
        << rad_to_deg(p.aod_azimuth) << "," << p.delay * 1e9 << "," << p.gain
        << "," << via << "\n";
  }
  if (!opt.out.empty()) {
    std::ofstream out(opt.out, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + opt.out);
    out << csv.str();
  }
  return 0;
}

int cmd_codebook(const CommonOptions& opt) {
  const Scenario sc = load_common(opt);
  const Pose ris_pose = sc.scene.nodes.at("ris");
  const Pose ap_pose = sc.scene.nodes.at("ap");
  const AnglePair incidence =
      to_local_frame(angles_of(ap_pose.position - ris_pose.position), ris_pose);
  const ArraySpec ris =
      make_ura(sc.protocol.ris_count_h, sc.protocol.ris_count_v,
               sc.protocol.ris_spacing, ris_pose);
  const Codebook cb = build_codebook(
      incidence, sc.protocol.codebook_azimuth_min,
      sc.protocol.codebook_azimuth_max, sc.protocol.codebook_step, ris,
      sc.protocol.bit_depth);
  std::printf(
      "codebook: %d entries, step %.2f deg, incidence (%.2f, %.2f) deg, %s\n",
      cb.size(), rad_to_deg(cb.angle_step), rad_to_deg(incidence.azimuth),
      rad_to_deg(incidence.elevation),
      cb.bit_depth == BitDepth::one_bit ? "one_bit" : "continuous");
  if (!opt.out.empty()) {
    std::ofstream out(opt.out, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + opt.out);
    out << codebook_to_json(cb) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"risim - RIS-aided indoor positioning and mapping simulator"};
  app.set_version_flag("--version", risim::kToolVersion);
  app.require_subcommand(1);

  CommonOptions sweep_opt, map_opt, trace_opt, cb_opt;
  std::string mode_arg = "all";
  std::string sweep_report, map_report;
  std::string trace_tx = "ris", trace_rx = "ue";
  int trace_order = 1;

  CLI::App* sweep = app.add_subcommand(
      "sweep-table", "Run the beam-sweeping error statistics table");
  add_common(sweep, sweep_opt);
  sweep->add_option("--mode", mode_arg,
                    "continuous_sweep|onebit_sweep|onebit_sweep_music|all");
  sweep->add_option("--report", sweep_report, "Structured JSON report path");

  CLI::App* map = app.add_subcommand(
      "map", "Run the scatterer mapping protocol over the UE grid");
  add_common(map, map_opt);
  map->add_option("--report", map_report, "Structured JSON report path");

  CLI::App* trace = app.add_subcommand("trace", "Dump the traced path table");
  add_common(trace, trace_opt);
  trace->add_option("--tx", trace_tx, "Transmit node (default ris)");
  trace->add_option("--rx", trace_rx, "Receive node (default ue)");
  trace->add_option("--max-order", trace_order,
                    "Maximum reflection order (0..2)");

  CLI::App* cb =
      app.add_subcommand("codebook", "Build and export the RIS codebook");
  add_common(cb, cb_opt);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sweep->parsed())
      return cmd_sweep_table(sweep_opt, mode_arg, sweep_report);
    if (map->parsed()) return cmd_map(map_opt, map_report);
    if (trace->parsed())
      return cmd_trace(trace_opt, trace_tx, trace_rx, trace_order);
    if (cb->parsed()) return cmd_codebook(cb_opt);
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

/*
 * Copyright (c) 2026 risim authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */
#include "risim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "risim/errors.hpp"
#include "risim/rng.hpp"
#include "risim/version.hpp"

namespace risim {

using nlohmann::json;

Vec3 UEGrid::point(int ix, int iy) const {
  auto coord = [](double lo, double hi, int i, int n) {
    if (n <= 1) return 0.5 * (lo + hi);
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  };
  return {coord(x_min, x_max, ix, n_x), coord(y_min, y_max, iy, n_y), z};
}

void Scenario::validate() const {
  scene.validate();
  if (ue_grid.n_x < 1 || ue_grid.n_y < 1)
    throw ValidationError("ue_grid: n_x and n_y must be >= 1");
  if (seeds.empty()) throw ValidationError("scenario needs at least one seed");
  for (int ix : {0, ue_grid.n_x - 1})
    for (int iy : {0, ue_grid.n_y - 1})
      if (!scene.room.inside(ue_grid.point(ix, iy)))
        throw ValidationError("ue_grid extends outside the room");
  if (!(protocol.n_pilots >= 1))
    throw ValidationError("n_pilots must be >= 1");
  if (!(protocol.sample_rate > 0.0))
    throw ValidationError("sample_rate_hz must be positive");
  if (std::isnan(protocol.snr_db))
    throw ValidationError("snr_db must be a number");
}

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::continuous_sweep: return "continuous_sweep";
    case RunMode::onebit_sweep: return "onebit_sweep";
    case RunMode::onebit_sweep_music: return "onebit_sweep_music";
  }
  return "unknown";
}

RunMode run_mode_from_string(const std::string& s) {
  if (s == "continuous_sweep") return RunMode::continuous_sweep;
  if (s == "onebit_sweep") return RunMode::onebit_sweep;
  if (s == "onebit_sweep_music") return RunMode::onebit_sweep_music;
  throw ValidationError("unknown run mode '" + s + "'");
}

ErrorStats error_stats(const std::vector<double>& errors_deg) {
  if (errors_deg.empty())
    throw std::invalid_argument("error_stats: empty error list");
  ErrorStats st;
  st.n_trials = static_cast<int>(errors_deg.size());
  double sum = 0.0;
  for (double e : errors_deg) {
    if (e < 0.0) throw std::invalid_argument("error_stats: negative error");
    st.peak = std::max(st.peak, e);
    sum += e;
  }
  st.mean = sum / st.n_trials;
  double acc = 0.0;
  for (double e : errors_deg) acc += (e - st.mean) * (e - st.mean);
  st.variance = acc / st.n_trials;  // population variance, fixed trial set
  return st;
}

namespace {

double require_number(const json& j, const std::string& key) {
  if (!j.contains(key)) throw ParseError("missing key '" + key + "'");
  if (!j.at(key).is_number())
    throw ParseError("key '" + key + "' must be a number");
  return j.at(key).get<double>();
}

double number_or(const json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number())
    throw ParseError("key '" + key + "' must be a number");
  return j.at(key).get<double>();
}

int int_or(const json& j, const std::string& key, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer())
    throw ParseError("key '" + key + "' must be an integer");
  return j.at(key).get<int>();
}

Vec3 vec3_of(const json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 3)
    throw ParseError("key '" + key + "' must be a 3-element array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Pose pose_of(const json& j, const std::string& key) {
  Pose p;
  p.position = vec3_of(j.at("position"), key + ".position");
  p.yaw = number_or(j, "yaw", 0.0);
  return p;
}

json pose_json(const Pose& p) {
  return json{{"position", {p.position.x(), p.position.y(), p.position.z()}},
              {"yaw", p.yaw}};
}

}  // namespace

Scenario scenario_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("scenario parse failure: ") + e.what());
  }
  if (int_or(j, "schema", -1) != 1)
    throw ParseError("key 'schema' must be 1");

  Scenario sc;
  sc.name = j.value("name", "unnamed");

  if (!j.contains("scene")) throw ParseError("missing key 'scene'");
  const json& js = j.at("scene");
  const json& jroom = js.at("room");
  sc.scene.room.min_corner = vec3_of(jroom.at("min"), "scene.room.min");
  sc.scene.room.max_corner = vec3_of(jroom.at("max"), "scene.room.max");
  const double wall_gamma = number_or(jroom, "gamma", 0.7);
  sc.scene.room.wall_gamma.fill(wall_gamma);
  if (jroom.contains("wall_gamma")) {
    static const char* names[6] = {"x_min", "x_max", "y_min",
                                   "y_max", "floor", "ceiling"};
    for (int i = 0; i < 6; ++i)
      sc.scene.room.wall_gamma[static_cast<size_t>(i)] =
          number_or(jroom.at("wall_gamma"), names[i], wall_gamma);
  }
  sc.scene.carrier_frequency_hz = require_number(js, "carrier_frequency_hz");
  if (js.contains("surfaces")) {
    for (const json& jf : js.at("surfaces")) {
      Surface s;
      const json& corners = jf.at("corners");
      if (!corners.is_array() || corners.size() != 4)
        throw ParseError("surface corners must be 4 points");
      for (size_t k = 0; k < 4; ++k)
        s.corners[k] = vec3_of(corners[k], "surface corner");
      s.gamma = require_number(jf, "gamma");
      s.name = jf.value("name", "surface");
      sc.scene.scatterers.push_back(std::move(s));
    }
  }
  const json& jn = js.at("nodes");
  for (const char* node : {"ap", "ris", "ue"}) {
    if (!jn.contains(node))
      throw ParseError(std::string("missing node '") + node + "'");
    sc.scene.nodes[node] = pose_of(jn.at(node), node);
  }

  if (j.contains("ue_grid")) {
    const json& jg = j.at("ue_grid");
    const json& jx = jg.at("x");
    const json& jy = jg.at("y");
    sc.ue_grid.x_min = jx.at(0).get<double>();
    sc.ue_grid.x_max = jx.at(1).get<double>();
    sc.ue_grid.y_min = jy.at(0).get<double>();
    sc.ue_grid.y_max = jy.at(1).get<double>();
    sc.ue_grid.n_x = int_or(jg, "n_x", 1);
    sc.ue_grid.n_y = int_or(jg, "n_y", 1);
    sc.ue_grid.z = number_or(jg, "z", sc.scene.nodes.at("ue").position.z());
  } else {
    const Vec3 ue = sc.scene.nodes.at("ue").position;
    sc.ue_grid = {ue.x(), ue.x(), ue.y(), ue.y(), 1, 1, ue.z()};
  }

  if (j.contains("seeds")) {
    sc.seeds.clear();
    for (const json& s : j.at("seeds")) sc.seeds.push_back(s.get<uint64_t>());
  }

  ProtocolParams& p = sc.protocol;
  if (j.contains("arrays")) {
    const json& ja = j.at("arrays");
    p.ap_antennas = int_or(ja, "ap_antennas", p.ap_antennas);
    p.ue_antennas = int_or(ja, "ue_antennas", p.ue_antennas);
    p.ap_spacing = number_or(ja, "ap_spacing_wavelengths", p.ap_spacing);
    p.ue_spacing = number_or(ja, "ue_spacing_wavelengths", p.ue_spacing);
    if (ja.contains("ris")) {
      const json& jr = ja.at("ris");
      p.ris_count_h = int_or(jr, "count_h", p.ris_count_h);
      p.ris_count_v = int_or(jr, "count_v", p.ris_count_v);
      p.ris_spacing = number_or(jr, "spacing_wavelengths", p.ris_spacing);
    }
  }
  p.snr_db = number_or(j, "snr_db", p.snr_db);
  p.n_pilots = int_or(j, "n_pilots", p.n_pilots);
  p.sample_rate = number_or(j, "sample_rate_hz", p.sample_rate);
  p.max_order = int_or(j, "max_reflection_order", p.max_order);
  p.toa_sigma = number_or(j, "toa_sigma_s", p.toa_sigma);
  if (j.contains("codebook")) {
    const json& jc = j.at("codebook");
    p.codebook_step = deg_to_rad(number_or(jc, "step_deg", rad_to_deg(p.codebook_step)));
    if (jc.contains("azimuth_range_deg")) {
      p.codebook_azimuth_min = deg_to_rad(jc.at("azimuth_range_deg").at(0).get<double>());
      p.codebook_azimuth_max = deg_to_rad(jc.at("azimuth_range_deg").at(1).get<double>());
    }
    if (jc.contains("bit_depth")) {
      const std::string d = jc.at("bit_depth").get<std::string>();
      if (d != "one_bit" && d != "continuous")
        throw ParseError("codebook.bit_depth must be 'one_bit' or 'continuous'");
      p.bit_depth = d == "one_bit" ? BitDepth::one_bit : BitDepth::continuous;
    }
  }
  if (j.contains("music")) {
    p.music_grid_step = deg_to_rad(
        number_or(j.at("music"), "grid_step_deg", rad_to_deg(p.music_grid_step)));
  }
  if (j.contains("mapping")) {
    const json& jm = j.at("mapping");
    p.reject_threshold = deg_to_rad(
        number_or(jm, "reject_threshold_deg", rad_to_deg(p.reject_threshold)));
    p.merge_radius = number_or(jm, "merge_radius_m", p.merge_radius);
  }

  sc.validate();
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return scenario_from_json(ss.str());
}

std::string scenario_to_json(const Scenario& sc) {
  const ProtocolParams& p = sc.protocol;
  json j;
  j["schema"] = 1;
  j["name"] = sc.name;
  json jroom;
  jroom["min"] = {sc.scene.room.min_corner.x(), sc.scene.room.min_corner.y(),
                  sc.scene.room.min_corner.z()};
  jroom["max"] = {sc.scene.room.max_corner.x(), sc.scene.room.max_corner.y(),
                  sc.scene.room.max_corner.z()};
  jroom["wall_gamma"] = {{"x_min", sc.scene.room.wall_gamma[0]},
                         {"x_max", sc.scene.room.wall_gamma[1]},
                         {"y_min", sc.scene.room.wall_gamma[2]},
                         {"y_max", sc.scene.room.wall_gamma[3]},
                         {"floor", sc.scene.room.wall_gamma[4]},
                         {"ceiling", sc.scene.room.wall_gamma[5]}};
  json jsurf = json::array();
  for (const Surface& s : sc.scene.scatterers) {
    json jf;
    jf["name"] = s.name;
    jf["gamma"] = s.gamma;
    json corners = json::array();
    for (const Vec3& c : s.corners) corners.push_back({c.x(), c.y(), c.z()});
    jf["corners"] = std::move(corners);
    jsurf.push_back(std::move(jf));
  }
  json jnodes;
  for (const auto& [name, pose] : sc.scene.nodes) jnodes[name] = pose_json(pose);
  j["scene"] = {{"room", std::move(jroom)},
                {"carrier_frequency_hz", sc.scene.carrier_frequency_hz},
                {"surfaces", std::move(jsurf)},
                {"nodes", std::move(jnodes)}};
  j["ue_grid"] = {{"x", {sc.ue_grid.x_min, sc.ue_grid.x_max}},
                  {"y", {sc.ue_grid.y_min, sc.ue_grid.y_max}},
                  {"n_x", sc.ue_grid.n_x},
                  {"n_y", sc.ue_grid.n_y},
                  {"z", sc.ue_grid.z}};
  j["seeds"] = sc.seeds;
  j["arrays"] = {{"ap_antennas", p.ap_antennas},
                 {"ue_antennas", p.ue_antennas},
                 {"ap_spacing_wavelengths", p.ap_spacing},
                 {"ue_spacing_wavelengths", p.ue_spacing},
                 {"ris",
                  {{"count_h", p.ris_count_h},
                   {"count_v", p.ris_count_v},
                   {"spacing_wavelengths", p.ris_spacing}}}};
  j["snr_db"] = p.snr_db;
  j["n_pilots"] = p.n_pilots;
  j["sample_rate_hz"] = p.sample_rate;
  j["max_reflection_order"] = p.max_order;
  j["toa_sigma_s"] = p.toa_sigma;
  j["codebook"] = {
      {"step_deg", rad_to_deg(p.codebook_step)},
      {"azimuth_range_deg",
       {rad_to_deg(p.codebook_azimuth_min), rad_to_deg(p.codebook_azimuth_max)}},
      {"bit_depth", p.bit_depth == BitDepth::one_bit ? "one_bit" : "continuous"}};
  j["music"] = {{"grid_step_deg", rad_to_deg(p.music_grid_step)}};
  j["mapping"] = {{"reject_threshold_deg", rad_to_deg(p.reject_threshold)},
                  {"merge_radius_m", p.merge_radius}};
  return j.dump(2);
}

uint64_t scenario_hash(const Scenario& scenario) {
  const std::string canon = scenario_to_json(scenario);
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

MonteCarloResult run_montecarlo(const Scenario& scenario, RunMode mode,
                                const MonteCarloOptions& options) {
  scenario.validate();
  if (options.do_mapping && mode != RunMode::onebit_sweep_music)
    throw ValidationError("mapping requires the onebit_sweep_music mode");

  struct TrialSpec {
    int index, ix, iy;
    uint64_t seed;
  };
  std::vector<TrialSpec> specs;
  int index = 0;
  for (int ix = 0; ix < scenario.ue_grid.n_x; ++ix)
    for (int iy = 0; iy < scenario.ue_grid.n_y; ++iy)
      for (uint64_t seed : scenario.seeds) specs.push_back({index++, ix, iy, seed});

  MonteCarloResult result;
  result.mode = mode;
  result.trials.resize(specs.size());

  auto run_one = [&](const TrialSpec& ts) {
    TrialRecord rec;
    rec.trial_index = ts.index;
    rec.grid_ix = ts.ix;
    rec.grid_iy = ts.iy;
    rec.seed = ts.seed;
    Scene scene = scenario.scene;
    scene.nodes.at("ue").position = scenario.ue_grid.point(ts.ix, ts.iy);
    ProtocolParams params = scenario.protocol;
    params.seed = mix_seed(ts.seed, static_cast<uint64_t>(ts.ix),
                           static_cast<uint64_t>(ts.iy));
    params.bit_depth = mode == RunMode::continuous_sweep ? BitDepth::continuous
                                                         : BitDepth::one_bit;
    params.estimation = mode == RunMode::onebit_sweep_music
                            ? EstimationMode::sweep_plus_music
                            : EstimationMode::sweep_only;
    params.do_mapping = options.do_mapping;
    try {
      rec.report = run_protocol(scene, params);
      rec.report.ue_true = scene.nodes.at("ue").position;
    } catch (const std::exception& e) {
      rec.report.ok = false;
      rec.report.error = e.what();
    }
    result.trials[static_cast<size_t>(ts.index)] = std::move(rec);
  };

  int jobs = options.jobs > 0
                 ? options.jobs
                 : static_cast<int>(std::thread::hardware_concurrency());
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(specs.size())));
  if (jobs == 1) {
    for (const TrialSpec& ts : specs) run_one(ts);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(jobs));
    for (int w = 0; w < jobs; ++w)
      pool.emplace_back([&] {
        for (size_t i = next.fetch_add(1); i < specs.size();
             i = next.fetch_add(1))
          run_one(specs[i]);
      });
    for (std::thread& t : pool) t.join();
  }

  std::vector<double> errors_deg;
  for (const TrialRecord& rec : result.trials) {
    if (rec.report.ok)
      errors_deg.push_back(rad_to_deg(rec.report.angle_error));
    else
      ++result.failures;
  }
  if (!errors_deg.empty()) result.stats = error_stats(errors_deg);
  return result;
}

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    out += c;
  }
  out += "\"";
  return out;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

json report_to_json_obj(const Scenario& scenario,
                        const MonteCarloResult& result) {
  json j;
  j["schema"] = 1;
  j["tool_version"] = kToolVersion;
  char hash_buf[20];
  std::snprintf(hash_buf, sizeof(hash_buf), "%016" PRIx64,
                scenario_hash(scenario));
  j["scenario_hash"] = hash_buf;
  j["scenario_name"] = scenario.name;
  j["mode"] = to_string(result.mode);
  j["failures"] = result.failures;
  j["stats"] = {{"peak_deg", result.stats.peak},
                {"mean_deg", result.stats.mean},
                {"variance_deg2", result.stats.variance},
                {"n_trials", result.stats.n_trials}};
  json trials = json::array();
  for (const TrialRecord& rec : result.trials) {
    const RunReport& r = rec.report;
    json jt;
    jt["trial"] = rec.trial_index;
    jt["grid_ix"] = rec.grid_ix;
    jt["grid_iy"] = rec.grid_iy;
    jt["seed"] = rec.seed;
    jt["ok"] = r.ok;
    if (!r.ok) {
      jt["error"] = r.error;
      trials.push_back(std::move(jt));
      continue;
    }
    jt["ue_true"] = {r.ue_true.x(), r.ue_true.y(), r.ue_true.z()};
    jt["ue_est"] = {r.estimate.position.x(), r.estimate.position.y(),
                    r.estimate.position.z()};
    jt["position_error_m"] = r.position_error;
    jt["aod_true_deg"] = rad_to_deg(r.aod_true);
    jt["aod_est_deg"] = rad_to_deg(r.estimate.azimuth_est);
    jt["angle_error_deg"] = rad_to_deg(r.angle_error);
    jt["range_true_m"] = r.range_true;
    jt["range_est_m"] = r.estimate.range_est;
    jt["best_entry"] = r.best_index;
    jt["best_entry_azimuth_deg"] = rad_to_deg(r.best_azimuth);
    if (!std::isnan(r.music_ue_aoa))
      jt["music_aoa_deg"] = rad_to_deg(r.music_ue_aoa);
    jt["sweep_powers"] = r.sweep_powers;
    json st = json::array();
    for (const Vec3& s : r.scatterers_true) st.push_back({s.x(), s.y(), s.z()});
    jt["scatterers_true"] = std::move(st);
    json se = json::array();
    for (const ScattererEstimate& s : r.mapping.scatterer_estimates) {
      se.push_back({{"position", {s.position.x(), s.position.y(), s.position.z()}},
                    {"beam_azimuth_deg", rad_to_deg(s.beam_azimuth)},
                    {"ue_aoa_deg", rad_to_deg(s.ue_aoa)},
                    {"codebook_index", s.codebook_index}});
    }
    jt["scatterers_est"] = std::move(se);
    jt["scatterer_errors_m"] = r.scatterer_errors;
    jt["rejected_count"] = r.mapping.rejected_count;
    trials.push_back(std::move(jt));
  }
  j["trials"] = std::move(trials);
  return j;
}

}  // namespace

std::string csv_header() {
  return "scenario_hash,tool_version,mode,trial,grid_ix,grid_iy,seed,status,"
         "ue_true_x,ue_true_y,ue_true_z,ue_est_x,ue_est_y,ue_est_z,"
         "position_error_m,aod_true_deg,aod_est_deg,angle_error_deg,"
         "range_true_m,range_est_m,best_entry,best_entry_azimuth_deg,"
         "music_aoa_deg,n_scatterers_est,n_rejected,scatterer_mean_error_m";
}

void emit_report(const Scenario& scenario, const MonteCarloResult& result,
                 ReportFormat format, std::ostream& out) {
  if (format == ReportFormat::structured_text) {
    out << report_to_json_obj(scenario, result).dump(2) << "\n";
    return;
  }
  char hash_buf[20];
  std::snprintf(hash_buf, sizeof(hash_buf), "%016" PRIx64,
                scenario_hash(scenario));
  out << csv_header() << "\n";
  for (const TrialRecord& rec : result.trials) {
    const RunReport& r = rec.report;
    std::vector<std::string> cols;
    cols.push_back(hash_buf);
    cols.push_back(kToolVersion);
    cols.push_back(to_string(result.mode));
    cols.push_back(std::to_string(rec.trial_index));
    cols.push_back(std::to_string(rec.grid_ix));
    cols.push_back(std::to_string(rec.grid_iy));
    cols.push_back(std::to_string(rec.seed));
    cols.push_back(r.ok ? "ok" : csv_quote("error: " + r.error));
    if (r.ok) {
      cols.push_back(fmt_double(r.ue_true.x()));
      cols.push_back(fmt_double(r.ue_true.y()));
      cols.push_back(fmt_double(r.ue_true.z()));
      cols.push_back(fmt_double(r.estimate.position.x()));
      cols.push_back(fmt_double(r.estimate.position.y()));
      cols.push_back(fmt_double(r.estimate.position.z()));
      cols.push_back(fmt_double(r.position_error));
      cols.push_back(fmt_double(rad_to_deg(r.aod_true)));
      cols.push_back(fmt_double(rad_to_deg(r.estimate.azimuth_est)));
      cols.push_back(fmt_double(rad_to_deg(r.angle_error)));
      cols.push_back(fmt_double(r.range_true));
      cols.push_back(fmt_double(r.estimate.range_est));
      cols.push_back(std::to_string(r.best_index));
      cols.push_back(fmt_double(rad_to_deg(r.best_azimuth)));
      cols.push_back(std::isnan(r.music_ue_aoa)
                         ? ""
                         : fmt_double(rad_to_deg(r.music_ue_aoa)));
      cols.push_back(std::to_string(r.mapping.scatterer_estimates.size()));
      cols.push_back(std::to_string(r.mapping.rejected_count));
      cols.push_back(r.scatterer_errors.empty()
                         ? ""
                         : fmt_double(mean_of(r.scatterer_errors)));
    } else {
      for (int k = 0; k < 18; ++k) cols.push_back("");
    }
    for (size_t k = 0; k < cols.size(); ++k)
      out << cols[k] << (k + 1 == cols.size() ? "" : ",");
    out << "\n";
  }
}

void emit_report(const Scenario& scenario, const MonteCarloResult& result,
                 ReportFormat format, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open output file: " + path);
  emit_report(scenario, result, format, out);
  if (!out) throw IoError("write failure: " + path);
}

MonteCarloResult report_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("report parse failure: ") + e.what());
  }
  MonteCarloResult result;
  result.mode = run_mode_from_string(j.at("mode").get<std::string>());
  result.failures = j.at("failures").get<int>();
  result.stats.peak = j.at("stats").at("peak_deg").get<double>();
  result.stats.mean = j.at("stats").at("mean_deg").get<double>();
  result.stats.variance = j.at("stats").at("variance_deg2").get<double>();
  result.stats.n_trials = j.at("stats").at("n_trials").get<int>();
  for (const json& jt : j.at("trials")) {
    TrialRecord rec;
    rec.trial_index = jt.at("trial").get<int>();
    rec.grid_ix = jt.at("grid_ix").get<int>();
    rec.grid_iy = jt.at("grid_iy").get<int>();
    rec.seed = jt.at("seed").get<uint64_t>();
    RunReport& r = rec.report;
    r.ok = jt.at("ok").get<bool>();
    r.seed = rec.seed;
    if (!r.ok) {
      r.error = jt.value("error", "");
      result.trials.push_back(std::move(rec));
      continue;
    }
    auto v3 = [](const json& a) { return Vec3(a[0].get<double>(), a[1].get<double>(), a[2].get<double>()); };
    r.ue_true = v3(jt.at("ue_true"));
    r.estimate.position = v3(jt.at("ue_est"));
    r.position_error = jt.at("position_error_m").get<double>();
    r.aod_true = deg_to_rad(jt.at("aod_true_deg").get<double>());
    r.estimate.azimuth_est = deg_to_rad(jt.at("aod_est_deg").get<double>());
    r.angle_error = deg_to_rad(jt.at("angle_error_deg").get<double>());
    r.range_true = jt.at("range_true_m").get<double>();
    r.estimate.range_est = jt.at("range_est_m").get<double>();
    r.estimate.toa_est = r.estimate.range_est / kSpeedOfLight;
    r.best_index = jt.at("best_entry").get<int>();
    r.best_azimuth = deg_to_rad(jt.at("best_entry_azimuth_deg").get<double>());
    r.music_ue_aoa = jt.contains("music_aoa_deg")
                         ? deg_to_rad(jt.at("music_aoa_deg").get<double>())
                         : std::numeric_limits<double>::quiet_NaN();
    r.sweep_powers = jt.at("sweep_powers").get<std::vector<double>>();
    for (const json& s : jt.at("scatterers_true")) r.scatterers_true.push_back(v3(s));
    for (const json& s : jt.at("scatterers_est")) {
      ScattererEstimate est;
      est.position = v3(s.at("position"));
      est.beam_azimuth = deg_to_rad(s.at("beam_azimuth_deg").get<double>());
      est.ue_aoa = deg_to_rad(s.at("ue_aoa_deg").get<double>());
      est.codebook_index = s.at("codebook_index").get<int>();
      r.mapping.scatterer_estimates.push_back(est);
    }
    r.scatterer_errors = jt.at("scatterer_errors_m").get<std::vector<double>>();
    r.mapping.rejected_count = jt.at("rejected_count").get<int>();
    result.trials.push_back(std::move(rec));
  }
  return result;
}

}  // namespace risim

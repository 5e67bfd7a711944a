// Copyright 2026 The snowvis Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. Every subcommand resolves its parameters as
//
//     command-line flag > --config JSON file > built-in default
//
// and writes the effective configuration next to its output
// (`<out>.config.json`, or `<out>/config.json` when the output is a
// directory). run() never calls exit(), so tests can drive it in-process.

#ifndef SNOWVIS_CLI_HPP
#define SNOWVIS_CLI_HPP

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "snowvis/csv.hpp"
#include "snowvis/density_grid.hpp"
#include "snowvis/errors.hpp"
#include "snowvis/evaluation.hpp"
#include "snowvis/filter_mask.hpp"
#include "snowvis/pointcloud_io.hpp"
#include "snowvis/snow_filters.hpp"
#include "snowvis/snow_sim.hpp"
#include "snowvis/visibility.hpp"

namespace snowvis::cli {

using json = nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

inline json default_config() {
  return {
      {"seed", nullptr},
      {"grid", {{"cell_size", 0.1}, {"half_extent", 25.0}, {"window_tau", 1.0}, {"window_mode", "centered"}}},
      {"beam",
       {{"aperture_deg", 0.085}, {"collision_area", 0.16}, {"strip_half_height", 0.5}, {"exposure", "sector"}}},
      {"visibility",
       {{"p", 0.5},
        {"radius", 5.0},
        {"weighting", "observation"},
        {"step", 1.0},
        {"exclude_persistent", false},
        {"persistent_hit_ratio", 0.95}}},
      {"follow", {{"poll_interval", 0.2}, {"idle_timeout", 5.0}}},
      {"filter",
       {{"name", "dsor"},
        {"ror", {{"radius", 0.1}, {"min_neighbors", 5}}},
        {"sor", {{"k", 10}, {"s", 1.0}}},
        {"dror", {{"azimuth_res_deg", 0.2}, {"multiplier", 3.0}, {"min_radius", 0.04}, {"min_neighbors", 3}}},
        {"dsor", {{"k", 5}, {"s", 0.01}, {"r", 0.05}}},
        {"subsample", {{"fraction", 0.7}}}}},
      {"rpe",
       {{"window", 1.0}, {"association_tolerance", 0.05}, {"min_travel", 0.1}, {"normalizer", "path_length"}}},
      {"correlate", {{"bin_width", 2.2}, {"tolerance", 0.5}}},
      {"sweep", {{"k", 5}, {"s_values", {0.01, 0.05, 0.1, 0.5, 1.0}}, {"r_values", {0.01, 0.02, 0.03, 0.04, 0.05}}}},
      {"simulate", {{"scans", 100}, {"scene", nullptr}, {"storm", nullptr}}},
  };
}

// ---------------------------------------------------------------------------
// Config values. Non-finite floats travel as the strings "inf" / "-inf".

inline json number_json(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

inline double as_double(const json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    if (auto v = parse_double(j.get<std::string>())) return *v;
  }
  throw UsageError("config " + where + ": expected a number");
}

inline double cfg_double(const json& cfg, const char* pointer) {
  return as_double(cfg.at(json::json_pointer(pointer)), pointer);
}

inline std::int64_t cfg_int(const json& cfg, const char* pointer) {
  const json& j = cfg.at(json::json_pointer(pointer));
  if (!j.is_number_integer()) throw UsageError(std::string("config ") + pointer + ": expected an integer");
  return j.get<std::int64_t>();
}

inline std::size_t cfg_count(const json& cfg, const char* pointer) {
  const auto v = cfg_int(cfg, pointer);
  if (v < 0) throw UsageError(std::string("config ") + pointer + ": must be >= 0");
  return static_cast<std::size_t>(v);
}

inline std::string cfg_string(const json& cfg, const char* pointer) {
  const json& j = cfg.at(json::json_pointer(pointer));
  if (!j.is_string()) throw UsageError(std::string("config ") + pointer + ": expected a string");
  return j.get<std::string>();
}

inline std::vector<double> cfg_doubles(const json& cfg, const char* pointer) {
  const json& j = cfg.at(json::json_pointer(pointer));
  if (!j.is_array()) throw UsageError(std::string("config ") + pointer + ": expected a list");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(as_double(v, pointer));
  return out;
}

/// Overlays `patch` onto `base`. Keys must already exist in `base`; a null
/// default accepts any value.
inline void overlay(json& base, const json& patch, const std::string& where = "") {
  if (!patch.is_object()) throw UsageError("config" + (where.empty() ? "" : " " + where) + ": expected an object");
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    const std::string key = where + "/" + it.key();
    if (!base.contains(it.key())) throw UsageError("config: unknown key " + key);
    json& slot = base[it.key()];
    if (slot.is_object() && it->is_object()) {
      overlay(slot, *it, key);
    } else if (slot.is_null() || slot.is_object() == it->is_object()) {
      slot = *it;
    } else {
      throw UsageError("config " + key + ": type mismatch");
    }
  }
}

inline GridConfig grid_config(const json& cfg) {
  GridConfig g;
  g.cell_size = cfg_double(cfg, "/grid/cell_size");
  g.half_extent = cfg_double(cfg, "/grid/half_extent");
  g.window_tau = cfg_double(cfg, "/grid/window_tau");
  g.window_mode = parse_window_mode(cfg_string(cfg, "/grid/window_mode"));
  g.validate();
  return g;
}

inline BeamModel beam_model(const json& cfg) {
  BeamModel b;
  b.aperture_alpha = deg2rad(cfg_double(cfg, "/beam/aperture_deg"));
  b.collision_area = cfg_double(cfg, "/beam/collision_area");
  b.strip_half_height = cfg_double(cfg, "/beam/strip_half_height");
  b.exposure = parse_exposure_model(cfg_string(cfg, "/beam/exposure"));
  b.validate();
  return b;
}

inline VisibilityOptions visibility_options(const json& cfg) {
  VisibilityOptions o;
  o.p = cfg_double(cfg, "/visibility/p");
  o.step = cfg_double(cfg, "/visibility/step");
  o.mean.radius = cfg_double(cfg, "/visibility/radius");
  o.mean.weighting = parse_weighting(cfg_string(cfg, "/visibility/weighting"));
  o.mean.exclude_persistent = cfg.at(json::json_pointer("/visibility/exclude_persistent")).get<bool>();
  o.mean.persistent_hit_ratio = cfg_double(cfg, "/visibility/persistent_hit_ratio");
  if (!(o.p > 0.0 && o.p < 1.0)) throw DomainError("p must lie in (0, 1)");
  return o;
}

inline RpeOptions rpe_options(const json& cfg) {
  RpeOptions o;
  o.window = cfg_double(cfg, "/rpe/window");
  o.association_tolerance = cfg_double(cfg, "/rpe/association_tolerance");
  o.min_travel = cfg_double(cfg, "/rpe/min_travel");
  o.normalizer = parse_rpe_normalizer(cfg_string(cfg, "/rpe/normalizer"));
  o.validate();
  return o;
}

inline BinOptions bin_options(const json& cfg) {
  return {cfg_double(cfg, "/correlate/bin_width"), cfg_double(cfg, "/correlate/tolerance")};
}

inline std::optional<std::uint64_t> cfg_seed(const json& cfg) {
  const json& j = cfg.at("seed");
  if (j.is_null()) return std::nullopt;
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0) throw UsageError("config /seed: expected an integer >= 0");
  return j.get<std::uint64_t>();
}

inline std::filesystem::path config_echo_path(const std::filesystem::path& out) {
  if (std::filesystem::is_directory(out)) return out / "config.json";
  auto p = out;
  p += ".config.json";
  return p;
}

inline void write_config_echo(const json& cfg, const std::filesystem::path& out) {
  atomic_write_file(config_echo_path(out), cfg.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Flag binding

/// Binds flags to config pointers. Values are kept as text and converted by
/// the type of the default at that pointer, so "inf" works for any float.
class FlagBinder {
 public:
  FlagBinder(CLI::App* app, const json& defaults) : app_(app), defaults_(defaults) {}

  CLI::Option* bind(const std::string& flag, const std::string& pointer, const std::string& help,
                    bool reference_default = false) {
    const json::json_pointer ptr(pointer);
    const json& def = defaults_.at(ptr);
    std::string text = help;
    if (!def.is_null()) text += " [default: " + describe(def) + "]";
    if (reference_default) text += " (reference value)";
    auto binding = std::make_unique<Binding>();
    binding->ptr = ptr;
    CLI::Option* opt = nullptr;
    if (def.is_boolean()) {
      opt = app_->add_flag(flag, binding->flag, text);
    } else {
      opt = app_->add_option(flag, binding->text, text);
      opt->type_name(def.is_string() ? "TEXT" : def.is_array() ? "LIST" : def.is_number_integer() ? "INT" : "NUM");
    }
    binding->opt = opt;
    bindings_.push_back(std::move(binding));
    return opt;
  }

  void apply(json& cfg) const {
    for (const auto& b : bindings_) {
      if (b->opt->count() == 0) continue;
      const json& def = defaults_.at(b->ptr);
      cfg[b->ptr] = convert(def, *b);
    }
  }

 private:
  struct Binding {
    CLI::Option* opt = nullptr;
    json::json_pointer ptr;
    std::string text;
    bool flag = false;
  };

  static std::string describe(const json& def) {
    if (def.is_string()) return def.get<std::string>();
    if (def.is_array()) {
      std::string s;
      for (const auto& v : def) s += (s.empty() ? "" : ",") + v.dump();
      return s;
    }
    return def.dump();
  }

  static json convert(const json& def, const Binding& b) {
    const std::string flag = b.opt->get_name();
    if (def.is_boolean()) return b.flag;
    if (def.is_string()) return b.text;
    if (def.is_number_integer() || (def.is_null() && b.ptr.to_string() == "/seed")) {
      std::int64_t v = 0;
      const auto* end = b.text.data() + b.text.size();
      const auto r = std::from_chars(b.text.data(), end, v);
      if (r.ec != std::errc{} || r.ptr != end || v < 0) throw UsageError(flag + ": expected a non-negative integer");
      return v;
    }
    if (def.is_array()) {
      json list = json::array();
      std::size_t pos = 0;
      while (pos <= b.text.size()) {
        std::size_t comma = b.text.find(',', pos);
        if (comma == std::string::npos) comma = b.text.size();
        const auto v = parse_double(std::string_view(b.text).substr(pos, comma - pos));
        if (!v) throw UsageError(flag + ": expected a comma-separated list of numbers");
        list.push_back(number_json(*v));
        pos = comma + 1;
      }
      return list;
    }
    const auto v = parse_double(b.text);
    if (!v) throw UsageError(flag + ": expected a number, got '" + b.text + "'");
    return number_json(*v);
  }

  CLI::App* app_;
  const json& defaults_;
  std::vector<std::unique_ptr<Binding>> bindings_;
};

// ---------------------------------------------------------------------------
// Commands

struct Streams {
  std::ostream& out;
  std::ostream& err;
};

inline std::optional<Trajectory> maybe_trajectory(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return load_trajectory(path);
}

inline std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) return {};
  return parse_manifest(text, path.parent_path());
}

inline int cmd_visibility(const json& cfg, const std::string& manifest, const std::string& traj_path,
                          const std::filesystem::path& out, Streams io) {
  const GridConfig grid = grid_config(cfg);
  const BeamModel beam = beam_model(cfg);
  const VisibilityOptions opts = visibility_options(cfg);
  const auto traj = maybe_trajectory(traj_path);
  ScanStream stream(read_manifest(manifest), traj);
  const auto scans = stream.collect();
  const auto series = visibility_timeseries(scans, traj ? &*traj : nullptr, grid, beam, opts);
  write_csv(visibility_table(series), out);
  std::size_t gaps = 0;
  for (const auto& e : series) gaps += e.is_gap();
  io.out << "wrote " << series.size() << " estimates (" << gaps << " gaps) to " << out.string() << "\n";
  return 0;
}

/// Polls the manifest and emits causal-window estimates as scans arrive.
/// Stops after `idle_timeout` seconds without new manifest rows.
inline int cmd_visibility_follow(const json& cfg, const std::string& manifest, const std::string& traj_path,
                                 const std::filesystem::path& out, Streams io) {
  const GridConfig grid = grid_config(cfg);
  const BeamModel beam = beam_model(cfg);
  const VisibilityOptions opts = visibility_options(cfg);
  const double poll = cfg_double(cfg, "/follow/poll_interval");
  const double idle = cfg_double(cfg, "/follow/idle_timeout");
  if (!(poll > 0.0) || !(idle >= 0.0)) throw DomainError("follow: poll interval must be > 0, idle timeout >= 0");

  using clock = std::chrono::steady_clock;
  std::vector<Scan> scans;
  std::vector<VisibilityEstimate> series;
  std::size_t consumed = 0;
  std::optional<double> next_t;
  auto last_growth = clock::now();
  for (;;) {
    std::optional<Trajectory> traj;
    if (!traj_path.empty() && std::filesystem::exists(traj_path)) traj = load_trajectory(traj_path);
    std::vector<ManifestEntry> entries;
    if (std::filesystem::exists(manifest)) entries = read_manifest(manifest);
    std::vector<ManifestEntry> fresh;
    for (std::size_t i = consumed; i < entries.size(); ++i) {
      if (!traj_path.empty() && (!traj || !traj->covers(entries[i].timestamp))) break;  // wait for poses
      fresh.push_back(entries[i]);
    }
    if (!fresh.empty()) {
      consumed += fresh.size();
      last_growth = clock::now();
      for (auto& s : ScanStream(std::move(fresh), traj).collect()) scans.push_back(std::move(s));
      std::stable_sort(scans.begin(), scans.end(), [](const Scan& a, const Scan& b) { return a.timestamp < b.timestamp; });
      if (!next_t) next_t = scans.front().timestamp;
      const double latest = scans.back().timestamp;
      const std::size_t before = series.size();
      while (*next_t <= latest + 1e-9 * opts.step) {
        series.push_back(visibility_at(scans, *next_t, grid, beam, opts, traj ? &*traj : nullptr));
        next_t = *next_t + opts.step;
      }
      // Scans older than every future causal window are no longer needed.
      const double keep_from = *next_t - grid.window_tau - opts.step;
      std::erase_if(scans, [&](const Scan& s) { return s.timestamp < keep_from; });
      if (series.size() != before) write_csv(visibility_table(series), out);
    } else if (std::chrono::duration<double>(clock::now() - last_growth).count() >= idle) {
      break;
    }
    std::this_thread::sleep_for(std::chrono::duration<double>(poll));
  }
  if (series.empty()) throw WindowError(WindowError::Kind::no_scans, "no scans");
  io.out << "wrote " << series.size() << " estimates to " << out.string() << "\n";
  return 0;
}

inline const char* kFilterNames = "ror, sor, dror, dsor, subsample";

inline FilterMask run_filter(const json& cfg, const std::string& name, std::span<const LidarPoint> cloud) {
  if (name == "ror") {
    return ror(cloud, {cfg_double(cfg, "/filter/ror/radius"), cfg_count(cfg, "/filter/ror/min_neighbors")});
  }
  if (name == "sor") return sor(cloud, {cfg_count(cfg, "/filter/sor/k"), cfg_double(cfg, "/filter/sor/s")});
  if (name == "dror") {
    return dror(cloud, {deg2rad(cfg_double(cfg, "/filter/dror/azimuth_res_deg")),
                        cfg_double(cfg, "/filter/dror/multiplier"), cfg_double(cfg, "/filter/dror/min_radius"),
                        cfg_count(cfg, "/filter/dror/min_neighbors")});
  }
  if (name == "dsor") {
    return dsor(cloud, {cfg_count(cfg, "/filter/dsor/k"), cfg_double(cfg, "/filter/dsor/s"),
                        cfg_double(cfg, "/filter/dsor/r")});
  }
  if (name == "subsample") {
    return random_subsample(cloud.size(), cfg_double(cfg, "/filter/subsample/fraction"), cfg_seed(cfg).value_or(0));
  }
  throw UsageError("unknown filter '" + name + "' (valid: " + kFilterNames + ")");
}

inline std::filesystem::path with_suffix(const std::filesystem::path& p, const char* suffix) {
  auto q = p;
  q += suffix;
  return q;
}

inline int cmd_filter(const json& cfg, const std::string& input, const std::string& format,
                      const std::filesystem::path& out, const std::string& mask_path, const std::string& labels_path,
                      Streams io) {
  const CloudFormat in_fmt = format.empty() ? format_from_extension(input) : parse_cloud_format(format);
  const Scan scan = load_pointcloud(input, in_fmt);
  const std::string name = cfg_string(cfg, "/filter/name");
  const FilterMask mask = run_filter(cfg, name, scan.points);
  write_pointcloud(apply_mask(scan.points, mask), out, format_from_extension(out));
  write_csv(mask_table(mask), mask_path.empty() ? with_suffix(out, ".mask.csv") : std::filesystem::path(mask_path));
  io.out << name << ": kept " << mask.kept() << " of " << mask.size() << " points\n";
  if (!labels_path.empty()) {
    const auto labels = read_labels(labels_path);
    const auto counts = removal_counts(mask, labels);
    const auto scores = scores_from_counts(counts);
    write_csv(scores_table(scores, counts), with_suffix(out, ".scores.csv"));
    auto show = [](const std::optional<double>& v) { return v ? format_float(*v) : std::string("absent"); };
    io.out << "precision " << show(scores.precision) << " recall " << show(scores.recall) << " f1 "
           << show(scores.f1) << "\n";
  }
  return 0;
}

inline json load_json_file(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw UsageError(path + ": " + e.what());
  }
}

/// Scene and storm from the config (inline objects) or from files, which win.
inline std::pair<SceneSpec, StormSpec> resolve_scenario(json& cfg, const std::string& scene_path,
                                                       const std::string& storm_path) {
  if (!scene_path.empty()) cfg["simulate"]["scene"] = load_json_file(scene_path);
  if (!storm_path.empty()) cfg["simulate"]["storm"] = load_json_file(storm_path);
  if (cfg["simulate"]["scene"].is_null() || cfg["simulate"]["storm"].is_null()) {
    throw UsageError("a scene and a storm are required (--scene/--storm or config simulate.scene/storm)");
  }
  try {
    SceneSpec scene = scene_from_json(cfg["simulate"]["scene"]);
    StormSpec storm = storm_from_json(cfg["simulate"]["storm"]);
    if (auto seed = cfg_seed(cfg)) storm.seed = *seed;
    // Echo the fully resolved scenario, defaults included.
    cfg["simulate"]["scene"] = to_json(scene);
    cfg["simulate"]["storm"] = to_json(storm);
    return {scene, storm};
  } catch (const json::exception& e) {
    throw UsageError(std::string("scenario: ") + e.what());
  }
}

inline int cmd_simulate(json& cfg, const std::string& scene_path, const std::string& storm_path,
                        const std::filesystem::path& out, Streams io) {
  const auto [scene, storm] = resolve_scenario(cfg, scene_path, storm_path);
  const std::size_t n = cfg_count(cfg, "/simulate/scans");
  std::filesystem::create_directories(out / "scans");
  std::vector<ManifestEntry> entries;
  std::vector<TimedPose> poses;
  std::size_t snow = 0, points = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const LabeledScan ls = simulate_scan(scene, storm, k);
    char name[32];
    std::snprintf(name, sizeof name, "%06zu", k);
    const std::filesystem::path rel = std::filesystem::path("scans") / (std::string(name) + ".bin");
    write_pointcloud(ls.scan.points, out / rel, CloudFormat::raw_xyzi);
    write_csv(label_table(ls), out / "scans" / (std::string(name) + ".labels.csv"));
    entries.push_back({ls.scan.timestamp, rel, ls.scan.sensor_pose, k + 1});
    poses.push_back({ls.scan.timestamp, ls.scan.sensor_pose});
    points += ls.labels.size();
    for (auto l : ls.labels) snow += l == PointLabel::snow;
  }
  write_csv(manifest_table(entries), out / "manifest.csv");
  if (!poses.empty()) write_trajectory(Trajectory(std::move(poses)), out / "trajectory.txt");
  write_config_echo(cfg, out);
  io.out << "simulated " << n << " scans, " << points << " points (" << snow << " snow) into " << out.string()
         << "\n";
  return 0;
}

inline int cmd_rpe(const json& cfg, const std::string& gt, const std::string& est, const std::filesystem::path& out,
                   Streams io) {
  const RpeResult r = relative_pose_error(load_trajectory(gt), load_trajectory(est), rpe_options(cfg));
  write_csv(rpe_table(r), out);
  io.out << "windows " << r.entries.size() << ", excluded " << r.excluded;
  if (r.summary) io.out << ", median " << format_float(r.summary->median) << " %";
  io.out << "\n";
  return 0;
}

inline int cmd_correlate(const json& cfg, const std::string& rpe_csv, const std::string& vis_csv,
                         const std::filesystem::path& out, Streams io) {
  const RpeResult rpe = parse_rpe_csv(read_csv(rpe_csv));
  const auto vis = parse_visibility_csv(read_csv(vis_csv));
  const BinnedCorrelation b = bin_by_visibility(rpe, vis, bin_options(cfg));
  write_csv(binned_table(b), out);
  io.out << "paired " << b.total() << " samples into " << b.bins.size() << " bins + overflow\n";
  return 0;
}

inline int cmd_sweep(json& cfg, const std::vector<std::string>& inputs, const std::vector<std::string>& labels,
                     const std::string& scene_path, const std::string& storm_path, const std::filesystem::path& out,
                     Streams io) {
  std::vector<std::vector<LidarPoint>> clouds;
  std::vector<std::vector<PointLabel>> label_sets;
  if (!scene_path.empty() || !storm_path.empty()) {
    if (!inputs.empty()) throw UsageError("sweep takes either --input clouds or --scene/--storm, not both");
    const auto [scene, storm] = resolve_scenario(cfg, scene_path, storm_path);
    for (auto& ls : simulate_sequence(scene, storm, cfg_count(cfg, "/simulate/scans"))) {
      clouds.push_back(std::move(ls.scan.points));
      label_sets.push_back(std::move(ls.labels));
    }
  } else {
    if (inputs.empty()) throw UsageError("sweep needs --input clouds or --scene/--storm");
    if (!labels.empty() && labels.size() != inputs.size()) throw UsageError("need one --labels file per --input");
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      clouds.push_back(load_pointcloud(inputs[i], format_from_extension(inputs[i])).points);
      if (!labels.empty()) label_sets.push_back(read_labels(labels[i]));
    }
  }
  std::vector<SweepInput> sweep_inputs;
  for (std::size_t i = 0; i < clouds.size(); ++i) {
    SweepInput in{clouds[i], std::nullopt};
    if (!label_sets.empty()) in.labels = std::span<const PointLabel>(label_sets[i]);
    sweep_inputs.push_back(in);
  }
  const SweepResult r = sweep_dsor(sweep_inputs, cfg_doubles(cfg, "/sweep/s_values"),
                                   cfg_doubles(cfg, "/sweep/r_values"), cfg_count(cfg, "/sweep/k"));
  write_csv(sweep_table(r), out);
  io.out << "swept " << r.rows.size() << " parameter pairs over " << clouds.size() << " clouds";
  if (r.best) {
    io.out << ", best s=" << format_float(r.rows[*r.best].s) << " r=" << format_float(r.rows[*r.best].r);
  }
  io.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// Entry point

/// Parses argv, runs one subcommand and returns the process exit code:
/// 0 success, 1 runtime failure, 2 usage error.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  const json defaults = default_config();
  CLI::App app{"Lidar visibility in snowfall: density estimation, snow filters and trajectory evaluation",
               "snowvis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::string config_path, out_path;
  auto common = [&](CLI::App* sub, FlagBinder& fb) {
    sub->add_option("--config", config_path, "JSON config file; flags override it")->check(CLI::ExistingFile);
    sub->add_option("--out", out_path, "Output path")->required();
    fb.bind("--seed", "/seed", "Random seed");
  };

  // visibility
  auto* vis = app.add_subcommand("visibility", "p-visibility time series from a scan manifest");
  FlagBinder vis_flags(vis, defaults);
  std::string manifest, trajectory;
  bool follow = false;
  common(vis, vis_flags);
  vis->add_option("--manifest", manifest, "Scan manifest CSV (timestamp,path[,tx..qw])")->required();
  vis->add_option("--trajectory", trajectory, "Sensor trajectory (t tx ty tz qx qy qz qw)");
  vis->add_flag("--follow", follow, "Poll the manifest and estimate with causal windows as scans arrive");
  vis_flags.bind("--p", "/visibility/p", "Detection probability p of V_p", true);
  vis_flags.bind("--tau", "/grid/window_tau", "Window duration in seconds", true);
  vis_flags.bind("--window-mode", "/grid/window_mode", "centered or causal");
  vis_flags.bind("--cell-size", "/grid/cell_size", "Grid cell size in meters", true);
  vis_flags.bind("--half-extent", "/grid/half_extent", "Grid half extent in meters");
  vis_flags.bind("--radius", "/visibility/radius", "Averaging radius in meters", true);
  vis_flags.bind("--aperture-deg", "/beam/aperture_deg", "Beam aperture angle in degrees", true);
  vis_flags.bind("--collision-area", "/beam/collision_area", "Collision area A_c in m^2 (constant exposure)", true);
  vis_flags.bind("--strip-half-height", "/beam/strip_half_height", "Half height of the z strip in meters", true);
  vis_flags.bind("--exposure", "/beam/exposure", "Exposure model: sector or constant");
  vis_flags.bind("--weighting", "/visibility/weighting", "Mean density weighting: observation or uniform");
  vis_flags.bind("--exclude-persistent", "/visibility/exclude_persistent", "Skip cells that are almost always hit");
  vis_flags.bind("--step", "/visibility/step", "Time series spacing in seconds");
  vis_flags.bind("--poll-interval", "/follow/poll_interval", "Follow mode poll interval in seconds");
  vis_flags.bind("--idle-timeout", "/follow/idle_timeout", "Follow mode stops after this many idle seconds");

  // filter
  auto* flt = app.add_subcommand("filter", "Snow removal filters on one point cloud");
  FlagBinder flt_flags(flt, defaults);
  std::string input, format, mask_path, labels_path;
  bool use_ror = false, use_sor = false, use_dror = false, use_dsor = false, use_sub = false;
  common(flt, flt_flags);
  flt->add_option("--input", input, "Input cloud (.pcd or raw xyzi)")->required();
  flt->add_option("--format", format, "Input format: pcd or raw_xyzi [default: from extension]");
  flt->add_option("--mask", mask_path, "Mask CSV path [default: <out>.mask.csv]");
  flt->add_option("--labels", labels_path, "Label CSV; writes precision/recall to <out>.scores.csv");
  flt_flags.bind("--filter", "/filter/name", std::string("Filter name: ") + kFilterNames);
  flt->add_flag("--ror", use_ror, "Shorthand for --filter ror");
  flt->add_flag("--sor", use_sor, "Shorthand for --filter sor");
  flt->add_flag("--dror", use_dror, "Shorthand for --filter dror");
  flt->add_flag("--dsor", use_dsor, "Shorthand for --filter dsor");
  flt->add_flag("--subsample", use_sub, "Shorthand for --filter subsample");
  flt_flags.bind("--ror-radius", "/filter/ror/radius", "ROR search radius in meters");
  flt_flags.bind("--ror-min-neighbors", "/filter/ror/min_neighbors", "ROR minimum neighbor count");
  flt_flags.bind("--sor-k", "/filter/sor/k", "SOR neighbor count");
  flt_flags.bind("--sor-s", "/filter/sor/s", "SOR standard deviation multiplier");
  flt_flags.bind("--dror-azimuth-res-deg", "/filter/dror/azimuth_res_deg", "DROR azimuth resolution in degrees");
  flt_flags.bind("--dror-multiplier", "/filter/dror/multiplier", "DROR radius multiplier");
  flt_flags.bind("--dror-min-radius", "/filter/dror/min_radius", "DROR minimum search radius in meters");
  flt_flags.bind("--dror-min-neighbors", "/filter/dror/min_neighbors", "DROR minimum neighbor count");
  flt_flags.bind("--k", "/filter/dsor/k", "DSOR neighbor count");
  flt_flags.bind("--s", "/filter/dsor/s", "DSOR s (inf disables the filter)");
  flt_flags.bind("--r", "/filter/dsor/r", "DSOR r (inf disables the filter)");
  flt_flags.bind("--fraction", "/filter/subsample/fraction", "Random subsample keep fraction", true);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Labeled synthetic snowstorm scans");
  FlagBinder sim_flags(sim, defaults);
  std::string scene_path, storm_path;
  common(sim, sim_flags);
  sim->add_option("--scene", scene_path, "Scene JSON (walls, sensor, lidar)");
  sim->add_option("--storm", storm_path, "Storm JSON (density or map, region, gusts, seed)");
  sim_flags.bind("--scans", "/simulate/scans", "Number of scans");

  // rpe
  auto* rpe = app.add_subcommand("rpe", "Windowed relative pose error");
  FlagBinder rpe_flags(rpe, defaults);
  std::string gt_path, est_path;
  common(rpe, rpe_flags);
  rpe->add_option("--gt", gt_path, "Ground-truth trajectory")->required();
  rpe->add_option("--est", est_path, "Estimated trajectory")->required();
  rpe_flags.bind("--window", "/rpe/window", "Window duration in seconds", true);
  rpe_flags.bind("--tolerance", "/rpe/association_tolerance", "Timestamp association tolerance in seconds");
  rpe_flags.bind("--min-travel", "/rpe/min_travel", "Windows with less ground-truth travel are excluded (m)");
  rpe_flags.bind("--normalizer", "/rpe/normalizer", "Percent normalizer: path_length or displacement");

  // correlate
  auto* cor = app.add_subcommand("correlate", "Bin RPE by visibility");
  FlagBinder cor_flags(cor, defaults);
  std::string rpe_csv, vis_csv;
  common(cor, cor_flags);
  cor->add_option("--rpe", rpe_csv, "RPE CSV from `snowvis rpe`")->required();
  cor->add_option("--vis", vis_csv, "Visibility CSV from `snowvis visibility`")->required();
  cor_flags.bind("--bin-width", "/correlate/bin_width", "Visibility bin width in meters", true);
  cor_flags.bind("--tolerance", "/correlate/tolerance", "Timestamp pairing tolerance in seconds");

  // sweep
  auto* swp = app.add_subcommand("sweep", "DSOR (s, r) parameter sweep");
  FlagBinder swp_flags(swp, defaults);
  std::vector<std::string> sweep_inputs, sweep_labels;
  std::string sweep_scene, sweep_storm;
  common(swp, swp_flags);
  swp->add_option("--input", sweep_inputs, "Input clouds (repeatable)");
  swp->add_option("--labels", sweep_labels, "Label CSVs, one per input (repeatable)");
  swp->add_option("--scene", sweep_scene, "Simulate labeled clouds from this scene JSON");
  swp->add_option("--storm", sweep_storm, "Storm JSON for the simulated clouds");
  swp_flags.bind("--scans", "/simulate/scans", "Number of simulated scans");
  swp_flags.bind("--k", "/sweep/k", "DSOR neighbor count");
  swp_flags.bind("--s-values", "/sweep/s_values", "Comma-separated s values");
  swp_flags.bind("--r-values", "/sweep/r_values", "Comma-separated r values");

  std::vector<std::string> args;
  for (int i = argc - 1; i >= 1; --i) args.emplace_back(argv[i]);
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    json cfg = defaults;
    if (!config_path.empty()) overlay(cfg, load_json_file(config_path));
    const Streams io{out, err};
    const std::filesystem::path out_file(out_path);
    if (vis->parsed()) {
      vis_flags.apply(cfg);
      if (follow) cfg["grid"]["window_mode"] = "causal";
      const int rc = follow ? cmd_visibility_follow(cfg, manifest, trajectory, out_file, io)
                            : cmd_visibility(cfg, manifest, trajectory, out_file, io);
      write_config_echo(cfg, out_file);
      return rc;
    }
    if (flt->parsed()) {
      flt_flags.apply(cfg);
      const int picked = use_ror + use_sor + use_dror + use_dsor + use_sub;
      if (picked > 1) throw UsageError("choose one filter");
      if (use_ror) cfg["filter"]["name"] = "ror";
      if (use_sor) cfg["filter"]["name"] = "sor";
      if (use_dror) cfg["filter"]["name"] = "dror";
      if (use_dsor) cfg["filter"]["name"] = "dsor";
      if (use_sub) cfg["filter"]["name"] = "subsample";
      const int rc = cmd_filter(cfg, input, format, out_file, mask_path, labels_path, io);
      write_config_echo(cfg, out_file);
      return rc;
    }
    if (sim->parsed()) {
      sim_flags.apply(cfg);
      return cmd_simulate(cfg, scene_path, storm_path, out_file, io);
    }
    if (rpe->parsed()) {
      rpe_flags.apply(cfg);
      const int rc = cmd_rpe(cfg, gt_path, est_path, out_file, io);
      write_config_echo(cfg, out_file);
      return rc;
    }
    if (cor->parsed()) {
      cor_flags.apply(cfg);
      const int rc = cmd_correlate(cfg, rpe_csv, vis_csv, out_file, io);
      write_config_echo(cfg, out_file);
      return rc;
    }
    if (swp->parsed()) {
      swp_flags.apply(cfg);
      const int rc = cmd_sweep(cfg, sweep_inputs, sweep_labels, sweep_scene, sweep_storm, out_file, io);
      write_config_echo(cfg, out_file);
      return rc;
    }
  } catch (const UsageError& e) {
    err << "snowvis: usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "snowvis: error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace snowvis::cli

#endif  // SNOWVIS_CLI_HPP

// Copyright 2026 The snowvis Authors
// SPDX-License-Identifier: Apache-2.0
//
// Labeled synthetic snowstorm scans drawn from a known Poisson density.
//
// A horizontal beam of aperture alpha sweeps a sector of area d^2 * alpha / 2,
// so in a homogeneous storm of density lambda the first snow collision
// distance D has survival function
//
//     P(D > d) = exp(-lambda * alpha * d^2 / 2)
//
// and is sampled by inverse CDF, D = sqrt(-2 ln u / (lambda * alpha)).
// Piecewise-constant storms are sampled cell by cell along the beam with the
// same exponential race. Every beam draws its random numbers from a
// counter-based stream keyed on (seed, scan index, beam index), so scans are
// reproducible and order-independent.

#ifndef SNOWVIS_SNOW_SIM_HPP
#define SNOWVIS_SNOW_SIM_HPP

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "snowvis/csv.hpp"
#include "snowvis/density_grid.hpp"
#include "snowvis/errors.hpp"
#include "snowvis/filter_mask.hpp"
#include "snowvis/geometry.hpp"
#include "snowvis/pointcloud_io.hpp"
#include "snowvis/visibility.hpp"

namespace snowvis {

struct LidarSpec {
  std::size_t beams = 2000;  // horizontal beams per scan, all inside the strip
  double max_range = 100.0;  // m
  double spin_rate_hz = 10.0;
  double aperture = deg2rad(0.085);  // rad

  void validate() const {
    if (beams == 0) throw DomainError("lidar needs at least one beam");
    if (!(max_range > 0.0)) throw DomainError("max range must be > 0");
    if (!(spin_rate_hz > 0.0)) throw DomainError("spin rate must be > 0");
    if (!(aperture > 0.0)) throw DomainError("aperture must be > 0");
  }
};

/// Vertical wall spanning the whole strip, as a 2-D segment.
struct Wall {
  Vec2 a;
  Vec2 b;
};

/// Constant-velocity planar motion with fixed heading.
struct SensorMotion {
  Vec2 start = Vec2::Zero();
  Vec2 velocity = Vec2::Zero();  // m/s
  double yaw = 0.0;              // rad
  double z = 0.0;                // m, world height of the sensor
  double start_time = 0.0;       // s

  Pose pose_at(double t) const {
    const Vec2 p = start + velocity * (t - start_time);
    return make_pose_2d(p.x(), p.y(), yaw, z);
  }
};

struct SceneSpec {
  std::vector<Wall> walls;
  SensorMotion sensor;
  LidarSpec lidar;
  double strip_half_height = 0.5;

  double scan_time(std::uint64_t index) const {
    return sensor.start_time + static_cast<double>(index) / lidar.spin_rate_hz;
  }
};

/// Piecewise-constant density over a lattice; zero outside it.
struct DensityMap {
  GridGeometry geometry;
  std::vector<double> values;  // row-major, geometry.linear()

  double at(CellIndex c) const { return geometry.contains(c) ? values[geometry.linear(c)] : 0.0; }
};

/// Density multiplied by `scale` for t in [t_begin, t_end).
struct GustEvent {
  double t_begin = 0.0;
  double t_end = std::numeric_limits<double>::infinity();
  double scale = 1.0;
};

struct StormSpec {
  double density = 0.0;  // flakes / m^2, used when `map` is absent
  std::optional<DensityMap> map;
  Vec2 region_min{-1e4, -1e4};  // extent of the constant-density storm
  Vec2 region_max{1e4, 1e4};
  std::uint64_t seed = 0;
  std::vector<GustEvent> gusts;

  double scale_at(double t) const {
    double s = 1.0;
    for (const auto& g : gusts) {
      if (t >= g.t_begin && t < g.t_end) s *= g.scale;
    }
    return s;
  }

  void validate() const {
    if (!(density >= 0.0) || !std::isfinite(density)) throw DomainError("storm density must be >= 0");
    if (map) {
      if (map->values.size() != map->geometry.cell_count()) throw DomainError("density map size mismatch");
      for (double v : map->values) {
        if (!(v >= 0.0)) throw DomainError("density map values must be >= 0");
      }
    }
    if (!(region_min.x() < region_max.x() && region_min.y() < region_max.y())) {
      throw DomainError("storm region is empty");
    }
    for (const auto& g : gusts) {
      if (!(g.scale >= 0.0)) throw DomainError("gust scale must be >= 0");
    }
  }
};

struct LabeledScan {
  Scan scan;
  std::vector<PointLabel> labels;
  std::vector<double> beam_lambda;  // mean density swept by the beam up to the return
};

// ---------------------------------------------------------------------------
// Random streams

namespace detail {

inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Uniform in the open interval (0, 1), a pure function of its keys.
inline double stream_uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::uint64_t h = detail::mix64(seed);
  h = detail::mix64(h ^ a);
  h = detail::mix64(h ^ b);
  h = detail::mix64(h ^ c);
  return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

// ---------------------------------------------------------------------------
// Collision sampling

/// Inverse-CDF draw in a homogeneous storm; nullopt when lambda = 0.
inline std::optional<double> sample_collision_distance(double lambda, double alpha, double u) {
  if (!(lambda >= 0.0)) throw DomainError("density must be >= 0");
  if (!(alpha > 0.0)) throw DomainError("aperture must be > 0");
  if (!(u > 0.0 && u < 1.0)) throw DomainError("u must lie in (0, 1)");
  if (lambda == 0.0) return std::nullopt;
  return std::sqrt(-2.0 * std::log(u) / (lambda * alpha));
}

namespace detail {

// Parameter interval [t0, t1] of the ray inside an axis-aligned box, clipped to
// [0, max_t]; nullopt if disjoint.
inline std::optional<std::pair<double, double>> clip_ray_box(const Vec2& o, const Vec2& dir, const Vec2& lo,
                                                             const Vec2& hi, double max_t) {
  double t0 = 0.0, t1 = max_t;
  for (int ax = 0; ax < 2; ++ax) {
    if (dir[ax] == 0.0) {
      if (o[ax] < lo[ax] || o[ax] > hi[ax]) return std::nullopt;
      continue;
    }
    double a = (lo[ax] - o[ax]) / dir[ax];
    double b = (hi[ax] - o[ax]) / dir[ax];
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
  }
  if (t0 > t1) return std::nullopt;
  return std::make_pair(t0, t1);
}

// Walks the beam [0, max_distance] through the storm, calling
// f(t_in, t_out, lambda) on each constant-density piece in order; f returns
// true to stop.
template <class F>
void walk_storm(const StormSpec& storm, const Vec2& origin, const Vec2& dir, double t, double max_distance, F&& f) {
  const double scale = storm.scale_at(t);
  if (scale == 0.0 || max_distance <= 0.0) return;
  if (!storm.map) {
    if (storm.density == 0.0) return;
    auto span = clip_ray_box(origin, dir, storm.region_min, storm.region_max, max_distance);
    if (span) f(span->first, span->second, storm.density * scale);
    return;
  }
  bool stop = false;
  walk_segment(storm.map->geometry, origin, Vec2(origin + dir * max_distance),
               [&](CellIndex c, double t_in, double t_out, CellEvent) {
                 if (stop) return;
                 t_out = std::min(t_out, max_distance);
                 const double lambda = storm.map->at(c) * scale;
                 if (lambda > 0.0 && t_out > t_in) stop = f(t_in, t_out, lambda);
               });
}

}  // namespace detail

/// First snow collision along a unit-direction beam within max_distance, or
/// nullopt. `u` in (0, 1) drives the exponential race E = -ln u.
inline std::optional<double> sample_collision_distance(const StormSpec& storm, const Vec2& origin, const Vec2& dir,
                                                       double t, double alpha, double max_distance, double u) {
  if (!(alpha > 0.0)) throw DomainError("aperture must be > 0");
  if (!(u > 0.0 && u < 1.0)) throw DomainError("u must lie in (0, 1)");
  const double budget = -std::log(u);
  double acc = 0.0;
  std::optional<double> hit;
  detail::walk_storm(storm, origin, dir, t, max_distance, [&](double t_in, double t_out, double lambda) {
    const double piece = lambda * 0.5 * alpha * (t_out * t_out - t_in * t_in);
    if (acc + piece >= budget) {
      const double d = std::sqrt(t_in * t_in + 2.0 * (budget - acc) / (lambda * alpha));
      hit = std::min(d, t_out);
      return true;
    }
    acc += piece;
    return false;
  });
  return hit;
}

/// Integrated density Lambda over the sector swept up to distance d.
inline double swept_density(const StormSpec& storm, const Vec2& origin, const Vec2& dir, double t, double alpha,
                            double d) {
  double acc = 0.0;
  detail::walk_storm(storm, origin, dir, t, d, [&](double t_in, double t_out, double lambda) {
    acc += lambda * 0.5 * alpha * (t_out * t_out - t_in * t_in);
    return false;
  });
  return acc;
}

/// Distance along the ray to the nearest wall, +inf if none.
inline double first_wall_distance(std::span<const Wall> walls, const Vec2& o, const Vec2& dir) {
  double best = std::numeric_limits<double>::infinity();
  auto cross = [](const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); };
  for (const auto& w : walls) {
    const Vec2 e = w.b - w.a;
    const double denom = cross(dir, e);
    if (std::abs(denom) < 1e-15) continue;
    const Vec2 ao = w.a - o;
    const double t = cross(ao, e) / denom;
    const double s = cross(ao, dir) / denom;
    if (t > 0.0 && s >= 0.0 && s <= 1.0) best = std::min(best, t);
  }
  return best;
}

inline constexpr double kObjectIntensity = 0.8;
inline constexpr double kSnowIntensity = 0.05;

namespace detail {
// Stream keys.
inline constexpr std::uint64_t kScanStream = ~std::uint64_t{0};
inline constexpr std::uint64_t kDrawCollision = 0;
inline constexpr std::uint64_t kDrawHeight = 1;
}  // namespace detail

inline LabeledScan simulate_scan(const SceneSpec& scene, const StormSpec& storm, std::uint64_t scan_index) {
  scene.lidar.validate();
  storm.validate();
  const double t = scene.scan_time(scan_index);
  const Pose pose = scene.sensor.pose_at(t);
  const Vec2 origin = pose.translation().head<2>();
  const double phase = stream_uniform(storm.seed, scan_index, detail::kScanStream, 0);
  const double alpha = scene.lidar.aperture;
  const double h = scene.strip_half_height;
  const auto beams = scene.lidar.beams;

  LabeledScan out;
  out.scan.timestamp = t;
  out.scan.sensor_pose = pose;
  out.scan.points.reserve(beams);
  for (std::size_t i = 0; i < beams; ++i) {
    const double az = 2.0 * std::numbers::pi * (static_cast<double>(i) + phase) / static_cast<double>(beams);
    const Vec2 local(std::cos(az), std::sin(az));
    const Vec2 dir = pose.linear().topLeftCorner<2, 2>() * local;
    const double d_obj = first_wall_distance(scene.walls, origin, dir);
    const double reach = std::min(d_obj, scene.lidar.max_range);
    const double u = stream_uniform(storm.seed, scan_index, i, detail::kDrawCollision);
    const auto d_snow = sample_collision_distance(storm, origin, dir, t, alpha, reach, u);

    double d = 0.0;
    PointLabel label;
    if (d_snow && *d_snow < d_obj) {
      d = *d_snow;
      label = PointLabel::snow;
    } else if (d_obj <= scene.lidar.max_range) {
      d = d_obj;
      label = PointLabel::object;
    } else {
      continue;  // no return
    }
    const double z = -h + 2.0 * h * stream_uniform(storm.seed, scan_index, i, detail::kDrawHeight);
    LidarPoint p;
    p.x = static_cast<float>(d * local.x());
    p.y = static_cast<float>(d * local.y());
    p.z = static_cast<float>(z);
    p.intensity = static_cast<float>(label == PointLabel::snow ? kSnowIntensity : kObjectIntensity);
    p.time_offset = static_cast<float>(static_cast<double>(i) / static_cast<double>(beams) / scene.lidar.spin_rate_hz);
    out.scan.points.push_back(p);
    out.labels.push_back(label);
    out.beam_lambda.push_back(swept_density(storm, origin, dir, t, alpha, d) / sector_area(d, alpha));
  }
  return out;
}

inline std::vector<LabeledScan> simulate_sequence(const SceneSpec& scene, const StormSpec& storm,
                                                  std::size_t n_scans, std::uint64_t first_index = 0) {
  std::vector<LabeledScan> out;
  out.reserve(n_scans);
  for (std::size_t k = 0; k < n_scans; ++k) out.push_back(simulate_scan(scene, storm, first_index + k));
  return out;
}

inline std::vector<Scan> scans_of(std::span<const LabeledScan> labeled) {
  std::vector<Scan> out;
  out.reserve(labeled.size());
  for (const auto& l : labeled) out.push_back(l.scan);
  return out;
}

/// Closed-form V_0.5 of a homogeneous storm.
inline double median_visibility(double lambda, double alpha) {
  return std::sqrt(2.0 * std::numbers::ln2 / (lambda * alpha));
}

struct RecoveryResult {
  std::optional<double> lambda_hat;
  std::optional<double> v_hat;  // absent when unbounded
  double lambda_true = 0.0;
  std::optional<double> v_true;
  std::optional<double> lambda_rel_error;
  std::optional<double> v_rel_error;
  std::size_t observed_cells = 0;
  VisibilityStatus status = VisibilityStatus::ok;
};

/// Simulates `n_scans` of a constant storm, accumulates them into one grid
/// centered on the sensor at mid-sequence and recovers lambda_bar and V_p.
inline RecoveryResult end_to_end_recovery(const StormSpec& storm, const SceneSpec& scene, std::size_t n_scans,
                                          GridConfig grid = {}, const VisibilityOptions& opts = {},
                                          ExposureModel exposure = ExposureModel::sector) {
  if (n_scans < 1) throw DomainError("need at least one scan");
  const auto labeled = simulate_sequence(scene, storm, n_scans);
  const auto scans = scans_of(labeled);
  const double t_first = scans.front().timestamp;
  const double t_last = scans.back().timestamp;
  grid.window_mode = WindowMode::centered;
  grid.window_tau = std::max(t_last - t_first, 1e-6) * (1.0 + 1e-9);
  BeamModel beam;
  beam.aperture_alpha = scene.lidar.aperture;
  beam.strip_half_height = scene.strip_half_height;
  beam.exposure = exposure;

  const double t_mid = 0.5 * (t_first + t_last);
  const VisibilityEstimate est = visibility_at(scans, t_mid, grid, beam, opts);
  RecoveryResult r;
  r.status = est.status;
  r.lambda_hat = est.lambda_bar;
  r.v_hat = est.v_p;
  r.observed_cells = est.n_observed_cells;
  r.lambda_true = storm.density * storm.scale_at(t_mid);
  if (r.lambda_true > 0.0) {
    r.v_true = p_visibility(r.lambda_true, beam.aperture_alpha, opts.p);
    if (r.lambda_hat) r.lambda_rel_error = std::abs(*r.lambda_hat - r.lambda_true) / r.lambda_true;
    if (r.v_hat) r.v_rel_error = std::abs(*r.v_hat - *r.v_true) / *r.v_true;
  }
  return r;
}

// ---------------------------------------------------------------------------
// JSON configuration

inline SceneSpec scene_from_json(const nlohmann::json& j) {
  SceneSpec s;
  for (const auto& w : j.value("walls", nlohmann::json::array())) {
    if (!w.is_array() || w.size() != 4) throw UsageError("wall must be [x1, y1, x2, y2]");
    s.walls.push_back({Vec2(w[0].get<double>(), w[1].get<double>()), Vec2(w[2].get<double>(), w[3].get<double>())});
  }
  if (j.contains("sensor")) {
    const auto& js = j["sensor"];
    if (js.contains("start")) s.sensor.start = Vec2(js["start"][0].get<double>(), js["start"][1].get<double>());
    if (js.contains("velocity")) {
      s.sensor.velocity = Vec2(js["velocity"][0].get<double>(), js["velocity"][1].get<double>());
    }
    s.sensor.yaw = deg2rad(js.value("yaw_deg", 0.0));
    s.sensor.z = js.value("z", 0.0);
    s.sensor.start_time = js.value("start_time", 0.0);
  }
  if (j.contains("lidar")) {
    const auto& jl = j["lidar"];
    s.lidar.beams = jl.value("beams", s.lidar.beams);
    s.lidar.max_range = jl.value("max_range", s.lidar.max_range);
    s.lidar.spin_rate_hz = jl.value("spin_rate_hz", s.lidar.spin_rate_hz);
    s.lidar.aperture = deg2rad(jl.value("aperture_deg", rad2deg(s.lidar.aperture)));
  }
  s.strip_half_height = j.value("strip_half_height", s.strip_half_height);
  s.lidar.validate();
  return s;
}

inline nlohmann::json to_json(const SceneSpec& s) {
  nlohmann::json walls = nlohmann::json::array();
  for (const auto& w : s.walls) walls.push_back({w.a.x(), w.a.y(), w.b.x(), w.b.y()});
  return {{"walls", walls},
          {"sensor",
           {{"start", {s.sensor.start.x(), s.sensor.start.y()}},
            {"velocity", {s.sensor.velocity.x(), s.sensor.velocity.y()}},
            {"yaw_deg", rad2deg(s.sensor.yaw)},
            {"z", s.sensor.z},
            {"start_time", s.sensor.start_time}}},
          {"lidar",
           {{"beams", s.lidar.beams},
            {"max_range", s.lidar.max_range},
            {"spin_rate_hz", s.lidar.spin_rate_hz},
            {"aperture_deg", rad2deg(s.lidar.aperture)}}},
          {"strip_half_height", s.strip_half_height}};
}

inline StormSpec storm_from_json(const nlohmann::json& j) {
  StormSpec s;
  s.density = j.value("density", 0.0);
  s.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("region")) {
    const auto& r = j["region"];
    s.region_min = Vec2(r["min"][0].get<double>(), r["min"][1].get<double>());
    s.region_max = Vec2(r["max"][0].get<double>(), r["max"][1].get<double>());
  }
  if (j.contains("map")) {
    const auto& m = j["map"];
    GridGeometry g(Vec2(m["min"][0].get<double>(), m["min"][1].get<double>()), m["cell_size"].get<double>(),
                   m["nx"].get<int>(), m["ny"].get<int>());
    s.map = DensityMap{g, m["values"].get<std::vector<double>>()};
  }
  for (const auto& g : j.value("gusts", nlohmann::json::array())) {
    GustEvent e;
    e.t_begin = g.value("t_begin", 0.0);
    if (g.contains("t_end") && !g["t_end"].is_null()) e.t_end = g["t_end"].get<double>();
    e.scale = g.value("scale", 1.0);
    s.gusts.push_back(e);
  }
  s.validate();
  return s;
}

inline nlohmann::json to_json(const StormSpec& s) {
  nlohmann::json j = {{"density", s.density},
                      {"seed", s.seed},
                      {"region", {{"min", {s.region_min.x(), s.region_min.y()}}, {"max", {s.region_max.x(), s.region_max.y()}}}}};
  if (s.map) {
    const auto& g = s.map->geometry;
    j["map"] = {{"min", {g.min_corner().x(), g.min_corner().y()}},
                {"cell_size", g.cell_size()},
                {"nx", g.nx()},
                {"ny", g.ny()},
                {"values", s.map->values}};
  }
  nlohmann::json gusts = nlohmann::json::array();
  for (const auto& g : s.gusts) {
    gusts.push_back({{"t_begin", g.t_begin},
                     {"t_end", std::isinf(g.t_end) ? nlohmann::json(nullptr) : nlohmann::json(g.t_end)},
                     {"scale", g.scale}});
  }
  j["gusts"] = gusts;
  return j;
}

/// index, label, beam_lambda
inline CsvTable label_table(const LabeledScan& scan) {
  CsvTable t{{"index", "label", "beam_lambda"}, {}};
  t.rows.reserve(scan.labels.size());
  for (std::size_t i = 0; i < scan.labels.size(); ++i) {
    t.rows.push_back({static_cast<std::int64_t>(i), std::string(to_string(scan.labels[i])), scan.beam_lambda[i]});
  }
  return t;
}

inline std::vector<PointLabel> read_labels(const std::filesystem::path& path) {
  const CsvText csv = read_csv(path);
  const auto c = csv.column("label");
  if (!c) throw UsageError(path.string() + ": no label column");
  std::vector<PointLabel> out;
  out.reserve(csv.rows.size());
  for (const auto& row : csv.rows) out.push_back(parse_point_label(row.at(*c)));
  return out;
}

}  // namespace snowvis

#endif  // SNOWVIS_SNOW_SIM_HPP

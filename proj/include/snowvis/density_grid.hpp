// Copyright 2026 The snowvis Authors
// SPDX-License-Identifier: Apache-2.0
//
// 2-D hit / pass-through counting grid and the Poisson density estimator
//
//     lambda_i = ln(1 + h_i / m_i) / A_i
//
// where h_i counts beams that ended in cell i, m_i counts beams that crossed
// it, and A_i is the area a single beam sweeps while crossing the cell. Two
// normalizers are available:
//
//   * ExposureModel::sector   A_i is the mean swept sector area per traversal,
//                             1/2 * alpha * (t_out^2 - t_in^2), accumulated
//                             while the beam is traversed. Consistent with the
//                             survival law exp(-lambda * alpha * d^2 / 2)
//                             used by the visibility metric.
//   * ExposureModel::constant A_i = A_c for every cell (collision area of a
//                             single measurement, 0.4 m x 0.4 m by default).

#ifndef SNOWVIS_DENSITY_GRID_HPP
#define SNOWVIS_DENSITY_GRID_HPP

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <exception>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "snowvis/csv.hpp"
#include "snowvis/errors.hpp"
#include "snowvis/geometry.hpp"
#include "snowvis/pointcloud_io.hpp"

namespace snowvis {

enum class ExposureModel { sector, constant };

inline ExposureModel parse_exposure_model(std::string_view s) {
  if (s == "sector") return ExposureModel::sector;
  if (s == "constant") return ExposureModel::constant;
  throw UsageError("unknown exposure model '" + std::string(s) + "' (expected sector or constant)");
}

inline const char* to_string(ExposureModel m) { return m == ExposureModel::sector ? "sector" : "constant"; }

struct BeamModel {
  double aperture_alpha = deg2rad(0.085);  // rad
  double collision_area = 0.16;            // m^2, used by ExposureModel::constant
  double strip_half_height = 0.5;          // m, sensor frame
  ExposureModel exposure = ExposureModel::sector;

  void validate() const {
    if (!(aperture_alpha > 0.0) || !std::isfinite(aperture_alpha)) throw DomainError("aperture must be > 0");
    if (!(collision_area > 0.0) || !std::isfinite(collision_area)) throw DomainError("collision area must be > 0");
    if (!(strip_half_height > 0.0)) throw DomainError("strip half-height must be > 0");
  }
};

enum class WindowMode { centered, causal };

inline WindowMode parse_window_mode(std::string_view s) {
  if (s == "centered") return WindowMode::centered;
  if (s == "causal") return WindowMode::causal;
  throw UsageError("unknown window mode '" + std::string(s) + "' (expected centered or causal)");
}

inline const char* to_string(WindowMode m) { return m == WindowMode::centered ? "centered" : "causal"; }

struct GridConfig {
  double cell_size = 0.10;    // m
  double half_extent = 25.0;  // m
  double window_tau = 1.0;    // s
  WindowMode window_mode = WindowMode::centered;

  void validate() const {
    if (!(cell_size > 0.0)) throw DomainError("cell size must be > 0");
    if (!(half_extent >= cell_size)) throw DomainError("half extent must be >= cell size");
    if (!(window_tau > 0.0)) throw DomainError("window tau must be > 0");
  }
};

/// Closed time interval.
struct TimeWindow {
  double begin = 0.0;
  double end = 0.0;

  bool contains(double t) const { return t >= begin && t <= end; }
};

inline TimeWindow make_window(double t, const GridConfig& cfg) {
  if (cfg.window_mode == WindowMode::centered) return {t - cfg.window_tau / 2.0, t + cfg.window_tau / 2.0};
  return {t - cfg.window_tau, t};
}

struct CellIndex {
  int x = 0;
  int y = 0;

  friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

/// Axis-aligned lattice of square cells; cell (i, j) spans
/// [min + i*cs, min + (i+1)*cs) on each axis.
class GridGeometry {
 public:
  GridGeometry(Vec2 min_corner, double cell_size, int nx, int ny)
      : min_(std::move(min_corner)), cell_(cell_size), nx_(nx), ny_(ny) {
    if (!(cell_size > 0.0) || nx <= 0 || ny <= 0) throw DomainError("degenerate grid geometry");
  }

  /// Square grid of ceil(2 * half_extent / cell_size) cells per axis centered
  /// on `origin`.
  static GridGeometry centered(const Vec2& origin, double cell_size, double half_extent) {
    const int n = static_cast<int>(std::ceil(2.0 * half_extent / cell_size - 1e-9));
    const double side = n * cell_size;
    return GridGeometry(origin - Vec2(side / 2.0, side / 2.0), cell_size, n, n);
  }

  const Vec2& min_corner() const { return min_; }
  Vec2 max_corner() const { return min_ + Vec2(nx_ * cell_, ny_ * cell_); }
  Vec2 center() const { return min_ + Vec2(nx_ * cell_ / 2.0, ny_ * cell_ / 2.0); }
  double cell_size() const { return cell_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  std::size_t cell_count() const { return static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_); }

  bool contains(CellIndex c) const { return c.x >= 0 && c.y >= 0 && c.x < nx_ && c.y < ny_; }
  bool contains_point(const Vec2& p) const { return contains(cell_of(p)); }

  std::size_t linear(CellIndex c) const {
    return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(c.x);
  }
  CellIndex unlinear(std::size_t i) const {
    return {static_cast<int>(i % static_cast<std::size_t>(nx_)), static_cast<int>(i / static_cast<std::size_t>(nx_))};
  }

  CellIndex cell_of(const Vec2& p) const {
    return {static_cast<int>(std::floor((p.x() - min_.x()) / cell_)),
            static_cast<int>(std::floor((p.y() - min_.y()) / cell_))};
  }

  Vec2 cell_center(CellIndex c) const {
    return min_ + Vec2((c.x + 0.5) * cell_, (c.y + 0.5) * cell_);
  }

  bool same_as(const GridGeometry& o) const {
    return min_ == o.min_ && cell_ == o.cell_ && nx_ == o.nx_ && ny_ == o.ny_;
  }

 private:
  Vec2 min_;
  double cell_;
  int nx_;
  int ny_;
};

enum class CellEvent { pass, hit };

namespace detail {

// Index of the cell the open segment occupies right after leaving coordinate
// u (in cell units) with direction sign `dir`.
inline int start_index(double u, double dir) {
  double f = std::floor(u);
  if (dir < 0.0 && f == u) f -= 1.0;
  return static_cast<int>(f);
}

// Index of the cell the open segment occupies right before arriving at u.
inline int end_index(double u, double dir) {
  double f = std::floor(u);
  if (dir > 0.0 && f == u) f -= 1.0;
  return static_cast<int>(f);
}

}  // namespace detail

/// Amanatides-Woo traversal of the segment a -> b over `grid`.
///
/// Calls visit(cell, t_in, t_out, event) for every in-grid cell whose interior
/// the open segment crosses, in order. t is the distance from `a` in meters.
/// The last cell (the one containing b, approached along the ray) is reported
/// as CellEvent::hit with t_out set to where the beam would have left it had
/// it continued. Segments starting outside the grid are clipped to it.
/// Returns true iff the hit cell lies inside the grid.
template <class Visitor>
bool walk_segment(const GridGeometry& grid, const Vec2& a, const Vec2& b, Visitor&& visit) {
  const Vec2 d = b - a;
  const double len = d.norm();
  const double cs = grid.cell_size();
  const Vec2& lo = grid.min_corner();
  if (len == 0.0) {
    const CellIndex c = grid.cell_of(a);
    if (!grid.contains(c)) return false;
    visit(c, 0.0, 0.0, CellEvent::hit);
    return true;
  }
  const Vec2 dir = d / len;

  // Clip the start to the grid rectangle (slab test).
  double t_enter = 0.0;
  const Vec2 hi = grid.max_corner();
  for (int ax = 0; ax < 2; ++ax) {
    if (dir[ax] == 0.0) {
      if (a[ax] < lo[ax] || a[ax] >= hi[ax]) return false;
      continue;
    }
    double t0 = (lo[ax] - a[ax]) / dir[ax];
    double t1 = (hi[ax] - a[ax]) / dir[ax];
    if (t0 > t1) std::swap(t0, t1);
    t_enter = std::max(t_enter, t0);
    if (t1 <= 0.0) return false;
  }
  if (t_enter > len) return false;

  const Vec2 start = t_enter > 0.0 ? Vec2(a + dir * t_enter) : a;
  const Vec2 su = (start - lo) / cs;
  const Vec2 eu = (b - lo) / cs;
  int ix = detail::start_index(su.x(), dir.x());
  int iy = detail::start_index(su.y(), dir.y());
  if (t_enter > 0.0) {
    ix = std::clamp(ix, 0, grid.nx() - 1);
    iy = std::clamp(iy, 0, grid.ny() - 1);
  }
  int ex = detail::end_index(eu.x(), dir.x());
  int ey = detail::end_index(eu.y(), dir.y());
  // Rounding can put the end behind the start on a nearly stationary axis.
  if (dir.x() > 0.0) ex = std::max(ex, ix);
  if (dir.x() < 0.0) ex = std::min(ex, ix);
  if (dir.x() == 0.0) ex = ix;
  if (dir.y() > 0.0) ey = std::max(ey, iy);
  if (dir.y() < 0.0) ey = std::min(ey, iy);
  if (dir.y() == 0.0) ey = iy;

  constexpr double kInf = std::numeric_limits<double>::infinity();
  const int step_x = dir.x() > 0.0 ? 1 : -1;
  const int step_y = dir.y() > 0.0 ? 1 : -1;
  auto boundary_t = [&](int i, int ax, double di) {
    if (di == 0.0) return kInf;
    const double edge = lo[ax] + (di > 0.0 ? i + 1 : i) * cs;
    return (edge - a[ax]) / di;
  };
  double t_max_x = boundary_t(ix, 0, dir.x());
  double t_max_y = boundary_t(iy, 1, dir.y());
  const double t_delta_x = dir.x() == 0.0 ? kInf : cs / std::abs(dir.x());
  const double t_delta_y = dir.y() == 0.0 ? kInf : cs / std::abs(dir.y());
  int rem_x = std::abs(ex - ix);
  int rem_y = std::abs(ey - iy);

  double t_in = t_enter;
  CellIndex cell{ix, iy};
  while (rem_x + rem_y > 0) {
    if (!grid.contains(cell)) return false;
    const bool along_x = rem_y == 0 || (rem_x != 0 && t_max_x <= t_max_y);
    double t_out = along_x ? t_max_x : t_max_y;
    t_out = std::clamp(t_out, t_in, len);
    visit(cell, t_in, t_out, CellEvent::pass);
    t_in = t_out;
    if (along_x) {
      cell.x += step_x;
      t_max_x += t_delta_x;
      --rem_x;
    } else {
      cell.y += step_y;
      t_max_y += t_delta_y;
      --rem_y;
    }
  }
  if (!grid.contains(cell)) return false;
  const double t_exit = std::max(std::min(t_max_x, t_max_y), len);
  visit(cell, t_in, t_exit, CellEvent::hit);
  return true;
}

struct Traversal {
  std::vector<CellIndex> pass_cells;
  std::optional<CellIndex> hit_cell;
};

/// Cells crossed by the 2-D ray origin -> endpoint. The origin must lie in the
/// grid; an endpoint outside it yields the clipped pass list and no hit cell.
inline Traversal traverse(const GridGeometry& grid, const Vec2& origin, const Vec2& endpoint) {
  if (!grid.contains_point(origin)) throw DomainError("ray origin outside grid");
  Traversal out;
  const bool inside = walk_segment(grid, origin, endpoint, [&](CellIndex c, double, double, CellEvent e) {
    if (e == CellEvent::pass) {
      out.pass_cells.push_back(c);
    } else {
      out.hit_cell = c;
    }
  });
  if (!inside) out.hit_cell.reset();
  return out;
}

/// One beam projected into the horizontal plane, world frame.
struct Ray2 {
  Vec2 origin;
  Vec2 endpoint;
};

/// Keeps points with sensor-frame z in [-h, +h] (closed) and non-zero range;
/// returns world-frame 2-D rays from the sensor to each kept point.
inline std::vector<Ray2> strip_project(const Scan& scan, const BeamModel& beam) {
  std::vector<Ray2> rays;
  rays.reserve(scan.points.size());
  const Vec2 o = scan.sensor_pose.translation().head<2>();
  const double h = beam.strip_half_height;
  for (const auto& p : scan.points) {
    if (!(p.z >= -h && p.z <= h)) continue;
    if (p.x == 0.0f && p.y == 0.0f && p.z == 0.0f) continue;
    const Vec3 w = scan.sensor_pose * p.position();
    rays.push_back({o, w.head<2>()});
  }
  return rays;
}

/// Exposure is stored as integer multiples of this area (m^2) so that merging
/// private grids is exact and order-independent.
inline constexpr double kExposureQuantum = 1e-12;

class DensityGrid {
 public:
  DensityGrid(GridGeometry geometry, TimeWindow window)
      : geom_(std::move(geometry)),
        window_(window),
        h_(geom_.cell_count(), 0),
        m_(geom_.cell_count(), 0),
        exposure_(geom_.cell_count(), 0) {}

  static DensityGrid centered(const Vec2& origin, const GridConfig& cfg, TimeWindow window) {
    cfg.validate();
    return DensityGrid(GridGeometry::centered(origin, cfg.cell_size, cfg.half_extent), window);
  }

  const GridGeometry& geometry() const { return geom_; }
  const TimeWindow& window() const { return window_; }
  /// World position of the grid center (the sensor position at query time).
  Vec2 origin() const { return geom_.center(); }

  std::span<const std::uint32_t> hits() const { return h_; }
  std::span<const std::uint32_t> passes() const { return m_; }
  std::span<const std::int64_t> exposure_quanta() const { return exposure_; }

  std::uint32_t hits(CellIndex c) const { return h_[geom_.linear(c)]; }
  std::uint32_t passes(CellIndex c) const { return m_[geom_.linear(c)]; }
  double exposure(CellIndex c) const {
    return static_cast<double>(exposure_[geom_.linear(c)]) * kExposureQuantum;
  }

  void record(std::size_t cell, CellEvent event, double swept_area) {
    if (event == CellEvent::hit) {
      ++h_[cell];
    } else {
      ++m_[cell];
    }
    // Swept areas are non-negative, so truncating x + 0.5 rounds to nearest.
    exposure_[cell] += static_cast<std::int64_t>(swept_area * (1.0 / kExposureQuantum) + 0.5);
  }

  /// Cell-wise addition; geometries must match.
  void merge(const DensityGrid& other) {
    if (!geom_.same_as(other.geom_)) throw UsageError("cannot merge grids with different geometry");
    for (std::size_t i = 0; i < h_.size(); ++i) {
      h_[i] += other.h_[i];
      m_[i] += other.m_[i];
      exposure_[i] += other.exposure_[i];
    }
    window_.begin = std::min(window_.begin, other.window_.begin);
    window_.end = std::max(window_.end, other.window_.end);
  }

  bool same_counts(const DensityGrid& o) const {
    return geom_.same_as(o.geom_) && h_ == o.h_ && m_ == o.m_ && exposure_ == o.exposure_;
  }

  /// Raw arrays, for deserialization.
  std::vector<std::uint32_t>& mutable_hits() { return h_; }
  std::vector<std::uint32_t>& mutable_passes() { return m_; }
  std::vector<std::int64_t>& mutable_exposure() { return exposure_; }

 private:
  GridGeometry geom_;
  TimeWindow window_;
  std::vector<std::uint32_t> h_;
  std::vector<std::uint32_t> m_;
  std::vector<std::int64_t> exposure_;
};

struct AccumulateStats {
  std::size_t rays = 0;          // strip rays traversed
  std::size_t hits_in_grid = 0;  // rays whose endpoint landed in the grid

  AccumulateStats& operator+=(const AccumulateStats& o) {
    rays += o.rays;
    hits_in_grid += o.hits_in_grid;
    return *this;
  }
};

/// Adds one ray: m += 1 on every pass cell, h += 1 on the endpoint cell.
inline bool accumulate_ray(DensityGrid& grid, const Ray2& ray, double alpha) {
  const GridGeometry& g = grid.geometry();
  return walk_segment(g, ray.origin, ray.endpoint, [&](CellIndex c, double t_in, double t_out, CellEvent e) {
    grid.record(g.linear(c), e, 0.5 * alpha * (t_out * t_out - t_in * t_in));
  });
}

/// Adds every strip ray of `scan`. The scan must fall inside the grid window.
inline AccumulateStats accumulate(DensityGrid& grid, const Scan& scan, const BeamModel& beam) {
  if (!grid.window().contains(scan.timestamp)) {
    throw WindowError(WindowError::Kind::outside_window,
                      "scan at t=" + format_float(scan.timestamp) + " outside grid window [" +
                          format_float(grid.window().begin) + ", " + format_float(grid.window().end) + "]");
  }
  AccumulateStats stats;
  for (const auto& ray : strip_project(scan, beam)) {
    ++stats.rays;
    if (accumulate_ray(grid, ray, beam.aperture_alpha)) ++stats.hits_in_grid;
  }
  return stats;
}

/// Accumulates disjoint scan subsets into private grids on `threads` workers
/// and merges them. Bit-identical to sequential accumulation.
inline AccumulateStats accumulate_parallel(DensityGrid& grid, std::span<const Scan> scans,
                                           const BeamModel& beam, unsigned threads) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(scans.size())));
  std::vector<DensityGrid> partial(threads, DensityGrid(grid.geometry(), grid.window()));
  std::vector<AccumulateStats> stats(threads);
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> workers;
    for (unsigned w = 0; w < threads; ++w) {
      workers.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < scans.size(); i += threads) stats[w] += accumulate(partial[w], scans[i], beam);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  AccumulateStats total;
  for (unsigned w = 0; w < threads; ++w) {
    grid.merge(partial[w]);
    total += stats[w];
  }
  return total;
}

namespace detail {

inline Vec2 sensor_position_at(std::span<const Scan> scans, double t, const Trajectory* trajectory) {
  if (trajectory && trajectory->covers(t)) return trajectory->pose_at(t).translation().head<2>();
  // Bracketing scans, clamped to the nearest one at the ends.
  const Scan* before = nullptr;
  const Scan* after = nullptr;
  for (const auto& s : scans) {
    if (s.timestamp <= t && (!before || s.timestamp > before->timestamp)) before = &s;
    if (s.timestamp >= t && (!after || s.timestamp < after->timestamp)) after = &s;
  }
  if (!before && !after) return Vec2::Zero();
  if (!before) return after->sensor_position().head<2>();
  if (!after || after->timestamp == before->timestamp) return before->sensor_position().head<2>();
  const double s = (t - before->timestamp) / (after->timestamp - before->timestamp);
  const Vec2 a = before->sensor_position().head<2>();
  const Vec2 b = after->sensor_position().head<2>();
  return a + s * (b - a);
}

}  // namespace detail

/// Grid of all scans whose timestamp lies in the (closed) window around `t`,
/// centered on the sensor position at `t`.
inline DensityGrid window_field(std::span<const Scan> scans, double t, const GridConfig& cfg,
                                const BeamModel& beam, const Trajectory* trajectory = nullptr) {
  cfg.validate();
  beam.validate();
  const TimeWindow window = make_window(t, cfg);
  DensityGrid grid = DensityGrid::centered(detail::sensor_position_at(scans, t, trajectory), cfg, window);
  std::size_t used = 0;
  AccumulateStats stats;
  for (const auto& s : scans) {
    if (!window.contains(s.timestamp)) continue;
    ++used;
    stats += accumulate(grid, s, beam);
  }
  if (used == 0) {
    throw WindowError(WindowError::Kind::no_scans, "no scans in window around t=" + format_float(t));
  }
  if (stats.rays == 0) {
    throw WindowError(WindowError::Kind::no_strip_points,
                      "all points outside the z-strip in window around t=" + format_float(t));
  }
  return grid;
}

class DensityField {
 public:
  DensityField(GridGeometry geometry, std::vector<double> lambda, std::vector<std::uint32_t> h,
               std::vector<std::uint32_t> m)
      : geom_(std::move(geometry)), lambda_(std::move(lambda)), h_(std::move(h)), m_(std::move(m)) {}

  const GridGeometry& geometry() const { return geom_; }
  std::size_t size() const { return lambda_.size(); }
  bool observed(std::size_t i) const { return !std::isnan(lambda_[i]); }
  /// Flakes per m^2; NaN where unobserved.
  double lambda(std::size_t i) const { return lambda_[i]; }
  std::uint32_t hits(std::size_t i) const { return h_[i]; }
  std::uint32_t passes(std::size_t i) const { return m_[i]; }
  /// Observation count h + m.
  std::uint64_t weight(std::size_t i) const { return std::uint64_t{h_[i]} + m_[i]; }
  std::span<const double> lambdas() const { return lambda_; }

 private:
  GridGeometry geom_;
  std::vector<double> lambda_;
  std::vector<std::uint32_t> h_;
  std::vector<std::uint32_t> m_;
};

/// ln(1 + h/m) / area, with m clamped to 1 when the cell was hit but never
/// crossed.
inline double poisson_density(std::uint64_t h, std::uint64_t m, double area) {
  if (h == 0) return 0.0;
  const double ratio = m > 0 ? static_cast<double>(h) / static_cast<double>(m) : static_cast<double>(h);
  return std::log1p(ratio) / area;
}

inline DensityField estimate_density(const DensityGrid& grid, const BeamModel& beam) {
  beam.validate();
  const auto h = grid.hits();
  const auto m = grid.passes();
  const auto e = grid.exposure_quanta();
  std::vector<double> lambda(h.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < h.size(); ++i) {
    const std::uint64_t n = std::uint64_t{h[i]} + m[i];
    if (n == 0) continue;
    double area = beam.collision_area;
    if (beam.exposure == ExposureModel::sector) {
      if (e[i] <= 0) continue;  // only degenerate zero-length crossings
      area = static_cast<double>(e[i]) * kExposureQuantum / static_cast<double>(n);
    }
    lambda[i] = poisson_density(h[i], m[i], area);
  }
  return DensityField(grid.geometry(), std::move(lambda), {h.begin(), h.end()}, {m.begin(), m.end()});
}

// ---------------------------------------------------------------------------
// Export

/// Observed cells only: cell_x_index, cell_y_index, center_x, center_y, h, m,
/// lambda.
inline CsvTable field_table(const DensityField& field) {
  CsvTable t{{"cell_x_index", "cell_y_index", "center_x", "center_y", "h", "m", "lambda"}, {}};
  const auto& g = field.geometry();
  for (std::size_t i = 0; i < field.size(); ++i) {
    if (!field.observed(i)) continue;
    const CellIndex c = g.unlinear(i);
    const Vec2 ctr = g.cell_center(c);
    t.rows.push_back({std::int64_t{c.x}, std::int64_t{c.y}, ctr.x(), ctr.y(), std::int64_t{field.hits(i)},
                      std::int64_t{field.passes(i)}, field.lambda(i)});
  }
  return t;
}

namespace detail {

inline constexpr char kGridMagic[4] = {'S', 'N', 'V', 'G'};

template <class T>
void put_le(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  out.append(buf, sizeof(T));
}

template <class T>
T get_le(std::string_view bytes, std::size_t& pos) {
  if (bytes.size() - pos < sizeof(T)) throw ParseError("grid dump truncated", bytes.size());
  char buf[sizeof(T)];
  std::memcpy(buf, bytes.data() + pos, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  pos += sizeof(T);
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

}  // namespace detail

/// Binary dump, little-endian:
///   "SNVG" u32 version=1 | f64 min_x min_y cell_size | u32 nx ny |
///   f64 window_begin window_end | u32 h[nx*ny] | u32 m[nx*ny] | i64 exposure[nx*ny]
inline std::string serialize_grid(const DensityGrid& grid) {
  const auto& g = grid.geometry();
  std::string out(detail::kGridMagic, 4);
  detail::put_le<std::uint32_t>(out, 1);
  detail::put_le(out, g.min_corner().x());
  detail::put_le(out, g.min_corner().y());
  detail::put_le(out, g.cell_size());
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.nx()));
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.ny()));
  detail::put_le(out, grid.window().begin);
  detail::put_le(out, grid.window().end);
  for (auto v : grid.hits()) detail::put_le(out, v);
  for (auto v : grid.passes()) detail::put_le(out, v);
  for (auto v : grid.exposure_quanta()) detail::put_le(out, v);
  return out;
}

inline DensityGrid deserialize_grid(std::string_view bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), detail::kGridMagic, 4) != 0) {
    throw ParseError("not a density grid dump", 0);
  }
  std::size_t pos = 4;
  if (detail::get_le<std::uint32_t>(bytes, pos) != 1) throw ParseError("unsupported grid dump version", 4);
  const double mx = detail::get_le<double>(bytes, pos);
  const double my = detail::get_le<double>(bytes, pos);
  const double cs = detail::get_le<double>(bytes, pos);
  const auto nx = detail::get_le<std::uint32_t>(bytes, pos);
  const auto ny = detail::get_le<std::uint32_t>(bytes, pos);
  TimeWindow w;
  w.begin = detail::get_le<double>(bytes, pos);
  w.end = detail::get_le<double>(bytes, pos);
  DensityGrid grid(GridGeometry(Vec2(mx, my), cs, static_cast<int>(nx), static_cast<int>(ny)), w);
  for (auto& v : grid.mutable_hits()) v = detail::get_le<std::uint32_t>(bytes, pos);
  for (auto& v : grid.mutable_passes()) v = detail::get_le<std::uint32_t>(bytes, pos);
  for (auto& v : grid.mutable_exposure()) v = detail::get_le<std::int64_t>(bytes, pos);
  return grid;
}

inline void write_grid(const DensityGrid& grid, const std::filesystem::path& path) {
  atomic_write_file(path, serialize_grid(grid));
}

inline DensityGrid read_grid(const std::filesystem::path& path) { return deserialize_grid(read_file(path)); }

}  // namespace snowvis

#endif  // SNOWVIS_DENSITY_GRID_HPP

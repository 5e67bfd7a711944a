// Copyright 2026 The snowvis Authors
// SPDX-License-Identifier: Apache-2.0
//
// p-visibility: the distance at which a lidar beam, sweeping a sector of area
// d^2 * alpha / 2 through a Poisson field of mean density lambda_bar, reaches
// an object with probability p:
//
//     P(object | d) = exp(-lambda_bar * d^2 * alpha / 2)
//     V_p           = sqrt(-2 ln p / (lambda_bar * alpha))
//
// This is the meteorological contrast law C = exp(-sigma * r) with
// sigma = lambda_bar and r = swept area.

#ifndef SNOWVIS_VISIBILITY_HPP
#define SNOWVIS_VISIBILITY_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "snowvis/csv.hpp"
#include "snowvis/density_grid.hpp"
#include "snowvis/errors.hpp"
#include "snowvis/pointcloud_io.hpp"

namespace snowvis {

enum class Weighting { observation, uniform };

inline Weighting parse_weighting(std::string_view s) {
  if (s == "observation") return Weighting::observation;
  if (s == "uniform") return Weighting::uniform;
  throw UsageError("unknown weighting '" + std::string(s) + "' (expected observation or uniform)");
}

inline const char* to_string(Weighting w) { return w == Weighting::observation ? "observation" : "uniform"; }

struct MeanDensityOptions {
  double radius = 5.0;  // m
  Weighting weighting = Weighting::observation;
  // Drop cells whose hit ratio h/(h+m) exceeds the threshold (static
  // structure rather than snow).
  bool exclude_persistent = false;
  double persistent_hit_ratio = 0.95;
};

struct MeanDensity {
  double lambda_bar = 0.0;
  std::size_t observed_cells = 0;
  double total_weight = 0.0;
  bool no_snow = false;  // every contributing cell had lambda = 0
};

/// Weighted mean of lambda over observed cells whose centers lie within
/// `radius` of `center`. Throws EstimationError when no cell qualifies.
inline MeanDensity mean_density(const DensityField& field, const Vec2& center,
                                const MeanDensityOptions& opts = {}) {
  if (!(opts.radius > 0.0)) throw DomainError("averaging radius must be > 0");
  const GridGeometry& g = field.geometry();
  const CellIndex lo = g.cell_of(center - Vec2(opts.radius, opts.radius));
  const CellIndex hi = g.cell_of(center + Vec2(opts.radius, opts.radius));
  const double r2 = opts.radius * opts.radius;
  MeanDensity out;
  double acc = 0.0;
  bool any_snow = false;
  for (int y = std::max(lo.y, 0); y <= std::min(hi.y, g.ny() - 1); ++y) {
    for (int x = std::max(lo.x, 0); x <= std::min(hi.x, g.nx() - 1); ++x) {
      const CellIndex c{x, y};
      if ((g.cell_center(c) - center).squaredNorm() > r2) continue;
      const std::size_t i = g.linear(c);
      if (!field.observed(i)) continue;
      const double n = static_cast<double>(field.weight(i));
      if (opts.exclude_persistent && field.hits(i) / n > opts.persistent_hit_ratio) continue;
      const double w = opts.weighting == Weighting::observation ? n : 1.0;
      acc += w * field.lambda(i);
      out.total_weight += w;
      ++out.observed_cells;
      any_snow = any_snow || field.lambda(i) > 0.0;
    }
  }
  if (out.observed_cells == 0) throw EstimationError("no observed cell within averaging radius");
  out.no_snow = !any_snow;
  out.lambda_bar = any_snow ? acc / out.total_weight : 0.0;
  return out;
}

/// Meteorological apparent contrast exp(-sigma * r).
inline double apparent_contrast(double sigma, double r) { return std::exp(-sigma * r); }

/// Swept sector area of a beam of aperture alpha over distance d.
inline double sector_area(double d, double alpha) { return 0.5 * d * d * alpha; }

/// exp(-lambda_bar * d^2 * alpha / 2), i.e. the contrast law with
/// sigma = lambda_bar and r = sector_area(d, alpha).
inline double detection_probability(double lambda_bar, double alpha, double d) {
  if (!(lambda_bar >= 0.0)) throw DomainError("density must be >= 0");
  if (!(alpha > 0.0)) throw DomainError("aperture must be > 0");
  if (!(d >= 0.0)) throw DomainError("distance must be >= 0");
  return apparent_contrast(lambda_bar, sector_area(d, alpha));
}

/// Distance at which detection_probability drops to p; nullopt when
/// lambda_bar = 0 (unbounded visibility).
inline std::optional<double> p_visibility(double lambda_bar, double alpha, double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("p must lie in (0, 1)");
  if (!(alpha > 0.0)) throw DomainError("aperture must be > 0");
  if (!(lambda_bar >= 0.0)) throw DomainError("density must be >= 0");
  if (lambda_bar == 0.0) return std::nullopt;
  return std::sqrt(-2.0 * std::log(p) / (lambda_bar * alpha));
}

enum class VisibilityStatus { ok, unbounded, no_scans, no_strip_points, no_observed_cells };

inline const char* to_string(VisibilityStatus s) {
  switch (s) {
    case VisibilityStatus::ok: return "ok";
    case VisibilityStatus::unbounded: return "unbounded";
    case VisibilityStatus::no_scans: return "gap_no_scans";
    case VisibilityStatus::no_strip_points: return "gap_no_strip_points";
    case VisibilityStatus::no_observed_cells: return "gap_no_observed";
  }
  return "?";
}

inline VisibilityStatus parse_visibility_status(std::string_view s) {
  for (auto v : {VisibilityStatus::ok, VisibilityStatus::unbounded, VisibilityStatus::no_scans,
                 VisibilityStatus::no_strip_points, VisibilityStatus::no_observed_cells}) {
    if (s == to_string(v)) return v;
  }
  throw UsageError("unknown visibility flag '" + std::string(s) + "'");
}

struct VisibilityEstimate {
  double t = 0.0;
  std::optional<double> lambda_bar;  // absent for gaps
  double p = 0.5;
  double alpha = 0.0;
  std::optional<double> v_p;  // absent when unbounded or a gap
  double averaging_radius = 5.0;
  std::size_t n_observed_cells = 0;
  VisibilityStatus status = VisibilityStatus::ok;

  bool is_gap() const { return status != VisibilityStatus::ok && status != VisibilityStatus::unbounded; }
};

struct VisibilityOptions {
  double p = 0.5;
  MeanDensityOptions mean;
  double step = 1.0;  // s, timeseries spacing
};

/// One estimate at time t: window -> density -> local mean -> V_p. Empty
/// windows come back as gap markers.
inline VisibilityEstimate visibility_at(std::span<const Scan> scans, double t, const GridConfig& cfg,
                                        const BeamModel& beam, const VisibilityOptions& opts,
                                        const Trajectory* trajectory = nullptr) {
  VisibilityEstimate est;
  est.t = t;
  est.p = opts.p;
  est.alpha = beam.aperture_alpha;
  est.averaging_radius = opts.mean.radius;
  try {
    const DensityGrid grid = window_field(scans, t, cfg, beam, trajectory);
    const DensityField field = estimate_density(grid, beam);
    const MeanDensity md = mean_density(field, grid.origin(), opts.mean);
    est.lambda_bar = md.lambda_bar;
    est.n_observed_cells = md.observed_cells;
    est.v_p = p_visibility(md.lambda_bar, beam.aperture_alpha, opts.p);
    est.status = est.v_p ? VisibilityStatus::ok : VisibilityStatus::unbounded;
  } catch (const WindowError& e) {
    est.status = e.kind() == WindowError::Kind::no_strip_points ? VisibilityStatus::no_strip_points
                                                                : VisibilityStatus::no_scans;
  } catch (const EstimationError&) {
    est.status = VisibilityStatus::no_observed_cells;
  }
  return est;
}

/// Estimates every `opts.step` seconds across the span covered by both the
/// scans and (if given) the trajectory.
inline std::vector<VisibilityEstimate> visibility_timeseries(std::span<const Scan> scans,
                                                             const Trajectory* trajectory,
                                                             const GridConfig& cfg, const BeamModel& beam,
                                                             const VisibilityOptions& opts) {
  if (!(opts.step > 0.0)) throw DomainError("step must be > 0");
  if (!(opts.p > 0.0 && opts.p < 1.0)) throw DomainError("p must lie in (0, 1)");
  if (scans.empty()) throw WindowError(WindowError::Kind::no_scans, "no scans");
  auto [lo_it, hi_it] = std::minmax_element(scans.begin(), scans.end(), [](const Scan& a, const Scan& b) {
    return a.timestamp < b.timestamp;
  });
  double t0 = lo_it->timestamp;
  double t1 = hi_it->timestamp;
  if (trajectory && !trajectory->empty()) {
    t0 = std::max(t0, trajectory->start_time());
    t1 = std::min(t1, trajectory->end_time());
  }
  if (t1 < t0) throw EstimationError("scans and trajectory do not overlap");
  std::vector<VisibilityEstimate> out;
  for (std::size_t k = 0;; ++k) {
    const double t = t0 + static_cast<double>(k) * opts.step;
    if (t > t1 + 1e-9 * opts.step) break;
    out.push_back(visibility_at(scans, t, cfg, beam, opts, trajectory));
  }
  return out;
}

/// t, lambda_bar, v_p, n_observed_cells, flag. Unbounded visibility leaves v_p
/// empty.
inline CsvTable visibility_table(std::span<const VisibilityEstimate> series) {
  CsvTable table{{"t", "lambda_bar", "v_p", "n_observed_cells", "flag"}, {}};
  for (const auto& e : series) {
    table.rows.push_back({e.t, e.lambda_bar ? CsvCell(*e.lambda_bar) : CsvCell{},
                          e.v_p ? CsvCell(*e.v_p) : CsvCell{}, static_cast<std::int64_t>(e.n_observed_cells),
                          std::string(to_string(e.status))});
  }
  return table;
}

inline std::vector<VisibilityEstimate> parse_visibility_csv(const CsvText& csv) {
  const auto c_t = csv.column("t");
  const auto c_l = csv.column("lambda_bar");
  const auto c_v = csv.column("v_p");
  const auto c_n = csv.column("n_observed_cells");
  const auto c_f = csv.column("flag");
  if (!c_t || !c_v || !c_f) throw UsageError("visibility csv needs t, v_p and flag columns");
  std::vector<VisibilityEstimate> out;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& row = csv.rows[r];
    if (row.size() != csv.header.size()) throw UsageError("visibility csv row " + std::to_string(r + 1) + ": arity");
    VisibilityEstimate e;
    auto t = parse_double(row[*c_t]);
    if (!t) throw UsageError("visibility csv row " + std::to_string(r + 1) + ": bad t");
    e.t = *t;
    if (c_l) e.lambda_bar = parse_double(row[*c_l]);
    e.v_p = parse_double(row[*c_v]);
    if (c_n) e.n_observed_cells = static_cast<std::size_t>(parse_double(row[*c_n]).value_or(0.0));
    e.status = parse_visibility_status(row[*c_f]);
    out.push_back(e);
  }
  return out;
}

}  // namespace snowvis

#endif  // SNOWVIS_VISIBILITY_HPP

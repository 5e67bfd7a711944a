// Copyright 2026 The snowvis Authors
// SPDX-License-Identifier: Apache-2.0
//
// Windowed relative pose error and its correlation with visibility.
//
// For a window of duration w starting at ground-truth time t:
//
//     D_gt  = gt(t)^-1  * gt(t + w)
//     D_est = est(t)^-1 * est(t + w)
//     E     = D_gt^-1 * D_est
//
// The translational error is |trans(E)| in meters and, as a percentage, is
// divided by the ground-truth distance traveled during the window. Windows in
// which the ground truth barely moves are excluded, not clamped.

#ifndef SNOWVIS_EVALUATION_HPP
#define SNOWVIS_EVALUATION_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "snowvis/csv.hpp"
#include "snowvis/errors.hpp"
#include "snowvis/filter_mask.hpp"
#include "snowvis/geometry.hpp"
#include "snowvis/pointcloud_io.hpp"
#include "snowvis/visibility.hpp"

namespace snowvis {

/// Linear-interpolation quantile (R type 7) of unsorted values.
inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw EstimationError("quantile of empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile level must lie in [0, 1]");
  std::sort(v.begin(), v.end());
  const double h = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

struct Quartiles {
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
};

inline Quartiles quartiles(const std::vector<double>& v) {
  return {quantile(v, 0.25), quantile(v, 0.5), quantile(v, 0.75)};
}

// ---------------------------------------------------------------------------
// Relative pose error

enum class RpeNormalizer { path_length, displacement };

inline RpeNormalizer parse_rpe_normalizer(std::string_view s) {
  if (s == "path_length") return RpeNormalizer::path_length;
  if (s == "displacement") return RpeNormalizer::displacement;
  throw UsageError("unknown normalizer '" + std::string(s) + "' (expected path_length or displacement)");
}

inline const char* to_string(RpeNormalizer n) {
  return n == RpeNormalizer::path_length ? "path_length" : "displacement";
}

struct RpeOptions {
  double window = 1.0;                  // s
  double association_tolerance = 0.05;  // s
  double min_travel = 0.1;              // m
  RpeNormalizer normalizer = RpeNormalizer::path_length;

  void validate() const {
    if (!(window > 0.0)) throw DomainError("rpe window must be > 0");
    if (!(association_tolerance >= 0.0)) throw DomainError("association tolerance must be >= 0");
    if (!(min_travel > 0.0)) throw DomainError("minimum travel must be > 0");
  }
};

struct RpeEntry {
  double t = 0.0;
  double span = 0.0;    // actual gt time span of the window
  double travel = 0.0;  // normalizer, m
  double trans_error = 0.0;  // m
  double trans_percent = 0.0;
  double rot_error_deg = 0.0;
};

struct RpeResult {
  std::vector<RpeEntry> entries;  // ascending t
  std::size_t excluded = 0;       // windows below the travel floor
  std::optional<Quartiles> summary;
};

namespace detail {

inline std::optional<std::size_t> associate(const Trajectory& traj, double t, double tol) {
  const std::size_t i = traj.nearest_index(t);
  if (std::abs(traj.poses()[i].t - t) <= tol) return i;
  return std::nullopt;
}

inline double rotation_angle_deg(const Eigen::Matrix3d& r) {
  const double c = std::clamp((r.trace() - 1.0) / 2.0, -1.0, 1.0);
  return rad2deg(std::acos(c));
}

}  // namespace detail

inline RpeResult relative_pose_error(const Trajectory& gt, const Trajectory& est, const RpeOptions& opts = {}) {
  opts.validate();
  if (gt.empty() || est.empty()) throw EstimationError("empty trajectory");
  const double overlap_begin = std::max(gt.start_time(), est.start_time());
  const double overlap_end = std::min(gt.end_time(), est.end_time());
  if (overlap_end - overlap_begin < opts.window - opts.association_tolerance) {
    throw EstimationError("trajectories overlap less than one window");
  }
  const auto& g = gt.poses();
  const auto& e = est.poses();
  const double tol = opts.association_tolerance;

  RpeResult out;
  bool any_pair = false;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double t0 = g[i].t;
    const auto j = detail::associate(gt, t0 + opts.window, tol);
    if (!j || *j <= i) continue;
    const auto a = detail::associate(est, t0, tol);
    const auto b = detail::associate(est, g[*j].t, tol);
    if (!a || !b) continue;
    any_pair = true;

    const Pose d_gt = g[i].pose.inverse() * g[*j].pose;
    const Pose d_est = e[*a].pose.inverse() * e[*b].pose;
    const Pose err = d_gt.inverse() * d_est;

    double travel = 0.0;
    if (opts.normalizer == RpeNormalizer::path_length) {
      for (std::size_t k = i; k < *j; ++k) travel += (g[k + 1].pose.translation() - g[k].pose.translation()).norm();
    } else {
      travel = d_gt.translation().norm();
    }
    if (travel < opts.min_travel) {
      ++out.excluded;
      continue;
    }
    RpeEntry entry;
    entry.t = t0;
    entry.span = g[*j].t - t0;
    entry.travel = travel;
    entry.trans_error = err.translation().norm();
    entry.trans_percent = 100.0 * entry.trans_error / travel;
    entry.rot_error_deg = detail::rotation_angle_deg(err.linear());
    out.entries.push_back(entry);
  }
  if (!any_pair) throw EstimationError("no associable pose pairs");
  if (!out.entries.empty()) {
    std::vector<double> v;
    v.reserve(out.entries.size());
    for (const auto& en : out.entries) v.push_back(en.trans_percent);
    out.summary = quartiles(v);
  }
  return out;
}

inline CsvTable rpe_table(const RpeResult& r) {
  CsvTable t{{"t", "span", "travel", "trans_error_m", "trans_percent", "rot_error_deg"}, {}};
  for (const auto& e : r.entries) {
    t.rows.push_back({e.t, e.span, e.travel, e.trans_error, e.trans_percent, e.rot_error_deg});
  }
  return t;
}

/// Reads entries written by rpe_table; only t and trans_percent are required.
inline RpeResult parse_rpe_csv(const CsvText& csv) {
  const auto c_t = csv.column("t");
  const auto c_p = csv.column("trans_percent");
  if (!c_t || !c_p) throw UsageError("rpe csv needs t and trans_percent columns");
  auto opt_col = [&](const char* name, const std::vector<std::string>& row) {
    const auto c = csv.column(name);
    return c ? parse_double(row[*c]).value_or(0.0) : 0.0;
  };
  RpeResult out;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& row = csv.rows[r];
    if (row.size() != csv.header.size()) throw UsageError("rpe csv row " + std::to_string(r + 1) + ": arity");
    const auto t = parse_double(row[*c_t]);
    const auto p = parse_double(row[*c_p]);
    if (!t || !p) throw UsageError("rpe csv row " + std::to_string(r + 1) + ": bad number");
    RpeEntry e;
    e.t = *t;
    e.trans_percent = *p;
    e.span = opt_col("span", row);
    e.travel = opt_col("travel", row);
    e.trans_error = opt_col("trans_error_m", row);
    e.rot_error_deg = opt_col("rot_error_deg", row);
    out.entries.push_back(e);
  }
  std::stable_sort(out.entries.begin(), out.entries.end(), [](const RpeEntry& a, const RpeEntry& b) { return a.t < b.t; });
  if (!out.entries.empty()) {
    std::vector<double> v;
    for (const auto& e : out.entries) v.push_back(e.trans_percent);
    out.summary = quartiles(v);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Visibility binning

struct BinOptions {
  double bin_width = 2.2;   // m
  double tolerance = 0.5;   // s, pairing tolerance
};

struct VisibilityBin {
  double lower = 0.0;
  double upper = 0.0;  // +inf for the overflow bin
  std::size_t count = 0;
  std::optional<Quartiles> errors;

  double center() const { return 0.5 * (lower + upper); }
};

struct PairedSample {
  double t = 0.0;
  std::optional<double> visibility;  // absent when unbounded
  double error = 0.0;                // percent
};

struct BinnedCorrelation {
  double bin_width = 2.2;
  std::vector<VisibilityBin> bins;  // contiguous from 0
  VisibilityBin overflow;           // unbounded visibility
  std::vector<PairedSample> pairs;

  std::size_t total() const { return pairs.size(); }
};

/// Pairs each RPE entry with the nearest non-gap visibility estimate within
/// the tolerance and bins it by floor(V / bin_width).
inline BinnedCorrelation bin_by_visibility(const RpeResult& rpe, std::span<const VisibilityEstimate> vis,
                                           const BinOptions& opts = {}) {
  if (!(opts.bin_width > 0.0)) throw DomainError("bin width must be > 0");
  if (!(opts.tolerance >= 0.0)) throw DomainError("pairing tolerance must be >= 0");
  std::vector<VisibilityEstimate> usable;
  for (const auto& v : vis) {
    if (!v.is_gap()) usable.push_back(v);
  }
  std::stable_sort(usable.begin(), usable.end(),
                   [](const VisibilityEstimate& a, const VisibilityEstimate& b) { return a.t < b.t; });

  BinnedCorrelation out;
  out.bin_width = opts.bin_width;
  for (const auto& e : rpe.entries) {
    auto it = std::lower_bound(usable.begin(), usable.end(), e.t,
                               [](const VisibilityEstimate& v, double t) { return v.t < t; });
    const VisibilityEstimate* best = nullptr;
    if (it != usable.end()) best = &*it;
    if (it != usable.begin() && (!best || e.t - (it - 1)->t <= best->t - e.t)) best = &*(it - 1);
    if (!best || std::abs(best->t - e.t) > opts.tolerance) continue;
    out.pairs.push_back({e.t, best->v_p, e.trans_percent});
  }
  if (out.pairs.empty()) throw EstimationError("no paired samples");

  std::vector<std::vector<double>> per_bin;
  std::vector<double> overflow;
  for (const auto& p : out.pairs) {
    if (!p.visibility) {
      overflow.push_back(p.error);
      continue;
    }
    const auto b = static_cast<std::size_t>(std::floor(*p.visibility / opts.bin_width));
    if (per_bin.size() <= b) per_bin.resize(b + 1);
    per_bin[b].push_back(p.error);
  }
  for (std::size_t b = 0; b < per_bin.size(); ++b) {
    VisibilityBin bin;
    bin.lower = static_cast<double>(b) * opts.bin_width;
    bin.upper = static_cast<double>(b + 1) * opts.bin_width;
    bin.count = per_bin[b].size();
    if (bin.count) bin.errors = quartiles(per_bin[b]);
    out.bins.push_back(bin);
  }
  out.overflow.lower = static_cast<double>(per_bin.size()) * opts.bin_width;
  out.overflow.upper = std::numeric_limits<double>::infinity();
  out.overflow.count = overflow.size();
  if (!overflow.empty()) out.overflow.errors = quartiles(overflow);
  return out;
}

/// bin_lower, bin_upper, bin_center, median, q1, q3, count, overflow. The
/// overflow row (unbounded visibility) leaves upper and center empty.
inline CsvTable binned_table(const BinnedCorrelation& b) {
  CsvTable t{{"bin_lower", "bin_upper", "bin_center", "median", "q1", "q3", "count", "overflow"}, {}};
  auto add = [&](const VisibilityBin& bin, bool overflow) {
    auto q = [&](double Quartiles::*m) { return bin.errors ? CsvCell((*bin.errors).*m) : CsvCell{}; };
    t.rows.push_back({bin.lower, overflow ? CsvCell{} : CsvCell(bin.upper), overflow ? CsvCell{} : CsvCell(bin.center()),
                      q(&Quartiles::median), q(&Quartiles::q1), q(&Quartiles::q3),
                      static_cast<std::int64_t>(bin.count), std::int64_t{overflow ? 1 : 0}});
  };
  for (const auto& bin : b.bins) add(bin, false);
  add(b.overflow, true);
  return t;
}

/// precision, recall, f1, removed, removed_snow, snow
inline CsvTable scores_table(const FilterScores& s, const RemovalCounts& c) {
  auto opt = [](const std::optional<double>& v) { return v ? CsvCell(*v) : CsvCell{}; };
  return {{"precision", "recall", "f1", "removed", "removed_snow", "snow"},
          {{opt(s.precision), opt(s.recall), opt(s.f1), static_cast<std::int64_t>(c.removed),
            static_cast<std::int64_t>(c.removed_snow), static_cast<std::int64_t>(c.snow)}}};
}

}  // namespace snowvis

#endif  // SNOWVIS_EVALUATION_HPP

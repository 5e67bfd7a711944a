// Copyright 2026 The snowvis Authors
// SPDX-License-Identifier: Apache-2.0
//
// Neighborhood outlier filters used for snow removal. Every filter returns a
// FilterMask aligned with its input and never modifies the cloud.
//
//   ROR   keep p iff #{q != p : |p - q| <= radius} >= min_neighbors
//   DROR  same with radius max(min_radius, multiplier * azimuth_res * range(p))
//   SOR   keep p iff mean_knn(p) <= mu + s * sigma
//   DSOR  keep p iff mean_knn(p) <= (mu + s * sigma) * r * range(p)
//
// mean_knn(p) is the mean distance to the k nearest other points; mu and sigma
// are the mean and sample standard deviation of mean_knn over the cloud.
// range(p) is the distance to the sensor origin. Comparisons are inclusive.

#ifndef SNOWVIS_SNOW_FILTERS_HPP
#define SNOWVIS_SNOW_FILTERS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "snowvis/csv.hpp"
#include "snowvis/errors.hpp"
#include "snowvis/filter_mask.hpp"
#include "snowvis/geometry.hpp"
#include "snowvis/kdtree.hpp"
#include "snowvis/pointcloud_io.hpp"

namespace snowvis {

struct RorParams {
  double radius = 0.1;
  std::size_t min_neighbors = 5;
};

struct SorParams {
  std::size_t k = 10;
  double s = 1.0;
};

struct DrorParams {
  double azimuth_res = deg2rad(0.2);
  double multiplier = 3.0;
  double min_radius = 0.04;
  std::size_t min_neighbors = 3;
};

/// s or r set to +inf disables the filter.
struct DsorParams {
  std::size_t k = 5;
  double s = 0.01;
  double r = 0.05;

  void validate() const {
    if (k < 1) throw DomainError("dsor: k must be >= 1");
    if (!(s > 0.0) || !(r > 0.0)) throw DomainError("dsor: s and r must be > 0");
  }
};

inline double point_range(const LidarPoint& p) {
  const double x = p.x, y = p.y, z = p.z;
  return std::sqrt(x * x + y * y + z * z);
}

inline FilterMask ror(std::span<const LidarPoint> cloud, const RorParams& params) {
  if (!(params.radius > 0.0)) throw DomainError("ror: radius must be > 0");
  if (cloud.empty()) return {};
  const KdTree<LidarPoint> tree(cloud);
  const double r2 = params.radius * params.radius;
  std::vector<std::uint8_t> keep(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    keep[i] = tree.count_within(i, r2, params.min_neighbors) >= params.min_neighbors;
  }
  return FilterMask(std::move(keep));
}

inline double dror_search_radius(const LidarPoint& p, const DrorParams& params) {
  return std::max(params.min_radius, params.multiplier * params.azimuth_res * point_range(p));
}

inline FilterMask dror(std::span<const LidarPoint> cloud, const DrorParams& params) {
  if (!(params.azimuth_res > 0.0) || !(params.multiplier > 0.0) || !(params.min_radius > 0.0)) {
    throw DomainError("dror: parameters must be > 0");
  }
  if (cloud.empty()) return {};
  const KdTree<LidarPoint> tree(cloud);
  std::vector<std::uint8_t> keep(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const double sr = dror_search_radius(cloud[i], params);
    keep[i] = tree.count_within(i, sr * sr, params.min_neighbors) >= params.min_neighbors;
  }
  return FilterMask(std::move(keep));
}

/// Per-point mean k-nearest-neighbor distance and its global statistics.
struct NeighborStats {
  std::vector<double> mean_knn;
  double mu = 0.0;
  double sigma = 0.0;
};

/// Mean of k sorted neighbor distances, summed in ascending order.
inline double mean_of_sorted_distances(std::span<const double> squared) {
  double sum = 0.0;
  for (double d2 : squared) sum += std::sqrt(d2);
  return sum / static_cast<double>(squared.size());
}

/// Two-pass mean and sample standard deviation.
inline void finish_stats(NeighborStats& st) {
  const double n = static_cast<double>(st.mean_knn.size());
  double sum = 0.0;
  for (double d : st.mean_knn) sum += d;
  st.mu = sum / n;
  double ss = 0.0;
  for (double d : st.mean_knn) ss += (d - st.mu) * (d - st.mu);
  st.sigma = n > 1.0 ? std::sqrt(ss / (n - 1.0)) : 0.0;
}

inline NeighborStats knn_statistics(std::span<const LidarPoint> cloud, std::size_t k) {
  if (k < 1) throw DomainError("k must be >= 1");
  if (cloud.size() <= k) {
    throw DomainError("cloud of " + std::to_string(cloud.size()) + " points needs more than k=" + std::to_string(k));
  }
  const KdTree<LidarPoint> tree(cloud);
  NeighborStats st;
  st.mean_knn.resize(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) st.mean_knn[i] = mean_of_sorted_distances(tree.knn_squared(i, k));
  finish_stats(st);
  return st;
}

inline FilterMask sor(const NeighborStats& st, double s) {
  std::vector<std::uint8_t> keep(st.mean_knn.size(), 1);
  if (std::isinf(s)) return FilterMask(std::move(keep));
  const double threshold = st.mu + s * st.sigma;
  for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = st.mean_knn[i] <= threshold;
  return FilterMask(std::move(keep));
}

inline FilterMask sor(std::span<const LidarPoint> cloud, const SorParams& params) {
  if (!(params.s > 0.0)) throw DomainError("sor: s must be > 0");
  if (std::isinf(params.s)) return FilterMask::all(cloud.size());
  return sor(knn_statistics(cloud, params.k), params.s);
}

inline FilterMask dsor(const NeighborStats& st, std::span<const LidarPoint> cloud, double s, double r) {
  std::vector<std::uint8_t> keep(cloud.size(), 1);
  if (std::isinf(s) || std::isinf(r)) return FilterMask(std::move(keep));
  const double global = st.mu + s * st.sigma;
  for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = st.mean_knn[i] <= global * r * point_range(cloud[i]);
  return FilterMask(std::move(keep));
}

inline FilterMask dsor(std::span<const LidarPoint> cloud, const DsorParams& params) {
  params.validate();
  if (std::isinf(params.s) || std::isinf(params.r)) return FilterMask::all(cloud.size());
  return dsor(knn_statistics(cloud, params.k), cloud, params.s, params.r);
}

/// Keeps exactly round(fraction * n) indices drawn uniformly without
/// replacement; deterministic for a given seed.
inline FilterMask random_subsample(std::size_t n, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw DomainError("fraction must lie in (0, 1]");
  const auto keep_count = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), std::uint32_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::uint8_t> keep(n, 0);
  for (std::size_t i = 0; i < keep_count; ++i) keep[order[i]] = 1;
  return FilterMask(std::move(keep));
}

inline std::vector<LidarPoint> apply_mask(std::span<const LidarPoint> cloud, const FilterMask& mask) {
  if (mask.size() != cloud.size()) throw UsageError("mask length does not match cloud");
  std::vector<LidarPoint> out;
  out.reserve(mask.kept());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (mask.keeps(i)) out.push_back(cloud[i]);
  }
  return out;
}

inline CsvTable mask_table(const FilterMask& mask) {
  CsvTable t{{"inlier"}, {}};
  t.rows.reserve(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) t.rows.push_back({std::int64_t{mask.keeps(i) ? 1 : 0}});
  return t;
}

// ---------------------------------------------------------------------------
// DSOR parameter sweep

struct SweepInput {
  std::span<const LidarPoint> cloud;
  std::optional<std::span<const PointLabel>> labels;
};

struct SweepRow {
  double s = 0.0;
  double r = 0.0;
  double kept_fraction = 1.0;
  FilterScores scores;  // empty unless every input is labeled
};

struct SweepResult {
  std::vector<SweepRow> rows;        // lexicographic by (s, r)
  std::optional<std::size_t> best;  // row with the highest F1
};

/// Runs DSOR over the (s, r) grid on every input, pooling counts across
/// inputs. Neighbor statistics are computed once per input.
inline SweepResult sweep_dsor(std::span<const SweepInput> inputs, std::vector<double> s_values,
                              std::vector<double> r_values, std::size_t k) {
  if (s_values.empty() || r_values.empty()) throw UsageError("sweep grid is empty");
  for (double v : s_values) {
    if (!(v > 0.0)) throw DomainError("sweep: s values must be > 0");
  }
  for (double v : r_values) {
    if (!(v > 0.0)) throw DomainError("sweep: r values must be > 0");
  }
  std::sort(s_values.begin(), s_values.end());
  std::sort(r_values.begin(), r_values.end());
  const bool labeled = std::all_of(inputs.begin(), inputs.end(), [](const SweepInput& in) { return in.labels.has_value(); });

  std::vector<NeighborStats> stats;
  stats.reserve(inputs.size());
  for (const auto& in : inputs) stats.push_back(knn_statistics(in.cloud, k));

  SweepResult out;
  for (double s : s_values) {
    for (double r : r_values) {
      SweepRow row{s, r, 1.0, {}};
      std::size_t kept = 0, total = 0;
      RemovalCounts counts;
      for (std::size_t i = 0; i < inputs.size(); ++i) {
        const FilterMask mask = dsor(stats[i], inputs[i].cloud, s, r);
        kept += mask.kept();
        total += mask.size();
        if (labeled) counts += removal_counts(mask, *inputs[i].labels);
      }
      row.kept_fraction = total ? static_cast<double>(kept) / static_cast<double>(total) : 1.0;
      if (labeled) row.scores = scores_from_counts(counts);
      out.rows.push_back(row);
    }
  }
  for (std::size_t i = 0; i < out.rows.size(); ++i) {
    const auto& f1 = out.rows[i].scores.f1;
    if (f1 && (!out.best || *f1 > *out.rows[*out.best].scores.f1)) out.best = i;
  }
  return out;
}

inline CsvTable sweep_table(const SweepResult& result) {
  CsvTable t{{"s", "r", "kept_fraction", "precision", "recall", "f1", "best"}, {}};
  auto opt = [](const std::optional<double>& v) { return v ? CsvCell(*v) : CsvCell{}; };
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    const auto& row = result.rows[i];
    t.rows.push_back({row.s, row.r, row.kept_fraction, opt(row.scores.precision), opt(row.scores.recall),
                      opt(row.scores.f1), std::int64_t{result.best == i ? 1 : 0}});
  }
  return t;
}

}  // namespace snowvis

#endif  // SNOWVIS_SNOW_FILTERS_HPP

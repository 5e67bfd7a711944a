// Copyright 2026 The snowvis Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SNOWVIS_FILTER_MASK_HPP
#define SNOWVIS_FILTER_MASK_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "snowvis/errors.hpp"

namespace snowvis {

enum class PointLabel : std::uint8_t { object = 0, snow = 1 };

inline const char* to_string(PointLabel l) { return l == PointLabel::snow ? "snow" : "object"; }

inline PointLabel parse_point_label(std::string_view s) {
  if (s == "snow") return PointLabel::snow;
  if (s == "object") return PointLabel::object;
  throw UsageError("unknown point label '" + std::string(s) + "'");
}

/// Inlier flags aligned with the input cloud.
class FilterMask {
 public:
  FilterMask() = default;
  explicit FilterMask(std::vector<std::uint8_t> inlier) : inlier_(std::move(inlier)) {
    for (auto v : inlier_) kept_ += v ? 1 : 0;
  }

  static FilterMask all(std::size_t n) { return FilterMask(std::vector<std::uint8_t>(n, 1)); }

  std::size_t size() const { return inlier_.size(); }
  std::size_t kept() const { return kept_; }
  std::size_t removed() const { return inlier_.size() - kept_; }
  bool keeps(std::size_t i) const { return inlier_[i] != 0; }
  const std::vector<std::uint8_t>& flags() const { return inlier_; }

  double kept_fraction() const { return inlier_.empty() ? 1.0 : static_cast<double>(kept_) / inlier_.size(); }

  friend bool operator==(const FilterMask& a, const FilterMask& b) { return a.inlier_ == b.inlier_; }

 private:
  std::vector<std::uint8_t> inlier_;
  std::size_t kept_ = 0;
};

/// Confusion counts of snow removal.
struct RemovalCounts {
  std::size_t removed_snow = 0;
  std::size_t removed = 0;
  std::size_t snow = 0;

  RemovalCounts& operator+=(const RemovalCounts& o) {
    removed_snow += o.removed_snow;
    removed += o.removed;
    snow += o.snow;
    return *this;
  }
};

/// Snow-removal scores; a ratio with a zero denominator is absent, not 0.
struct FilterScores {
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
};

inline RemovalCounts removal_counts(const FilterMask& mask, std::span<const PointLabel> labels) {
  if (mask.size() != labels.size()) {
    throw UsageError("mask has " + std::to_string(mask.size()) + " entries, labels " + std::to_string(labels.size()));
  }
  RemovalCounts c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool snow = labels[i] == PointLabel::snow;
    const bool removed = !mask.keeps(i);
    c.snow += snow;
    c.removed += removed;
    c.removed_snow += snow && removed;
  }
  return c;
}

inline FilterScores scores_from_counts(const RemovalCounts& c) {
  FilterScores s;
  if (c.removed > 0) s.precision = static_cast<double>(c.removed_snow) / static_cast<double>(c.removed);
  if (c.snow > 0) s.recall = static_cast<double>(c.removed_snow) / static_cast<double>(c.snow);
  if (s.precision && s.recall) {
    const double sum = *s.precision + *s.recall;
    s.f1 = sum > 0.0 ? 2.0 * *s.precision * *s.recall / sum : 0.0;
  }
  return s;
}

/// Precision, recall and F1 of snow removal for `mask` against `labels`.
inline FilterScores filter_scores(const FilterMask& mask, std::span<const PointLabel> labels) {
  return scores_from_counts(removal_counts(mask, labels));
}

}  // namespace snowvis

#endif  // SNOWVIS_FILTER_MASK_HPP

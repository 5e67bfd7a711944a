// Copyright 2026 The snowvis Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SNOWVIS_KDTREE_HPP
#define SNOWVIS_KDTREE_HPP

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

namespace snowvis {

/// Static 3-D kd-tree over a point array it does not own. Distances are
/// squared Euclidean in double precision, computed exactly as
/// dx*dx + dy*dy + dz*dz so results match a brute-force scan bit for bit.
template <class Point>
class KdTree {
 public:
  static constexpr std::size_t kLeafSize = 12;

  explicit KdTree(std::span<const Point> points) : pts_(points), index_(points.size()) {
    std::iota(index_.begin(), index_.end(), std::uint32_t{0});
    if (!index_.empty()) {
      nodes_.reserve(2 * index_.size() / kLeafSize + 2);
      build(0, index_.size());
    }
  }

  std::size_t size() const { return pts_.size(); }

  static double coord(const Point& p, int axis) {
    return axis == 0 ? static_cast<double>(p.x) : axis == 1 ? static_cast<double>(p.y) : static_cast<double>(p.z);
  }

  static double squared_distance(const Point& a, const Point& b) {
    const double dx = static_cast<double>(a.x) - static_cast<double>(b.x);
    const double dy = static_cast<double>(a.y) - static_cast<double>(b.y);
    const double dz = static_cast<double>(a.z) - static_cast<double>(b.z);
    return dx * dx + dy * dy + dz * dz;
  }

  /// Number of points other than `query` within squared radius `r2`
  /// (inclusive), counting stops once `limit` is reached.
  std::size_t count_within(std::size_t query, double r2,
                           std::size_t limit = std::numeric_limits<std::size_t>::max()) const {
    if (nodes_.empty() || limit == 0) return 0;
    std::size_t count = 0;
    const Point& q = pts_[query];
    std::vector<std::uint32_t> stack{0};
    while (!stack.empty()) {
      const Node& n = nodes_[stack.back()];
      stack.pop_back();
      if (box_distance(q, n) > r2) continue;
      if (n.leaf()) {
        for (std::uint32_t i = n.begin; i < n.end; ++i) {
          const std::uint32_t j = index_[i];
          if (j != query && squared_distance(q, pts_[j]) <= r2) {
            if (++count >= limit) return count;
          }
        }
        continue;
      }
      stack.push_back(n.left);
      stack.push_back(n.right);
    }
    return count;
  }

  /// Squared distances to the k nearest points other than `query`, ascending.
  std::vector<double> knn_squared(std::size_t query, std::size_t k) const {
    std::vector<double> best;  // max-heap of the k smallest so far
    if (nodes_.empty() || k == 0) return best;
    best.reserve(k + 1);
    const Point& q = pts_[query];
    search_knn(0, q, query, k, best);
    std::sort_heap(best.begin(), best.end());
    return best;
  }

 private:
  struct Node {
    std::array<double, 3> lo;
    std::array<double, 3> hi;
    std::uint32_t begin = 0, end = 0;
    std::uint32_t left = 0, right = 0;  // 0 for leaves (root is never a child)
    bool leaf() const { return left == 0; }
  };

  std::uint32_t build(std::size_t begin, std::size_t end) {
    const auto id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back({});
    Node n;
    n.begin = static_cast<std::uint32_t>(begin);
    n.end = static_cast<std::uint32_t>(end);
    n.lo.fill(std::numeric_limits<double>::infinity());
    n.hi.fill(-std::numeric_limits<double>::infinity());
    for (std::size_t i = begin; i < end; ++i) {
      for (int a = 0; a < 3; ++a) {
        const double c = coord(pts_[index_[i]], a);
        n.lo[a] = std::min(n.lo[a], c);
        n.hi[a] = std::max(n.hi[a], c);
      }
    }
    if (end - begin > kLeafSize) {
      int axis = 0;
      for (int a = 1; a < 3; ++a) {
        if (n.hi[a] - n.lo[a] > n.hi[axis] - n.lo[axis]) axis = a;
      }
      const std::size_t mid = begin + (end - begin) / 2;
      std::nth_element(index_.begin() + static_cast<std::ptrdiff_t>(begin),
                       index_.begin() + static_cast<std::ptrdiff_t>(mid),
                       index_.begin() + static_cast<std::ptrdiff_t>(end),
                       [&](std::uint32_t a, std::uint32_t b) { return coord(pts_[a], axis) < coord(pts_[b], axis); });
      n.left = build(begin, mid);
      n.right = build(mid, end);
    }
    nodes_[id] = n;
    return id;
  }

  static double box_distance(const Point& q, const Node& n) {
    double d2 = 0.0;
    for (int a = 0; a < 3; ++a) {
      const double c = coord(q, a);
      double d = 0.0;
      if (c < n.lo[a]) d = n.lo[a] - c;
      if (c > n.hi[a]) d = c - n.hi[a];
      d2 += d * d;
    }
    return d2;
  }

  void search_knn(std::uint32_t id, const Point& q, std::size_t query, std::size_t k,
                  std::vector<double>& best) const {
    const Node& n = nodes_[id];
    if (best.size() == k && box_distance(q, n) > best.front()) return;
    if (n.leaf()) {
      for (std::uint32_t i = n.begin; i < n.end; ++i) {
        const std::uint32_t j = index_[i];
        if (j == query) continue;
        const double d2 = squared_distance(q, pts_[j]);
        if (best.size() < k) {
          best.push_back(d2);
          std::push_heap(best.begin(), best.end());
        } else if (d2 < best.front()) {
          std::pop_heap(best.begin(), best.end());
          best.back() = d2;
          std::push_heap(best.begin(), best.end());
        }
      }
      return;
    }
    const double dl = box_distance(q, nodes_[n.left]);
    const double dr = box_distance(q, nodes_[n.right]);
    if (dl <= dr) {
      search_knn(n.left, q, query, k, best);
      search_knn(n.right, q, query, k, best);
    } else {
      search_knn(n.right, q, query, k, best);
      search_knn(n.left, q, query, k, best);
    }
  }

  std::span<const Point> pts_;
  std::vector<std::uint32_t> index_;
  std::vector<Node> nodes_;
};

}  // namespace snowvis

#endif  // SNOWVIS_KDTREE_HPP

// Copyright 2026 The snowvis Authors
// SPDX-License-Identifier: Apache-2.0
//
// Shared test helpers: scratch directories, random clouds and O(N^2)
// reference implementations of the neighborhood filters.

#ifndef SNOWVIS_TESTS_SUPPORT_HPP
#define SNOWVIS_TESTS_SUPPORT_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "snowvis/filter_mask.hpp"
#include "snowvis/pointcloud_io.hpp"

namespace snowvis::test {

/// Directory removed on destruction.
class ScratchDir {
 public:
  ScratchDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("snowvis_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

/// Points uniform in a box, plus `clusters` tight blobs so that neighbor
/// counts vary across the cloud.
inline std::vector<LidarPoint> random_cloud(std::size_t n, std::uint64_t seed, double extent = 10.0,
                                            std::size_t clusters = 4) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> box(-extent, extent);
  std::normal_distribution<double> blob(0.0, 0.05);
  std::vector<LidarPoint> centers(clusters);
  for (auto& c : centers) c = {float(box(rng)), float(box(rng)), float(box(rng) * 0.1), 0.5f, 0.0f};
  std::vector<LidarPoint> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (clusters > 0 && i % 2 == 0) {
      const auto& c = centers[i % clusters];
      out[i] = {float(c.x + blob(rng)), float(c.y + blob(rng)), float(c.z + blob(rng)), 0.5f, 0.0f};
    } else {
      out[i] = {float(box(rng)), float(box(rng)), float(box(rng) * 0.1), 0.5f, 0.0f};
    }
  }
  return out;
}

namespace oracle {

inline double dist2(const LidarPoint& a, const LidarPoint& b) {
  const double dx = double(a.x) - double(b.x);
  const double dy = double(a.y) - double(b.y);
  const double dz = double(a.z) - double(b.z);
  return dx * dx + dy * dy + dz * dz;
}

inline double range(const LidarPoint& p) {
  return std::sqrt(double(p.x) * double(p.x) + double(p.y) * double(p.y) + double(p.z) * double(p.z));
}

inline std::size_t neighbors_within(const std::vector<LidarPoint>& c, std::size_t i, double r) {
  std::size_t n = 0;
  for (std::size_t j = 0; j < c.size(); ++j) n += (j != i && dist2(c[i], c[j]) <= r * r);
  return n;
}

inline std::vector<std::uint8_t> ror(const std::vector<LidarPoint>& c, double radius, std::size_t min_n) {
  std::vector<std::uint8_t> keep(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) keep[i] = neighbors_within(c, i, radius) >= min_n;
  return keep;
}

inline std::vector<std::uint8_t> dror(const std::vector<LidarPoint>& c, double az, double mult, double min_r,
                                      std::size_t min_n) {
  std::vector<std::uint8_t> keep(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double sr = std::max(min_r, mult * az * range(c[i]));
    keep[i] = neighbors_within(c, i, sr) >= min_n;
  }
  return keep;
}

/// Mean k-NN distance per point, then mean and sample standard deviation.
struct Stats {
  std::vector<double> mean_knn;
  double mu = 0.0;
  double sigma = 0.0;
};

inline Stats knn_stats(const std::vector<LidarPoint>& c, std::size_t k) {
  Stats s;
  s.mean_knn.resize(c.size());
  std::vector<double> d;
  for (std::size_t i = 0; i < c.size(); ++i) {
    d.clear();
    for (std::size_t j = 0; j < c.size(); ++j) {
      if (j != i) d.push_back(dist2(c[i], c[j]));
    }
    std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
    double sum = 0.0;
    for (std::size_t q = 0; q < k; ++q) sum += std::sqrt(d[q]);
    s.mean_knn[i] = sum / double(k);
  }
  double total = 0.0;
  for (double v : s.mean_knn) total += v;
  s.mu = total / double(c.size());
  double ss = 0.0;
  for (double v : s.mean_knn) ss += (v - s.mu) * (v - s.mu);
  s.sigma = std::sqrt(ss / double(c.size() - 1));
  return s;
}

inline std::vector<std::uint8_t> sor(const Stats& st, double s) {
  std::vector<std::uint8_t> keep(st.mean_knn.size());
  for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = st.mean_knn[i] <= st.mu + s * st.sigma;
  return keep;
}

inline std::vector<std::uint8_t> dsor(const Stats& st, const std::vector<LidarPoint>& c, double s, double r) {
  std::vector<std::uint8_t> keep(c.size());
  for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = st.mean_knn[i] <= (st.mu + s * st.sigma) * r * range(c[i]);
  return keep;
}

}  // namespace oracle

inline std::vector<std::uint8_t> flags_of(const FilterMask& m) {
  std::vector<std::uint8_t> out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = m.keeps(i);
  return out;
}

}  // namespace snowvis::test

#endif  // SNOWVIS_TESTS_SUPPORT_HPP

// Copyright 2026 The snowvis Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "snowvis/evaluation.hpp"

namespace snowvis {
namespace {

Trajectory straight_line(double speed, double duration = 10.0, double rate = 10.0) {
  std::vector<TimedPose> p;
  for (int i = 0; i <= int(duration * rate + 0.5); ++i) {
    const double t = i / rate;
    p.push_back({t, make_pose_2d(speed * t, 0.0, 0.0)});
  }
  return Trajectory(std::move(p));
}

Trajectory random_walk(std::uint64_t seed, std::size_t n, double dt) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> step(0.0, 0.3), turn(0.0, 0.05);
  std::vector<TimedPose> p;
  Pose pose = Pose::Identity();
  for (std::size_t i = 0; i < n; ++i) {
    p.push_back({double(i) * dt, pose});
    Pose d = Pose::Identity();
    d.translate(Vec3(0.5 + step(rng), step(rng), 0.1 * step(rng)));
    d.rotate(Eigen::AngleAxisd(turn(rng), Vec3::UnitZ()) * Eigen::AngleAxisd(turn(rng), Vec3::UnitX()));
    pose = pose * d;
  }
  return Trajectory(std::move(p));
}

Trajectory transformed(const Trajectory& tr, const Pose& left, double noise = 0.0, std::uint64_t seed = 0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, noise);
  std::vector<TimedPose> p;
  for (const auto& tp : tr.poses()) {
    Pose q = left * tp.pose;
    if (noise > 0.0) q.translate(Vec3(n(rng), n(rng), n(rng)));
    p.push_back({tp.t, q});
  }
  return Trajectory(std::move(p));
}

// ---------------------------------------------------------------------------
// Quantiles

TEST(Quantile, TypeSevenExamples) {
  const std::vector<double> v{4, 1, 3, 2};
  EXPECT_DOUBLE_EQ(quantile(v, 0.25), 1.75);
  EXPECT_DOUBLE_EQ(quantile(v, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile(v, 0.75), 3.25);
  EXPECT_DOUBLE_EQ(quantile(v, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(quantile(v, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(quantile({7.0}, 0.3), 7.0);
  EXPECT_THROW(quantile({}, 0.5), EstimationError);
  EXPECT_THROW(quantile(v, 1.5), DomainError);
}

// ---------------------------------------------------------------------------
// RPE

TEST(Rpe, IdenticalTrajectoriesGiveZero) {
  const auto gt = random_walk(1, 200, 0.1);
  const RpeResult r = relative_pose_error(gt, gt);
  ASSERT_FALSE(r.entries.empty());
  for (const auto& e : r.entries) {
    EXPECT_NEAR(e.trans_error, 0.0, 1e-9);
    EXPECT_NEAR(e.rot_error_deg, 0.0, 1e-5);
  }
  EXPECT_NEAR(r.summary->median, 0.0, 1e-9);
}

TEST(Rpe, SpeedErrorOfOnePercent) {
  const RpeResult r = relative_pose_error(straight_line(10.0), straight_line(10.1));
  ASSERT_EQ(r.entries.size(), 91u);
  for (const auto& e : r.entries) {
    EXPECT_NEAR(e.trans_percent, 1.0, 1e-9);
    EXPECT_NEAR(e.travel, 10.0, 1e-9);
    EXPECT_NEAR(e.span, 1.0, 1e-9);
  }
  EXPECT_NEAR(r.entries.front().t, 0.0, 1e-12);
}

TEST(Rpe, DisplacementNormalizer) {
  // gt goes out and back within each window: displacement is shorter than path
  std::vector<TimedPose> p;
  for (int i = 0; i <= 100; ++i) {
    const double t = i * 0.1;
    p.push_back({t, make_pose_2d(std::sin(t), 0.0, 0.0)});
  }
  const Trajectory gt(p);
  RpeOptions path, disp;
  disp.normalizer = RpeNormalizer::displacement;
  disp.min_travel = 1e-9;
  path.min_travel = 1e-9;
  const auto a = relative_pose_error(gt, gt, path);
  const auto b = relative_pose_error(gt, gt, disp);
  ASSERT_EQ(a.entries.size(), b.entries.size());
  for (std::size_t i = 0; i < a.entries.size(); ++i) EXPECT_GE(a.entries[i].travel + 1e-12, b.entries[i].travel);
  EXPECT_EQ(parse_rpe_normalizer("displacement"), RpeNormalizer::displacement);
  EXPECT_THROW(parse_rpe_normalizer("arc"), UsageError);
}

TEST(Rpe, InvariantUnderRigidTransform) {
  const auto gt = random_walk(3, 150, 0.1);
  const auto est = transformed(gt, Pose::Identity(), 0.05, 4);
  Pose t = make_pose(Vec3(12, -4, 3), Eigen::Quaterniond(Eigen::AngleAxisd(1.1, Vec3(1, 2, 3).normalized())));
  const auto r0 = relative_pose_error(gt, est);
  const auto r1 = relative_pose_error(transformed(gt, t), transformed(est, t));
  const auto r2 = relative_pose_error(gt, transformed(est, t));
  ASSERT_EQ(r0.entries.size(), r1.entries.size());
  ASSERT_EQ(r0.entries.size(), r2.entries.size());
  for (std::size_t i = 0; i < r0.entries.size(); ++i) {
    EXPECT_NEAR(r0.entries[i].trans_percent, r1.entries[i].trans_percent, 1e-8);
    EXPECT_NEAR(r0.entries[i].trans_percent, r2.entries[i].trans_percent, 1e-8);
    EXPECT_NEAR(r0.entries[i].rot_error_deg, r2.entries[i].rot_error_deg, 1e-5);
  }
}

TEST(Rpe, MatchesMatrixOracle) {
  const auto gt = random_walk(7, 120, 0.1);
  // est sampled at shifted times so association is not trivial
  std::vector<TimedPose> ep;
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n(0.0, 0.02);
  for (const auto& tp : gt.poses()) {
    Pose q = tp.pose;
    q.translate(Vec3(n(rng), n(rng), n(rng)));
    ep.push_back({tp.t + 0.013, q});
  }
  const Trajectory est(ep);
  const RpeResult r = relative_pose_error(gt, est);

  const auto& g = gt.poses();
  std::vector<double> expect;
  for (std::size_t i = 0; i < g.size(); ++i) {
    std::size_t j = g.size();
    double best = 0.05;
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double off = std::abs(g[k].t - (g[i].t + 1.0));
      if (off <= best) {
        best = off;
        j = k;
      }
    }
    if (j == g.size() || j <= i) continue;
    auto nearest = [&](double t) {
      std::size_t b = 0;
      for (std::size_t k = 0; k < ep.size(); ++k) {
        if (std::abs(ep[k].t - t) < std::abs(ep[b].t - t)) b = k;
      }
      return b;
    };
    const std::size_t a = nearest(g[i].t), b = nearest(g[j].t);
    const Eigen::Matrix4d dg = g[i].pose.matrix().inverse() * g[j].pose.matrix();
    const Eigen::Matrix4d de = ep[a].pose.matrix().inverse() * ep[b].pose.matrix();
    const Eigen::Matrix4d err = dg.inverse() * de;
    double path = 0.0;
    for (std::size_t k = i; k < j; ++k) path += (g[k + 1].pose.translation() - g[k].pose.translation()).norm();
    expect.push_back(100.0 * err.block<3, 1>(0, 3).norm() / path);
  }
  ASSERT_EQ(r.entries.size(), expect.size());
  for (std::size_t i = 0; i < expect.size(); ++i) EXPECT_NEAR(r.entries[i].trans_percent, expect[i], 1e-9);
}

TEST(Rpe, ExclusionsAndErrors) {
  const auto still = straight_line(0.0);
  const RpeResult r = relative_pose_error(still, still);
  EXPECT_TRUE(r.entries.empty());
  EXPECT_EQ(r.excluded, 91u);
  EXPECT_FALSE(r.summary.has_value());

  EXPECT_THROW(relative_pose_error(straight_line(1.0, 0.5), straight_line(1.0, 0.5)), EstimationError);
  // every est sample sits 0.049 s or more from the nearest gt sample
  std::vector<TimedPose> offset;
  for (const auto& tp : straight_line(1.0).poses()) offset.push_back({tp.t + 0.051, tp.pose});
  EXPECT_THROW(relative_pose_error(straight_line(1.0), Trajectory(offset), RpeOptions{1.0, 0.04, 0.1, {}}),
               EstimationError);
  EXPECT_THROW(relative_pose_error(Trajectory{}, straight_line(1.0)), EstimationError);
  RpeOptions bad;
  bad.window = 0.0;
  EXPECT_THROW(relative_pose_error(straight_line(1.0), straight_line(1.0), bad), DomainError);
}

TEST(Rpe, CsvRoundTrip) {
  const auto r = relative_pose_error(straight_line(10.0), straight_line(10.1));
  const auto back = parse_rpe_csv(parse_csv(to_csv_string(rpe_table(r))));
  ASSERT_EQ(back.entries.size(), r.entries.size());
  EXPECT_NEAR(back.entries[5].trans_percent, 1.0, 1e-8);
  EXPECT_NEAR(back.summary->median, 1.0, 1e-8);
}

// ---------------------------------------------------------------------------
// Binning

RpeResult rpe_at(const std::vector<double>& t, const std::vector<double>& err) {
  RpeResult r;
  for (std::size_t i = 0; i < t.size(); ++i) {
    RpeEntry e;
    e.t = t[i];
    e.trans_percent = err[i];
    r.entries.push_back(e);
  }
  return r;
}

VisibilityEstimate vis_at(double t, std::optional<double> v, VisibilityStatus st = VisibilityStatus::ok) {
  VisibilityEstimate e;
  e.t = t;
  e.status = st;
  if (st != VisibilityStatus::no_scans) e.lambda_bar = v ? 1.0 : 0.0;
  e.v_p = v;
  return e;
}

TEST(Binning, SingleSampleLandsInSecondBin) {
  const std::vector<VisibilityEstimate> vis{vis_at(0.0, 3.0)};
  const auto b = bin_by_visibility(rpe_at({0.1}, {2.0}), vis);
  ASSERT_EQ(b.bins.size(), 2u);
  EXPECT_EQ(b.bins[0].count, 0u);
  EXPECT_FALSE(b.bins[0].errors.has_value());
  EXPECT_DOUBLE_EQ(b.bins[1].lower, 2.2);
  EXPECT_DOUBLE_EQ(b.bins[1].upper, 4.4);
  EXPECT_DOUBLE_EQ(b.bins[1].center(), 3.3);
  EXPECT_EQ(b.bins[1].count, 1u);
  EXPECT_EQ(b.bins[1].errors->median, 2.0);
}

TEST(Binning, ConstantErrorGivesFlatMedians) {
  std::vector<double> t, err;
  std::vector<VisibilityEstimate> vis;
  for (int i = 0; i < 200; ++i) {
    t.push_back(i);
    err.push_back(1.0);
    vis.push_back(vis_at(i, 1.0 + 0.1 * i));
  }
  const auto b = bin_by_visibility(rpe_at(t, err), vis);
  std::size_t total = b.overflow.count;
  for (const auto& bin : b.bins) {
    total += bin.count;
    if (bin.errors) {
      EXPECT_EQ(bin.errors->median, 1.0);
    }
  }
  EXPECT_EQ(total, 200u);
  EXPECT_EQ(b.total(), 200u);
}

TEST(Binning, InverseVisibilityErrorMatchesOracle) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> v(0.5, 40.0);
  std::vector<double> t, err;
  std::vector<VisibilityEstimate> vis;
  for (int i = 0; i < 500; ++i) {
    const double vi = v(rng);
    t.push_back(i * 0.1);
    err.push_back(100.0 / vi);
    vis.push_back(vis_at(i * 0.1 + 0.01, vi));
  }
  const auto b = bin_by_visibility(rpe_at(t, err), vis);
  std::optional<double> previous;
  for (std::size_t k = 0; k < b.bins.size(); ++k) {
    std::vector<double> in;
    for (int i = 0; i < 500; ++i) {
      if (std::floor(*vis[i].v_p / 2.2) == double(k)) in.push_back(err[i]);
    }
    ASSERT_EQ(b.bins[k].count, in.size()) << k;
    if (in.empty()) continue;
    std::sort(in.begin(), in.end());
    const double h = 0.5 * double(in.size() - 1);
    const double med = in[std::size_t(h)] + (h - std::floor(h)) * (in[std::min(std::size_t(h) + 1, in.size() - 1)] - in[std::size_t(h)]);
    EXPECT_NEAR(b.bins[k].errors->median, med, 1e-12);
    if (previous) {
      EXPECT_LT(b.bins[k].errors->median, *previous);
    }
    previous = b.bins[k].errors->median;
  }
}

TEST(Binning, OverflowGapsAndTolerance) {
  const std::vector<VisibilityEstimate> vis{
      vis_at(0.0, std::nullopt, VisibilityStatus::unbounded), vis_at(1.0, 10.0),
      vis_at(2.0, std::nullopt, VisibilityStatus::no_scans), vis_at(2.4, 5.0)};
  const auto b = bin_by_visibility(rpe_at({0.0, 1.1, 2.05, 9.0}, {1.0, 2.0, 3.0, 4.0}), vis);
  EXPECT_EQ(b.total(), 3u);  // t=9 has no estimate within 0.5 s
  EXPECT_EQ(b.overflow.count, 1u);
  EXPECT_TRUE(std::isinf(b.overflow.upper));
  // the gap at t=2.0 is skipped in favor of the estimate at 2.4
  EXPECT_EQ(b.bins[2].count, 1u);
  EXPECT_EQ(b.bins[2].errors->median, 3.0);
  EXPECT_EQ(b.bins[4].count, 1u);

  const CsvTable table = binned_table(b);
  ASSERT_EQ(table.rows.size(), b.bins.size() + 1);
  const std::string csv = to_csv_string(table);
  const CsvText back = parse_csv(csv);
  EXPECT_EQ(back.rows.back()[*back.column("bin_upper")], "");
  EXPECT_EQ(back.rows.back()[*back.column("overflow")], "1");

  EXPECT_THROW(bin_by_visibility(rpe_at({50.0}, {1.0}), vis), EstimationError);
  EXPECT_THROW(bin_by_visibility(rpe_at({0.0}, {1.0}), vis, {0.0, 0.5}), DomainError);
}

// ---------------------------------------------------------------------------
// Filter scores

TEST(FilterScores, Examples) {
  std::vector<PointLabel> labels(10, PointLabel::object);
  for (int i = 0; i < 5; ++i) labels[i] = PointLabel::snow;
  std::vector<std::uint8_t> keep(10, 1);
  for (int i : {0, 1, 2, 3, 9}) keep[i] = 0;
  const FilterScores s = filter_scores(FilterMask(keep), labels);
  EXPECT_DOUBLE_EQ(*s.precision, 0.8);
  EXPECT_DOUBLE_EQ(*s.recall, 0.8);
  EXPECT_DOUBLE_EQ(*s.f1, 0.8);

  const FilterScores none = filter_scores(FilterMask::all(10), labels);
  EXPECT_FALSE(none.precision.has_value());
  EXPECT_EQ(*none.recall, 0.0);
  EXPECT_FALSE(none.f1.has_value());

  EXPECT_THROW(filter_scores(FilterMask::all(3), labels), UsageError);
  const CsvTable t = scores_table(s, removal_counts(FilterMask(keep), labels));
  EXPECT_EQ(t.header.front(), "precision");
  ASSERT_EQ(t.rows.size(), 1u);
}

TEST(FilterScores, ExhaustiveSmallSets) {
  constexpr int n = 6;
  for (int lm = 0; lm < (1 << n); ++lm) {
    std::vector<PointLabel> labels(n);
    for (int i = 0; i < n; ++i) labels[i] = (lm >> i & 1) ? PointLabel::snow : PointLabel::object;
    for (int rm = 0; rm < (1 << n); ++rm) {
      std::vector<std::uint8_t> keep(n);
      for (int i = 0; i < n; ++i) keep[i] = !(rm >> i & 1);
      const int tp = __builtin_popcount(lm & rm), removed = __builtin_popcount(rm), snow = __builtin_popcount(lm);
      const FilterScores s = filter_scores(FilterMask(keep), labels);
      ASSERT_EQ(s.precision.has_value(), removed > 0);
      ASSERT_EQ(s.recall.has_value(), snow > 0);
      if (removed) {
        ASSERT_DOUBLE_EQ(*s.precision, double(tp) / removed);
      }
      if (snow) {
        ASSERT_DOUBLE_EQ(*s.recall, double(tp) / snow);
      }
      if (removed && snow) {
        const double f1 = tp == 0 ? 0.0 : 2.0 * tp / double(removed + snow);
        ASSERT_NEAR(*s.f1, f1, 1e-15);
      }
    }
  }
}

}  // namespace
}  // namespace snowvis

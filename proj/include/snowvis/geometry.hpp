// Copyright 2026 The snowvis Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SNOWVIS_GEOMETRY_HPP
#define SNOWVIS_GEOMETRY_HPP

#include <Eigen/Geometry>
#include <cmath>
#include <numbers>

namespace snowvis {

using Pose = Eigen::Isometry3d;
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

constexpr double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / std::numbers::pi; }

inline bool is_orthonormal(const Eigen::Matrix3d& r, double tol = 1e-6) {
  return ((r.transpose() * r) - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() <= tol;
}

inline Pose make_pose(const Vec3& t, const Eigen::Quaterniond& q) {
  Pose pose = Pose::Identity();
  pose.linear() = q.normalized().toRotationMatrix();
  pose.translation() = t;
  return pose;
}

inline Pose make_pose_2d(double x, double y, double yaw, double z = 0.0) {
  return make_pose(Vec3(x, y, z), Eigen::Quaterniond(Eigen::AngleAxisd(yaw, Vec3::UnitZ())));
}

/// Linear interpolation of translation, slerp of rotation; `s` in [0, 1].
inline Pose interpolate_pose(const Pose& a, const Pose& b, double s) {
  if (s <= 0.0) return a;
  if (s >= 1.0) return b;
  const Eigen::Quaterniond qa(a.linear());
  const Eigen::Quaterniond qb(b.linear());
  return make_pose(a.translation() + s * (b.translation() - a.translation()), qa.slerp(s, qb));
}

}  // namespace snowvis

#endif  // SNOWVIS_GEOMETRY_HPP

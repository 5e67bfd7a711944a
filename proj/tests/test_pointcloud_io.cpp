// Copyright 2026 The snowvis Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <bit>
#include <cstring>
#include <fstream>

#include "snowvis/csv.hpp"
#include "snowvis/pointcloud_io.hpp"
#include "support.hpp"

namespace snowvis {
namespace {

using test::ScratchDir;

void write_bytes(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::string floats_le(std::initializer_list<float> values) {
  std::string out;
  for (float f : values) {
    const auto u = std::bit_cast<std::uint32_t>(f);
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((u >> (8 * b)) & 0xff));
  }
  return out;
}

TEST(LoadPointcloud, AsciiPcdEchoesValuesBitExactly) {
  const std::string pcd =
      "# .PCD v0.7\nVERSION 0.7\nFIELDS x y z intensity\nSIZE 4 4 4 4\nTYPE F F F F\nCOUNT 1 1 1 1\n"
      "WIDTH 4\nHEIGHT 1\nVIEWPOINT 0 0 0 1 0 0 0\nPOINTS 4\nDATA ascii\n"
      "1.5 -2.25 0.125 0.5\n3.1 4.2 -0.3 0.25\n-7 8 9 1\n0.001 0.002 0.003 0\n";
  const auto pts = parse_pcd(pcd);
  ASSERT_EQ(pts.size(), 4u);
  EXPECT_EQ(pts[0].x, 1.5f);
  EXPECT_EQ(pts[0].y, -2.25f);
  EXPECT_EQ(pts[1].x, 3.1f);
  EXPECT_EQ(pts[1].z, -0.3f);
  EXPECT_EQ(pts[2].intensity, 1.0f);
  EXPECT_EQ(pts[3].z, 0.003f);
}

TEST(LoadPointcloud, RawXyziRecordArithmetic) {
  ScratchDir dir;
  write_bytes(dir / "two.bin", floats_le({1, 2, 3, 0.5f, 4, 5, 6, 0.25f}));
  const Scan s = load_pointcloud(dir / "two.bin", CloudFormat::raw_xyzi, 3.0);
  ASSERT_EQ(s.points.size(), 2u);
  EXPECT_EQ(s.points[1].y, 5.0f);
  EXPECT_EQ(s.timestamp, 3.0);
  EXPECT_TRUE(s.sensor_pose.isApprox(Pose::Identity()));
}

TEST(LoadPointcloud, ThreeFieldRecordFailsAtOffsetTwelve) {
  ScratchDir dir;
  write_bytes(dir / "short.bin", floats_le({1, 2, 3}));
  try {
    load_pointcloud(dir / "short.bin", CloudFormat::raw_xyzi);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 12u);
    EXPECT_NE(std::string(e.what()).find("12"), std::string::npos);
  }
}

TEST(LoadPointcloud, UnknownFormatTagIsUsageError) {
  EXPECT_THROW(parse_cloud_format("las"), UsageError);
  EXPECT_EQ(parse_cloud_format("pcd"), CloudFormat::pcd);
  EXPECT_EQ(parse_cloud_format("raw_xyzi"), CloudFormat::raw_xyzi);
}

TEST(LoadPointcloud, TimestampFromNumericStem) {
  ScratchDir dir;
  write_bytes(dir / "1549.25.bin", floats_le({1, 2, 3, 0}));
  EXPECT_EQ(load_pointcloud(dir / "1549.25.bin", CloudFormat::raw_xyzi).timestamp, 1549.25);
}

TEST(LoadPointcloud, ByteScaledIntensityIsNormalized) {
  const auto pts = parse_raw_xyzi(floats_le({0, 0, 0, 255, 1, 1, 1, 51}));
  EXPECT_FLOAT_EQ(pts[0].intensity, 1.0f);
  EXPECT_FLOAT_EQ(pts[1].intensity, 0.2f);
}

TEST(LoadPointcloud, NonFiniteCoordinateIsParseError) {
  EXPECT_THROW(parse_raw_xyzi(floats_le({0, std::nanf(""), 0, 0})), ParseError);
}

TEST(LoadPointcloud, TruncatedBinaryPcdNamesOffset) {
  const std::string header =
      "VERSION 0.7\nFIELDS x y z intensity\nSIZE 4 4 4 4\nTYPE F F F F\nCOUNT 1 1 1 1\n"
      "WIDTH 2\nHEIGHT 1\nPOINTS 2\nDATA binary\n";
  const std::string bytes = header + floats_le({1, 2, 3, 0.5f, 4, 5});
  try {
    parse_pcd(bytes);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_GE(e.offset(), header.size());
    EXPECT_LE(e.offset(), bytes.size());
  }
}

TEST(LoadPointcloud, MalformedHeaderIsParseError) {
  EXPECT_THROW(parse_pcd("VERSION 0.7\nFIELDS x y\nDATA ascii\n"), ParseError);
  EXPECT_THROW(parse_pcd("VERSION 0.7\n"), ParseError);
}

TEST(LoadPointcloud, PcdWithTimeField) {
  const std::string pcd =
      "VERSION 0.7\nFIELDS x y z intensity t\nSIZE 4 4 4 4 4\nTYPE F F F F F\nCOUNT 1 1 1 1 1\n"
      "WIDTH 1\nHEIGHT 1\nPOINTS 1\nDATA ascii\n1 2 3 0.5 0.05\n";
  const auto pts = parse_pcd(pcd);
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_FLOAT_EQ(pts[0].time_offset, 0.05f);
}

class CloudRoundTrip : public ::testing::TestWithParam<int> {};

TEST_P(CloudRoundTrip, PreservesCountAndCoordinates) {
  ScratchDir dir;
  auto cloud = test::random_cloud(257, 11 + GetParam());
  for (std::size_t i = 0; i < cloud.size(); ++i) cloud[i].intensity = float(i % 7) / 7.0f;
  const std::vector<std::pair<std::string, std::function<void(const std::filesystem::path&)>>> writers = {
      {"a.bin", [&](const auto& p) { write_pointcloud(cloud, p, CloudFormat::raw_xyzi); }},
      {"b.pcd", [&](const auto& p) { write_pointcloud(cloud, p, CloudFormat::pcd, PcdEncoding::binary); }},
      {"c.pcd", [&](const auto& p) { write_pointcloud(cloud, p, CloudFormat::pcd, PcdEncoding::ascii); }},
  };
  for (const auto& [name, write] : writers) {
    write(dir / name);
    const Scan s = load_pointcloud(dir / name, format_from_extension(dir / name));
    ASSERT_EQ(s.points.size(), cloud.size()) << name;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      // 9 significant digits identify a float uniquely, so even ascii is exact.
      EXPECT_EQ(s.points[i].x, cloud[i].x) << name;
      EXPECT_EQ(s.points[i].y, cloud[i].y) << name;
      EXPECT_EQ(s.points[i].z, cloud[i].z) << name;
      EXPECT_EQ(s.points[i].intensity, cloud[i].intensity) << name;
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, CloudRoundTrip, ::testing::Range(0, 5));

// ---------------------------------------------------------------------------

TEST(Trajectory, SingleIdentityLine) {
  const Trajectory t = parse_trajectory("0 0 0 0 0 0 0 1\n");
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t.poses()[0].t, 0.0);
  EXPECT_TRUE(t.poses()[0].pose.isApprox(Pose::Identity()));
}

TEST(Trajectory, EqualTimestampsNameTheLine) {
  try {
    parse_trajectory("0 0 0 0 0 0 0 1\n0 1 0 0 0 0 0 1\n");
    FAIL();
  } catch (const UsageError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(Trajectory, NearUnitQuaternionIsRenormalized) {
  const double s = 0.999999 / std::sqrt(2.0);
  char line[128];
  std::snprintf(line, sizeof line, "0 1 2 3 0 0 %.17g %.17g\n", s, s);
  const Trajectory t = parse_trajectory(line);
  const Eigen::Matrix3d r = t.poses()[0].pose.linear();
  EXPECT_TRUE(is_orthonormal(r, 1e-12));
  EXPECT_NEAR(r(1, 0), 1.0, 1e-9);  // 90 degree yaw
}

TEST(Trajectory, RejectsNanAndNonUnitQuaternions) {
  EXPECT_THROW(parse_trajectory("0 nan 0 0 0 0 0 1\n"), UsageError);
  EXPECT_THROW(parse_trajectory("0 0 0 0 0 0 0 0.9\n"), UsageError);
  EXPECT_THROW(parse_trajectory("0 0 0 0 0 0 1\n"), UsageError);
}

TEST(Trajectory, KnotReturnsExactPose) {
  const Trajectory t = parse_trajectory("0 0 0 0 0 0 0 1\n0.7 1.3 -2.1 0.4 0 0 0.3826834323650898 0.9238795325112867\n"
                                        "1.9 5 5 5 0 0 0 1\n");
  const Pose p = t.pose_at(0.7);
  EXPECT_EQ(p.matrix(), t.poses()[1].pose.matrix());
}

TEST(Trajectory, InterpolatesTranslationAndRotation) {
  Trajectory t({{0.0, make_pose_2d(0, 0, 0)}, {1.0, make_pose_2d(2, 0, deg2rad(90))}});
  const Pose mid = t.pose_at(0.5);
  EXPECT_NEAR(mid.translation().x(), 1.0, 1e-12);
  EXPECT_NEAR(Eigen::AngleAxisd(mid.linear()).angle(), deg2rad(45), 1e-12);
  EXPECT_THROW(t.pose_at(1.5), WindowError);
}

TEST(Trajectory, SerializationRoundTrip) {
  Trajectory t({{0.25, make_pose_2d(1.5, -2, 0.3, 0.1)}, {1.0 / 3.0, make_pose_2d(2, 0, -1.2)}});
  const Trajectory u = parse_trajectory(serialize_trajectory(t));
  ASSERT_EQ(u.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(u.poses()[i].t, t.poses()[i].t);
    EXPECT_TRUE(u.poses()[i].pose.isApprox(t.poses()[i].pose, 1e-15));
  }
}

// ---------------------------------------------------------------------------

struct ManifestFixture : ::testing::Test {
  ScratchDir dir;
  void cloud(const std::string& name) { write_bytes(dir / name, floats_le({1, 0, 0, 0.5f})); }
  void manifest(const std::string& text) { write_bytes(dir / "manifest.csv", text); }
};

TEST_F(ManifestFixture, ThreeRowsWithIdentityTrajectory) {
  for (auto n : {"a.bin", "b.bin", "c.bin"}) cloud(n);
  manifest("timestamp,path\n0.2,b.bin\n0.1,a.bin\n0.3,c.bin\n");
  Trajectory traj({{0.0, Pose::Identity()}, {1.0, Pose::Identity()}});
  auto stream = load_scan_sequence(dir / "manifest.csv", traj);
  const auto scans = stream.collect();
  ASSERT_EQ(scans.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_TRUE(scans[i].sensor_pose.isApprox(Pose::Identity()));
    if (i) {
      EXPECT_LE(scans[i - 1].timestamp, scans[i].timestamp);
    }
  }
  EXPECT_EQ(scans[0].timestamp, 0.1);
}

TEST_F(ManifestFixture, PoseInterpolatedAtMidpoint) {
  cloud("a.bin");
  manifest("timestamp,path\n0.5,a.bin\n");
  Trajectory traj({{0.0, Pose::Identity()}, {1.0, make_pose_2d(2, 0, 0)}});
  const auto scans = load_scan_sequence(dir / "manifest.csv", traj).collect();
  EXPECT_NEAR(scans[0].sensor_position().x(), 1.0, 1e-12);
}

TEST_F(ManifestFixture, ScanOutsideTrajectorySpan) {
  cloud("a.bin");
  manifest("timestamp,path\n2.0,a.bin\n");
  Trajectory traj({{0.0, Pose::Identity()}, {1.5, Pose::Identity()}});
  EXPECT_THROW(load_scan_sequence(dir / "manifest.csv", traj), WindowError);
}

TEST_F(ManifestFixture, MissingCloudNamesRow) {
  cloud("a.bin");
  manifest("timestamp,path\n0.0,a.bin\n0.1,missing.bin\n");
  try {
    load_scan_sequence(dir / "manifest.csv");
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos);
  }
}

TEST_F(ManifestFixture, InlinePoseColumns) {
  cloud("a.bin");
  manifest("timestamp,path,tx,ty,tz,qx,qy,qz,qw\n0.0,a.bin,3,4,0,0,0,0,1\n");
  const auto scans = load_scan_sequence(dir / "manifest.csv").collect();
  EXPECT_EQ(scans[0].sensor_position().x(), 3.0);
  EXPECT_EQ(scans[0].sensor_position().y(), 4.0);
}

// ---------------------------------------------------------------------------

TEST(WriteCsv, EmptyRecordSetIsHeaderOnly) {
  EXPECT_EQ(to_csv_string({{"a", "b"}, {}}), "a,b\n");
}

TEST(WriteCsv, NineSignificantDigits) {
  EXPECT_EQ(to_csv_string({{"a", "b"}, {{1.0, 2.0}}}), "a,b\n1.00000000,2.00000000\n");
  EXPECT_EQ(format_float(0.1), "0.100000000");
}

TEST(WriteCsv, ArityMismatchFailsBeforeWriting) {
  ScratchDir dir;
  const CsvTable bad{{"a", "b"}, {{1.0, 2.0}, {1.0}}};
  EXPECT_THROW(write_csv(bad, dir / "out.csv"), UsageError);
  EXPECT_FALSE(std::filesystem::exists(dir / "out.csv"));
}

TEST(WriteCsv, UnwritablePathIsIoError) {
  ScratchDir dir;
  EXPECT_THROW(write_csv({{"a"}, {}}, dir / "no" / "such" / "dir.csv"), IoError);
}

TEST(WriteCsv, QuotedCellsRoundTrip) {
  const CsvTable t{{"name", "v"}, {{std::string("a,\"b\""), std::int64_t{3}}, {CsvCell{}, 0.5}}};
  const CsvText back = parse_csv(to_csv_string(t));
  ASSERT_EQ(back.rows.size(), 2u);
  EXPECT_EQ(back.rows[0][0], "a,\"b\"");
  EXPECT_EQ(back.rows[0][1], "3");
  EXPECT_EQ(back.rows[1][0], "");
}

TEST(ParseDouble, StrictAndAcceptsInfinity) {
  EXPECT_EQ(parse_double("2.5"), 2.5);
  EXPECT_EQ(parse_double(" +3 "), 3.0);
  EXPECT_TRUE(std::isinf(*parse_double("inf")));
  EXPECT_FALSE(parse_double("2.5x").has_value());
  EXPECT_FALSE(parse_double("").has_value());
}

}  // namespace
}  // namespace snowvis

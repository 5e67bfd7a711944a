// Copyright 2026 The snowvis Authors
// SPDX-License-Identifier: Apache-2.0
//
// Point clouds, scan sequences and trajectories on disk.
//
// Two cloud formats are understood:
//   * PCD v0.7 (ascii and binary, not binary_compressed) with at least the
//     fields x y z; intensity and a per-point time offset (t / time) optional.
//   * raw_xyzi: packed records of four little-endian float32 (x, y, z, i),
//     16 bytes per point, no header.
//
// Trajectories are whitespace-separated "t tx ty tz qx qy qz qw" lines.

#ifndef SNOWVIS_POINTCLOUD_IO_HPP
#define SNOWVIS_POINTCLOUD_IO_HPP

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "snowvis/csv.hpp"
#include "snowvis/errors.hpp"
#include "snowvis/geometry.hpp"

namespace snowvis {

struct LidarPoint {
  float x = 0.0f;
  float y = 0.0f;
  float z = 0.0f;
  float intensity = 0.0f;  // normalized to [0, 1] on load
  float time_offset = 0.0f;  // seconds from scan start

  Vec3 position() const { return {x, y, z}; }
};

struct Scan {
  std::vector<LidarPoint> points;
  double timestamp = 0.0;
  Pose sensor_pose = Pose::Identity();  // sensor -> world

  Vec3 sensor_position() const { return sensor_pose.translation(); }
};

/// Throws UsageError when the scan violates its invariants.
inline void validate(const Scan& scan) {
  if (!std::isfinite(scan.timestamp)) throw UsageError("scan timestamp is not finite");
  if (!is_orthonormal(scan.sensor_pose.linear())) {
    throw UsageError("scan pose rotation is not orthonormal");
  }
  if (scan.points.empty()) throw UsageError("scan has no points");
}

enum class CloudFormat { pcd, raw_xyzi };

inline CloudFormat parse_cloud_format(std::string_view tag) {
  if (tag == "pcd") return CloudFormat::pcd;
  if (tag == "raw_xyzi" || tag == "bin") return CloudFormat::raw_xyzi;
  throw UsageError("unknown cloud format '" + std::string(tag) + "' (expected pcd or raw_xyzi)");
}

inline const char* to_string(CloudFormat f) { return f == CloudFormat::pcd ? "pcd" : "raw_xyzi"; }

/// .pcd -> pcd, anything else (.bin) -> raw_xyzi.
inline CloudFormat format_from_extension(const std::filesystem::path& path) {
  return path.extension() == ".pcd" ? CloudFormat::pcd : CloudFormat::raw_xyzi;
}

enum class PcdEncoding { ascii, binary };

namespace detail {

inline float load_le_float(const unsigned char* p) {
  std::uint32_t bits = 0;
  std::memcpy(&bits, p, 4);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
  return std::bit_cast<float>(bits);
}

inline void store_le_float(float v, std::string& out) {
  auto bits = std::bit_cast<std::uint32_t>(v);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
  char buf[4];
  std::memcpy(buf, &bits, 4);
  out.append(buf, 4);
}

inline void normalize_intensity(std::vector<LidarPoint>& pts) {
  const bool byte_scale =
      std::any_of(pts.begin(), pts.end(), [](const LidarPoint& p) { return p.intensity > 1.0f; });
  for (auto& p : pts) {
    float v = byte_scale ? p.intensity / 255.0f : p.intensity;
    p.intensity = std::clamp(v, 0.0f, 1.0f);
  }
}

inline void check_point(const LidarPoint& p, std::uint64_t offset) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z) ||
      !std::isfinite(p.intensity)) {
    throw ParseError("non-finite point value", offset);
  }
}

struct PcdField {
  std::string name;
  int size = 4;
  char type = 'F';
  int count = 1;
  int offset = 0;  // byte offset within a binary record
};

inline double read_pcd_scalar(const unsigned char* p, const PcdField& f) {
  auto le = [&](auto tag) {
    using T = decltype(tag);
    T v;
    std::memcpy(&v, p, sizeof(T));
    return static_cast<double>(v);
  };
  switch (f.type) {
    case 'F':
      return f.size == 8 ? le(double{}) : static_cast<double>(load_le_float(p));
    case 'U':
      return f.size == 1 ? le(std::uint8_t{}) : f.size == 2 ? le(std::uint16_t{}) : le(std::uint32_t{});
    default:
      return f.size == 1 ? le(std::int8_t{}) : f.size == 2 ? le(std::int16_t{}) : le(std::int32_t{});
  }
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace detail

/// Parses a raw_xyzi byte buffer. A trailing partial record is an error at the
/// offset where the data ran out.
inline std::vector<LidarPoint> parse_raw_xyzi(std::string_view bytes) {
  constexpr std::size_t kRecord = 16;
  if (bytes.size() % kRecord != 0) {
    throw ParseError("truncated raw_xyzi record " + std::to_string(bytes.size() / kRecord) +
                         ": expected 16 bytes per point, payload ends early",
                     bytes.size());
  }
  std::vector<LidarPoint> pts(bytes.size() / kRecord);
  const auto* base = reinterpret_cast<const unsigned char*>(bytes.data());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const unsigned char* r = base + i * kRecord;
    pts[i] = {detail::load_le_float(r), detail::load_le_float(r + 4), detail::load_le_float(r + 8),
              detail::load_le_float(r + 12), 0.0f};
    detail::check_point(pts[i], i * kRecord);
  }
  detail::normalize_intensity(pts);
  return pts;
}

inline std::vector<LidarPoint> parse_pcd(std::string_view bytes) {
  using detail::PcdField;
  std::vector<PcdField> fields;
  std::size_t points = 0;
  bool have_points = false;
  std::size_t width = 0, height = 1;
  std::string data_kind;
  std::size_t pos = 0;

  auto header_error = [&](const std::string& msg, std::size_t off) -> ParseError {
    return ParseError("pcd header: " + msg, off);
  };

  while (data_kind.empty()) {
    if (pos >= bytes.size()) throw header_error("missing DATA line", pos);
    std::size_t eol = bytes.find('\n', pos);
    if (eol == std::string_view::npos) eol = bytes.size();
    const std::string_view line = bytes.substr(pos, eol - pos);
    const std::size_t line_start = pos;
    pos = std::min(eol + 1, bytes.size());
    auto tok = detail::split_ws(line);
    if (tok.empty() || tok[0].front() == '#') continue;
    const std::string_view key = tok[0];
    auto to_int = [&](std::string_view s) {
      std::size_t v = 0;
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || p != s.data() + s.size()) {
        throw header_error("bad integer '" + std::string(s) + "'", line_start);
      }
      return v;
    };
    if (key == "FIELDS") {
      fields.clear();
      for (std::size_t i = 1; i < tok.size(); ++i) fields.push_back({std::string(tok[i])});
    } else if (key == "SIZE" || key == "TYPE" || key == "COUNT") {
      if (tok.size() != fields.size() + 1) throw header_error(std::string(key) + " arity", line_start);
      for (std::size_t i = 1; i < tok.size(); ++i) {
        if (key == "SIZE") {
          fields[i - 1].size = static_cast<int>(to_int(tok[i]));
        } else if (key == "TYPE") {
          fields[i - 1].type = tok[i].front();
        } else {
          fields[i - 1].count = static_cast<int>(to_int(tok[i]));
        }
      }
    } else if (key == "WIDTH" && tok.size() == 2) {
      width = to_int(tok[1]);
    } else if (key == "HEIGHT" && tok.size() == 2) {
      height = to_int(tok[1]);
    } else if (key == "POINTS" && tok.size() == 2) {
      points = to_int(tok[1]);
      have_points = true;
    } else if (key == "DATA" && tok.size() == 2) {
      data_kind = std::string(tok[1]);
    }
  }
  if (!have_points) points = width * height;

  int stride = 0;
  int ix = -1, iy = -1, iz = -1, ii = -1, it = -1;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    auto& f = fields[i];
    const bool ok_size = (f.type == 'F' && (f.size == 4 || f.size == 8)) ||
                         ((f.type == 'U' || f.type == 'I') && (f.size == 1 || f.size == 2 || f.size == 4));
    if (!ok_size) throw header_error("unsupported field type for '" + f.name + "'", 0);
    f.offset = stride;
    stride += f.size * f.count;
    const int idx = static_cast<int>(i);
    if (f.name == "x") ix = idx;
    if (f.name == "y") iy = idx;
    if (f.name == "z") iz = idx;
    if (f.name == "intensity") ii = idx;
    if (f.name == "t" || f.name == "time") it = idx;
  }
  if (ix < 0 || iy < 0 || iz < 0) throw header_error("fields x y z required", 0);

  std::vector<LidarPoint> pts(points);
  if (data_kind == "binary") {
    const std::size_t need = points * static_cast<std::size_t>(stride);
    if (bytes.size() - pos < need) {
      throw ParseError("pcd binary payload truncated: need " + std::to_string(need) + " bytes",
                       bytes.size());
    }
    const auto* base = reinterpret_cast<const unsigned char*>(bytes.data() + pos);
    for (std::size_t n = 0; n < points; ++n) {
      const unsigned char* r = base + n * static_cast<std::size_t>(stride);
      auto get = [&](int f) { return detail::read_pcd_scalar(r + fields[f].offset, fields[f]); };
      auto& p = pts[n];
      p.x = static_cast<float>(get(ix));
      p.y = static_cast<float>(get(iy));
      p.z = static_cast<float>(get(iz));
      if (ii >= 0) p.intensity = static_cast<float>(get(ii));
      if (it >= 0) p.time_offset = static_cast<float>(get(it));
      detail::check_point(p, pos + n * static_cast<std::size_t>(stride));
    }
  } else if (data_kind == "ascii") {
    // Token index of the first element of each field.
    std::vector<int> tok_index(fields.size());
    int ntok = 0;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      tok_index[i] = ntok;
      ntok += fields[i].count;
    }
    std::size_t n = 0;
    while (n < points) {
      if (pos >= bytes.size()) {
        throw ParseError("pcd ascii payload truncated after " + std::to_string(n) + " points",
                         bytes.size());
      }
      std::size_t eol = bytes.find('\n', pos);
      if (eol == std::string_view::npos) eol = bytes.size();
      const std::string_view line = bytes.substr(pos, eol - pos);
      const std::size_t line_start = pos;
      pos = std::min(eol + 1, bytes.size());
      auto tok = detail::split_ws(line);
      if (tok.empty()) continue;
      if (static_cast<int>(tok.size()) < ntok) {
        throw ParseError("pcd ascii record has " + std::to_string(tok.size()) + " values, expected " +
                             std::to_string(ntok),
                         line_start);
      }
      auto get = [&](int f) -> float {
        const std::string_view s = tok[tok_index[f]];
        float v = 0.0f;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size()) {
          throw ParseError("bad number '" + std::string(s) + "'",
                           line_start + static_cast<std::size_t>(s.data() - line.data()));
        }
        return v;
      };
      auto& p = pts[n];
      p.x = get(ix);
      p.y = get(iy);
      p.z = get(iz);
      if (ii >= 0) p.intensity = get(ii);
      if (it >= 0) p.time_offset = get(it);
      detail::check_point(p, line_start);
      ++n;
    }
  } else {
    throw header_error("unsupported DATA encoding '" + data_kind + "'", pos);
  }
  detail::normalize_intensity(pts);
  return pts;
}

namespace detail {

inline std::optional<double> timestamp_from_filename(const std::filesystem::path& path) {
  return parse_double(path.stem().string());
}

}  // namespace detail

/// Loads a cloud as a Scan with identity pose. The timestamp is `timestamp`
/// when given, else the numeric file stem (e.g. "1549.25.bin"), else 0.
inline Scan load_pointcloud(const std::filesystem::path& path, CloudFormat format,
                            std::optional<double> timestamp = std::nullopt) {
  const std::string bytes = read_file(path);
  Scan scan;
  scan.points = format == CloudFormat::pcd ? parse_pcd(bytes) : parse_raw_xyzi(bytes);
  scan.timestamp = timestamp.value_or(detail::timestamp_from_filename(path).value_or(0.0));
  return scan;
}

inline std::string serialize_raw_xyzi(std::span<const LidarPoint> pts) {
  std::string out;
  out.reserve(pts.size() * 16);
  for (const auto& p : pts) {
    detail::store_le_float(p.x, out);
    detail::store_le_float(p.y, out);
    detail::store_le_float(p.z, out);
    detail::store_le_float(p.intensity, out);
  }
  return out;
}

inline std::string serialize_pcd(std::span<const LidarPoint> pts, PcdEncoding enc) {
  std::string out =
      "# .PCD v0.7 - Point Cloud Data file format\n"
      "VERSION 0.7\n"
      "FIELDS x y z intensity\n"
      "SIZE 4 4 4 4\n"
      "TYPE F F F F\n"
      "COUNT 1 1 1 1\n";
  out += "WIDTH " + std::to_string(pts.size()) + "\nHEIGHT 1\nVIEWPOINT 0 0 0 1 0 0 0\n";
  out += "POINTS " + std::to_string(pts.size()) + "\n";
  if (enc == PcdEncoding::binary) {
    out += "DATA binary\n";
    out += serialize_raw_xyzi(pts);
    return out;
  }
  out += "DATA ascii\n";
  char buf[128];
  for (const auto& p : pts) {
    std::snprintf(buf, sizeof(buf), "%.9g %.9g %.9g %.9g\n", p.x, p.y, p.z, p.intensity);
    out += buf;
  }
  return out;
}

inline void write_pointcloud(std::span<const LidarPoint> pts, const std::filesystem::path& path,
                             CloudFormat format, PcdEncoding enc = PcdEncoding::binary) {
  atomic_write_file(path, format == CloudFormat::pcd ? serialize_pcd(pts, enc)
                                                     : serialize_raw_xyzi(pts));
}

// ---------------------------------------------------------------------------
// Trajectories

struct TimedPose {
  double t = 0.0;
  Pose pose = Pose::Identity();
};

class Trajectory {
 public:
  Trajectory() = default;

  /// Throws UsageError unless timestamps are strictly increasing.
  explicit Trajectory(std::vector<TimedPose> poses) : poses_(std::move(poses)) {
    for (std::size_t i = 1; i < poses_.size(); ++i) {
      if (!(poses_[i].t > poses_[i - 1].t)) {
        throw UsageError("trajectory timestamps not strictly increasing at index " + std::to_string(i));
      }
    }
  }

  const std::vector<TimedPose>& poses() const { return poses_; }
  std::size_t size() const { return poses_.size(); }
  bool empty() const { return poses_.empty(); }
  double start_time() const { return poses_.front().t; }
  double end_time() const { return poses_.back().t; }
  bool covers(double t) const { return !empty() && t >= start_time() && t <= end_time(); }

  /// Interpolated pose between the bracketing knots; exact at knots. No
  /// extrapolation.
  Pose pose_at(double t) const {
    if (!covers(t)) {
      throw WindowError(WindowError::Kind::outside_window,
                        "time " + format_float(t) + " outside trajectory span");
    }
    auto it = std::lower_bound(poses_.begin(), poses_.end(), t,
                               [](const TimedPose& p, double v) { return p.t < v; });
    if (it->t == t) return it->pose;
    const auto& b = *it;
    const auto& a = *(it - 1);
    return interpolate_pose(a.pose, b.pose, (t - a.t) / (b.t - a.t));
  }

  /// Index of the knot nearest to `t`.
  std::size_t nearest_index(double t) const {
    auto it = std::lower_bound(poses_.begin(), poses_.end(), t,
                               [](const TimedPose& p, double v) { return p.t < v; });
    if (it == poses_.end()) return poses_.size() - 1;
    const auto i = static_cast<std::size_t>(it - poses_.begin());
    if (i > 0 && (t - poses_[i - 1].t) <= (it->t - t)) return i - 1;
    return i;
  }

 private:
  std::vector<TimedPose> poses_;
};

inline Trajectory parse_trajectory(std::string_view text, double quaternion_tolerance = 1e-6) {
  std::vector<TimedPose> poses;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    auto tok = detail::split_ws(line);
    if (tok.empty() || tok[0].front() == '#') continue;
    const std::string where = "trajectory line " + std::to_string(line_no);
    if (tok.size() != 8) throw UsageError(where + ": expected 8 fields, got " + std::to_string(tok.size()));
    double v[8];
    for (int i = 0; i < 8; ++i) {
      auto d = parse_double(tok[i]);
      if (!d) throw UsageError(where + ": bad number '" + std::string(tok[i]) + "'");
      if (!std::isfinite(*d)) throw UsageError(where + ": non-finite field");
      v[i] = *d;
    }
    Eigen::Quaterniond q(v[7], v[4], v[5], v[6]);
    if (std::abs(q.norm() - 1.0) > quaternion_tolerance + 1e-12) {
      throw UsageError(where + ": quaternion norm " + format_float(q.norm()) + " not unit");
    }
    if (!poses.empty() && !(v[0] > poses.back().t)) {
      throw UsageError(where + ": timestamp not strictly increasing");
    }
    poses.push_back({v[0], make_pose(Vec3(v[1], v[2], v[3]), q)});
  }
  return Trajectory(std::move(poses));
}

inline Trajectory load_trajectory(const std::filesystem::path& path, double quaternion_tolerance = 1e-6) {
  return parse_trajectory(read_file(path), quaternion_tolerance);
}

inline std::string serialize_trajectory(const Trajectory& traj) {
  std::string out = "# timestamp tx ty tz qx qy qz qw\n";
  char buf[320];
  for (const auto& p : traj.poses()) {
    const Eigen::Quaterniond q(p.pose.linear());
    const Vec3 t = p.pose.translation();
    std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g\n", p.t, t.x(),
                  t.y(), t.z(), q.x(), q.y(), q.z(), q.w());
    out += buf;
  }
  return out;
}

inline void write_trajectory(const Trajectory& traj, const std::filesystem::path& path) {
  atomic_write_file(path, serialize_trajectory(traj));
}

// ---------------------------------------------------------------------------
// Scan manifests: CSV "timestamp,path[,tx,ty,tz,qx,qy,qz,qw]", paths relative
// to the manifest's directory.

struct ManifestEntry {
  double timestamp = 0.0;
  std::filesystem::path cloud;
  std::optional<Pose> pose;
  std::size_t row = 0;  // 1-based data row in the manifest file
};

inline std::vector<ManifestEntry> parse_manifest(std::string_view text,
                                                 const std::filesystem::path& base_dir) {
  const CsvText csv = parse_csv(text);
  const auto c_t = csv.column("timestamp");
  const auto c_p = csv.column("path");
  if (!c_t || !c_p) throw UsageError("manifest header must contain timestamp and path");
  const char* pose_names[] = {"tx", "ty", "tz", "qx", "qy", "qz", "qw"};
  std::optional<std::size_t> c_pose[7];
  bool has_pose = true;
  for (int i = 0; i < 7; ++i) {
    c_pose[i] = csv.column(pose_names[i]);
    has_pose = has_pose && c_pose[i].has_value();
  }
  std::vector<ManifestEntry> entries;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& row = csv.rows[r];
    const std::string where = "manifest row " + std::to_string(r + 1);
    if (row.size() != csv.header.size()) throw UsageError(where + ": field count mismatch");
    ManifestEntry e;
    e.row = r + 1;
    auto t = parse_double(row[*c_t]);
    if (!t || !std::isfinite(*t)) throw UsageError(where + ": bad timestamp");
    e.timestamp = *t;
    e.cloud = std::filesystem::path(row[*c_p]);
    if (e.cloud.is_relative()) e.cloud = base_dir / e.cloud;
    if (has_pose && !row[*c_pose[0]].empty()) {
      double v[7];
      for (int i = 0; i < 7; ++i) {
        auto d = parse_double(row[*c_pose[i]]);
        if (!d || !std::isfinite(*d)) throw UsageError(where + ": bad pose field " + pose_names[i]);
        v[i] = *d;
      }
      e.pose = make_pose(Vec3(v[0], v[1], v[2]), Eigen::Quaterniond(v[6], v[3], v[4], v[5]));
    }
    entries.push_back(std::move(e));
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const ManifestEntry& a, const ManifestEntry& b) { return a.timestamp < b.timestamp; });
  return entries;
}

inline CsvTable manifest_table(std::span<const ManifestEntry> entries) {
  CsvTable table{{"timestamp", "path", "tx", "ty", "tz", "qx", "qy", "qz", "qw"}, {}};
  for (const auto& e : entries) {
    std::vector<CsvCell> row{e.timestamp, e.cloud.generic_string()};
    if (e.pose) {
      const Eigen::Quaterniond q(e.pose->linear());
      const Vec3 t = e.pose->translation();
      for (double v : {t.x(), t.y(), t.z(), q.x(), q.y(), q.z(), q.w()}) row.emplace_back(v);
    } else {
      row.resize(9);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

/// Single-consumer, timestamp-ordered stream of scans. Clouds are read lazily;
/// poses come from the trajectory when one is supplied, else from the
/// manifest row, else identity.
class ScanStream {
 public:
  ScanStream(std::vector<ManifestEntry> entries, std::optional<Trajectory> trajectory)
      : entries_(std::move(entries)), trajectory_(std::move(trajectory)) {
    for (const auto& e : entries_) {
      if (!std::filesystem::exists(e.cloud)) {
        throw IoError("manifest row " + std::to_string(e.row) + ": missing cloud file " + e.cloud.string());
      }
      if (trajectory_ && !trajectory_->covers(e.timestamp)) {
        throw WindowError(WindowError::Kind::outside_window,
                          "manifest row " + std::to_string(e.row) + ": scan time " +
                              format_float(e.timestamp) + " outside trajectory span (no extrapolation)");
      }
    }
  }

  std::size_t size() const { return entries_.size(); }
  const std::vector<ManifestEntry>& entries() const { return entries_; }

  std::optional<Scan> next() {
    if (cursor_ >= entries_.size()) return std::nullopt;
    return load(cursor_++);
  }

  Scan load(std::size_t i) const {
    const auto& e = entries_.at(i);
    Scan scan = load_pointcloud(e.cloud, format_from_extension(e.cloud), e.timestamp);
    if (trajectory_) {
      scan.sensor_pose = trajectory_->pose_at(e.timestamp);
    } else if (e.pose) {
      scan.sensor_pose = *e.pose;
    }
    return scan;
  }

  std::vector<Scan> collect() {
    std::vector<Scan> out;
    while (auto s = next()) out.push_back(std::move(*s));
    return out;
  }

 private:
  std::vector<ManifestEntry> entries_;
  std::optional<Trajectory> trajectory_;
  std::size_t cursor_ = 0;
};

inline ScanStream load_scan_sequence(const std::filesystem::path& manifest,
                                     std::optional<Trajectory> trajectory = std::nullopt) {
  auto entries = parse_manifest(read_file(manifest), manifest.parent_path());
  return ScanStream(std::move(entries), std::move(trajectory));
}

}  // namespace snowvis

#endif  // SNOWVIS_POINTCLOUD_IO_HPP

#pragma once

// ScanLog: pose-stamped raw echoes on disk.
//
// Layout: an ASCII header of key=value lines terminated by a blank line, then
// fixed-size little-endian records
//   f64 timestamp_s | u32 radar_index | f64 x_m | f64 y_m | f64 theta_rad |
//   f32 sample[samples_per_record]

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "uwbsar/core.hpp"
#include "uwbsar/image_io.hpp"
#include "uwbsar/radar_model.hpp"

namespace uwbsar {

inline constexpr std::uint32_t kScanLogVersion = 1;

struct ScanLogHeader {
  std::uint32_t version = kScanLogVersion;
  RadarConfig radar;                     // mount_angle_rad is taken per radar
  std::vector<double> mount_angles_rad;  // one per radar
  std::size_t samples_per_record = 0;

  std::size_t radar_count() const { return mount_angles_rad.size(); }
  RadarConfig config_for(std::size_t radar_index) const {
    RadarConfig c = radar;
    c.mount_angle_rad = mount_angles_rad.at(radar_index);
    return c;
  }
  std::vector<RadarConfig> configs() const {
    std::vector<RadarConfig> out;
    for (std::size_t i = 0; i < radar_count(); ++i) out.push_back(config_for(i));
    return out;
  }
  bool operator==(const ScanLogHeader&) const = default;
};

struct ScanRecord {
  double timestamp_s = 0.0;
  std::uint32_t radar_index = 0;
  Pose2 pose;
  std::vector<float> samples;
  bool operator==(const ScanRecord&) const = default;
};

struct ScanLog {
  ScanLogHeader header;
  std::vector<ScanRecord> records;
};

inline void write_scan_log(std::ostream& out, const ScanLog& log) {
  const auto& h = log.header;
  h.radar.validate();
  if (h.radar_count() == 0) throw Error("write_scan_log: no radars");
  auto d = [](double v) { return detail::format_double(v); };
  out << "format=uwbsar-scanlog\n"
      << "version=" << h.version << '\n'
      << "sample_rate_hz=" << d(h.radar.sample_rate_hz) << '\n'
      << "center_freq_hz=" << d(h.radar.center_freq_hz) << '\n'
      << "bandwidth_hz=" << d(h.radar.bandwidth_hz) << '\n'
      << "pulse_amplitude_v=" << d(h.radar.pulse_amplitude_v) << '\n'
      << "beamwidth_rad=" << d(h.radar.beamwidth_rad) << '\n'
      << "range_min_m=" << d(h.radar.range_min_m) << '\n'
      << "range_max_m=" << d(h.radar.range_max_m) << '\n'
      << "radar_count=" << h.radar_count() << '\n';
  for (std::size_t i = 0; i < h.radar_count(); ++i) out << "mount_angle_rad." << i << '=' << d(h.mount_angles_rad[i]) << '\n';
  out << "samples_per_record=" << h.samples_per_record << "\n\n";
  for (std::size_t i = 0; i < log.records.size(); ++i) {
    const auto& r = log.records[i];
    if (r.samples.size() != h.samples_per_record)
      throw Error("write_scan_log: record " + std::to_string(i) + " has wrong sample count");
    detail::put_f64le(out, r.timestamp_s);
    detail::put_u32le(out, r.radar_index);
    detail::put_f64le(out, r.pose.x_m);
    detail::put_f64le(out, r.pose.y_m);
    detail::put_f64le(out, r.pose.theta_rad);
    for (float s : r.samples) detail::put_f32le(out, s);
  }
  if (!out) throw Error("write_scan_log: write failed");
}

inline ScanLog read_scan_log(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  bool terminated = false;
  while (std::getline(in, line)) {
    if (line.empty()) {
      terminated = true;
      break;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error("scan log: malformed header line: " + line);
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  if (!terminated) throw Error("scan log: header not terminated by a blank line");
  auto get = [&](const std::string& k) -> const std::string& {
    const auto it = kv.find(k);
    if (it == kv.end()) throw Error("scan log: missing header key " + k);
    return it->second;
  };
  auto num = [&](const std::string& k) {
    try {
      std::size_t used = 0;
      const double v = std::stod(get(k), &used);
      if (used != get(k).size() || !std::isfinite(v)) throw std::invalid_argument(k);
      return v;
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      throw Error("scan log: bad value for " + k);
    }
  };
  auto count = [&](const std::string& k) {
    const double v = num(k);
    if (v < 0 || v != std::floor(v)) throw Error("scan log: " + k + " must be a non-negative integer");
    return static_cast<std::size_t>(v);
  };

  if (get("format") != "uwbsar-scanlog") throw Error("scan log: unknown format " + get("format"));
  ScanLog log;
  auto& h = log.header;
  h.version = static_cast<std::uint32_t>(count("version"));
  if (h.version != kScanLogVersion) throw Error("scan log: unsupported version " + std::to_string(h.version));
  h.radar.sample_rate_hz = num("sample_rate_hz");
  h.radar.center_freq_hz = num("center_freq_hz");
  h.radar.bandwidth_hz = num("bandwidth_hz");
  h.radar.pulse_amplitude_v = num("pulse_amplitude_v");
  h.radar.beamwidth_rad = num("beamwidth_rad");
  h.radar.range_min_m = num("range_min_m");
  h.radar.range_max_m = num("range_max_m");
  const std::size_t radars = count("radar_count");
  if (radars == 0) throw Error("scan log: radar_count must be >= 1");
  for (std::size_t i = 0; i < radars; ++i) h.mount_angles_rad.push_back(num("mount_angle_rad." + std::to_string(i)));
  h.radar.mount_angle_rad = h.mount_angles_rad.front();
  h.samples_per_record = count("samples_per_record");
  if (h.samples_per_record == 0) throw Error("scan log: samples_per_record must be >= 1");
  try {
    h.radar.validate();
  } catch (const Error& e) {
    throw Error(std::string("scan log: ") + e.what());
  }

  for (std::size_t idx = 0;; ++idx) {
    if (in.peek() == std::char_traits<char>::eof()) break;
    const std::string where = "scan log: record " + std::to_string(idx);
    double ts, x, y, th;
    std::uint32_t radar;
    if (!detail::get_f64le(in, ts) || !detail::get_u32le(in, radar) || !detail::get_f64le(in, x) ||
        !detail::get_f64le(in, y) || !detail::get_f64le(in, th))
      throw Error(where + ": truncated record");
    ScanRecord r;
    r.timestamp_s = ts;
    r.radar_index = radar;
    if (radar >= radars) throw Error(where + ": radar index out of range");
    if (!std::isfinite(ts)) throw Error(where + ": non-finite timestamp");
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(th)) throw Error(where + ": non-finite pose");
    r.pose = Pose2(x, y, th);
    r.samples.resize(h.samples_per_record);
    for (auto& s : r.samples) {
      if (!detail::get_f32le(in, s)) throw Error(where + ": truncated record");
      if (!std::isfinite(s)) throw Error(where + ": non-finite sample");
    }
    log.records.push_back(std::move(r));
  }
  return log;
}

inline void write_scan_log(const std::string& path, const ScanLog& log) {
  auto out = detail::open_binary_out(path);
  write_scan_log(out, log);
}

inline ScanLog read_scan_log(const std::string& path) {
  auto in = detail::open_binary_in(path);
  return read_scan_log(in);
}

inline std::vector<RawScan> to_raw_scans(const ScanLog& log) {
  std::vector<RawScan> out;
  out.reserve(log.records.size());
  for (const auto& r : log.records) {
    RawScan s;
    s.pose = r.pose;
    s.radar_index = r.radar_index;
    s.echo.sample_rate_hz = log.header.radar.sample_rate_hz;
    s.echo.t0_s = 0.0;
    s.echo.samples.assign(r.samples.begin(), r.samples.end());
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace uwbsar

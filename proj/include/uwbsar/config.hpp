#pragma once

// RunConfig: every tunable of the pipeline as a flat key=value file. All keys
// have defaults, so an empty file is a valid configuration.

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "uwbsar/core.hpp"
#include "uwbsar/features.hpp"
#include "uwbsar/image_post.hpp"
#include "uwbsar/loopclose.hpp"
#include "uwbsar/radar_model.hpp"

namespace uwbsar {

struct SimParams {
  double scan_spacing_m = 0.025;
  double snr_db = 20.0;
  double reference_range_m = 1.0;  // SNR is referred to an rcs-1 echo at this range
  double noise_std_v = -1.0;       // >= 0 overrides the SNR-derived value
  double speed_mps = 0.1;          // only used for record timestamps
  std::size_t n_bins = 0;          // 0: just enough to cover range_max
};

struct GridParams {
  double resolution_m = 0.005;
  // width/height 0: bounding box of the radar poses padded by range_max.
  std::size_t width_px = 0;
  std::size_t height_px = 0;
  double origin_x_m = 0.0;
  double origin_y_m = 0.0;
};

struct RunConfig {
  RadarConfig radar;
  std::vector<double> mount_angles_rad{kPi / 2.0, -kPi / 2.0};
  SimParams sim;
  GridParams grid;
  PostParams post;
  int occupancy_threshold = -1;  // < 0: Otsu
  DetectorConfig orb{kOrbDetector, 15, 4, 200, 1.2};
  DetectorConfig brisk{kBriskDetector, 15, 4, 200, 1.2};
  MatcherConfig matcher;
  LoopThresholds loop;
  std::uint64_t seed = 1;

  std::vector<RadarConfig> radar_configs() const {
    std::vector<RadarConfig> out;
    for (double m : mount_angles_rad) {
      RadarConfig c = radar;
      c.mount_angle_rad = m;
      out.push_back(c);
    }
    return out;
  }

  void validate() const {
    radar.validate();
    if (mount_angles_rad.empty()) throw Error("config: radar.mount_angles_deg needs at least one radar");
    if (!(sim.scan_spacing_m > 0.0)) throw Error("config: sim.scan_spacing_m must be > 0");
    if (!(sim.reference_range_m > 0.0)) throw Error("config: sim.reference_range_m must be > 0");
    if (!(grid.resolution_m > 0.0)) throw Error("config: grid.resolution_m must be > 0");
    if ((grid.width_px == 0) != (grid.height_px == 0))
      throw Error("config: grid.width_px and grid.height_px must both be set or both be 0");
    if (!(post.blur_sigma_px >= 0.0)) throw Error("config: post.blur_sigma_px must be >= 0");
    if (occupancy_threshold > 255) throw Error("config: post.occupancy_threshold must be <= 255");
    orb.validate();
    brisk.validate();
    if (!(matcher.ratio > 0.0 && matcher.ratio < 1.0)) throw Error("config: match.ratio must lie in (0, 1)");
    if (matcher.ransac.iterations == 0) throw Error("config: ransac.iterations must be >= 1");
    if (!(matcher.ransac.inlier_threshold > 0.0)) throw Error("config: ransac.inlier_threshold_px must be > 0");
  }
};

namespace detail {

// Key, default value, description. Order is the documented order.
inline const std::vector<std::array<const char*, 3>>& config_keys() {
  static const std::vector<std::array<const char*, 3>> keys = {
      {"radar.sample_rate_hz", "23.328e9", "ADC sample rate"},
      {"radar.center_freq_hz", "7.29e9", "pulse carrier"},
      {"radar.bandwidth_hz", "2e9", "-6 dB pulse bandwidth"},
      {"radar.pulse_amplitude_v", "1.0", "pulse peak voltage"},
      {"radar.beamwidth_deg", "60", "full beamwidth"},
      {"radar.range_min_m", "0.4", "near edge of the imaged range"},
      {"radar.range_max_m", "3.0", "far edge of the imaged range"},
      {"radar.mount_angles_deg", "90,-90", "boresight of each radar relative to heading"},
      {"sim.scan_spacing_m", "0.025", "distance between acquisitions"},
      {"sim.snr_db", "20", "echo SNR of an rcs-1 scatterer at sim.reference_range_m"},
      {"sim.reference_range_m", "1.0", "range at which sim.snr_db is defined"},
      {"sim.noise_std_v", "-1", "explicit noise std; negative derives it from sim.snr_db"},
      {"sim.speed_mps", "0.1", "robot speed for record timestamps"},
      {"sim.n_bins", "0", "samples per scan; 0 covers range_max"},
      {"grid.resolution_m", "0.005", "pixel size"},
      {"grid.width_px", "0", "0 derives the grid from the trajectory"},
      {"grid.height_px", "0", "0 derives the grid from the trajectory"},
      {"grid.origin_x_m", "0", "world x of pixel (0,0) when the grid is explicit"},
      {"grid.origin_y_m", "0", "world y of pixel (0,0) when the grid is explicit"},
      {"post.blur_sigma_px", "1.0", "Gaussian blur sigma"},
      {"post.occupancy_threshold", "-1", "8-bit occupancy level; negative uses Otsu"},
      {"orb.corner_threshold", "15", "segment-test threshold"},
      {"orb.n_octaves", "4", "pyramid depth"},
      {"orb.target_keypoints", "200", "keypoint cap"},
      {"orb.scale_factor", "1.2", "pyramid step"},
      {"brisk.corner_threshold", "15", "segment-test threshold"},
      {"brisk.n_octaves", "4", "pyramid depth"},
      {"brisk.target_keypoints", "200", "keypoint cap"},
      {"brisk.scale_factor", "1.2", "pyramid step"},
      {"match.ratio", "0.75", "Lowe ratio"},
      {"ransac.iterations", "2000", "RANSAC hypotheses"},
      {"ransac.inlier_threshold_px", "3", "reprojection tolerance"},
      {"ransac.min_inliers", "3", "smallest model worth reporting"},
      {"loop.min_good_matches", "20", "per-detector good-match threshold"},
      {"loop.scale_tolerance", "0.05", "allowed |scale - 1|"},
      {"loop.translation_tolerance_mm", "100", "allowed cross-detector translation gap"},
      {"loop.rotation_tolerance_deg", "2", "allowed cross-detector rotation gap"},
      {"seed", "1", "noise and RANSAC seed"},
  };
  return keys;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

/// Raw key=value settings over the documented defaults.
class ConfigValues {
 public:
  ConfigValues() {
    for (const auto& k : detail::config_keys()) values_[k[0]] = k[1];
  }

  void set(const std::string& key, const std::string& value) {
    if (!values_.count(key)) throw Error("config: unknown key " + key);
    values_[key] = value;
  }

  /// "key=value"
  void set_assignment(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw Error("config: expected key=value, got " + assignment);
    set(detail::trim(assignment.substr(0, eq)), detail::trim(assignment.substr(eq + 1)));
  }

  void parse(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = detail::trim(line);
      if (line.empty()) continue;
      try {
        set_assignment(line);
      } catch (const Error& e) {
        throw Error("config line " + std::to_string(lineno) + ": " + e.what());
      }
    }
  }

  const std::string& get(const std::string& key) const { return values_.at(key); }

  double number(const std::string& key) const {
    const auto& s = get(key);
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw Error("config: " + key + " is not a number: " + s);
    }
  }

  long long integer(const std::string& key) const {
    const double v = number(key);
    if (v != std::floor(v)) throw Error("config: " + key + " must be an integer");
    return static_cast<long long>(v);
  }

  std::size_t count(const std::string& key) const {
    const auto v = integer(key);
    if (v < 0) throw Error("config: " + key + " must be >= 0");
    return static_cast<std::size_t>(v);
  }

  std::vector<double> list(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(get(key));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      tok = detail::trim(tok);
      try {
        out.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw Error("config: " + key + " has a non-numeric entry: " + tok);
      }
    }
    return out;
  }

  RunConfig build() const {
    RunConfig c;
    c.radar.sample_rate_hz = number("radar.sample_rate_hz");
    c.radar.center_freq_hz = number("radar.center_freq_hz");
    c.radar.bandwidth_hz = number("radar.bandwidth_hz");
    c.radar.pulse_amplitude_v = number("radar.pulse_amplitude_v");
    c.radar.beamwidth_rad = deg2rad(number("radar.beamwidth_deg"));
    c.radar.range_min_m = number("radar.range_min_m");
    c.radar.range_max_m = number("radar.range_max_m");
    c.mount_angles_rad.clear();
    for (double d : list("radar.mount_angles_deg")) c.mount_angles_rad.push_back(deg2rad(d));
    c.radar.mount_angle_rad = c.mount_angles_rad.empty() ? 0.0 : c.mount_angles_rad.front();

    c.sim.scan_spacing_m = number("sim.scan_spacing_m");
    c.sim.snr_db = number("sim.snr_db");
    c.sim.reference_range_m = number("sim.reference_range_m");
    c.sim.noise_std_v = number("sim.noise_std_v");
    c.sim.speed_mps = number("sim.speed_mps");
    c.sim.n_bins = count("sim.n_bins");

    c.grid.resolution_m = number("grid.resolution_m");
    c.grid.width_px = count("grid.width_px");
    c.grid.height_px = count("grid.height_px");
    c.grid.origin_x_m = number("grid.origin_x_m");
    c.grid.origin_y_m = number("grid.origin_y_m");

    c.post.blur_sigma_px = number("post.blur_sigma_px");
    c.occupancy_threshold = static_cast<int>(integer("post.occupancy_threshold"));

    auto det = [&](const std::string& p, DetectorId id) {
      DetectorConfig d;
      d.detector = id;
      d.corner_threshold = static_cast<int>(integer(p + ".corner_threshold"));
      d.n_octaves = static_cast<int>(integer(p + ".n_octaves"));
      d.target_keypoints = count(p + ".target_keypoints");
      d.scale_factor = number(p + ".scale_factor");
      return d;
    };
    c.orb = det("orb", kOrbDetector);
    c.brisk = det("brisk", kBriskDetector);

    c.matcher.ratio = number("match.ratio");
    c.matcher.ransac.iterations = count("ransac.iterations");
    c.matcher.ransac.inlier_threshold = number("ransac.inlier_threshold_px");
    c.matcher.ransac.min_inliers = count("ransac.min_inliers");
    c.matcher.resolution_m = c.grid.resolution_m;

    c.loop.min_good_matches = count("loop.min_good_matches");
    c.loop.scale_tolerance = number("loop.scale_tolerance");
    c.loop.translation_tolerance_m = number("loop.translation_tolerance_mm") / 1e3;
    c.loop.rotation_tolerance_rad = deg2rad(number("loop.rotation_tolerance_deg"));

    c.seed = static_cast<std::uint64_t>(count("seed"));
    c.matcher.seed = c.seed;
    c.validate();
    return c;
  }

 private:
  std::map<std::string, std::string> values_;
};

inline RunConfig load_run_config(const std::string& path, const std::vector<std::string>& overrides = {}) {
  ConfigValues v;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config " + path);
    v.parse(in);
  }
  for (const auto& o : overrides) v.set_assignment(o);
  return v.build();
}

/// Documented defaults in config-file syntax.
inline std::string default_config_text() {
  std::ostringstream os;
  for (const auto& k : detail::config_keys()) os << "# " << k[2] << '\n' << k[0] << '=' << k[1] << '\n';
  return os.str();
}

}  // namespace uwbsar

#pragma once

// Desk-scale forward model: trajectories sampled along waypoint polylines and
// raw echoes from point-scatterer scenes.

#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "uwbsar/backprojection.hpp"
#include "uwbsar/core.hpp"
#include "uwbsar/radar_model.hpp"

namespace uwbsar {

struct Scatterer {
  Point2 position;
  double rcs = 1.0;

  void validate() const {
    if (!std::isfinite(position.x) || !std::isfinite(position.y)) throw Error("Scatterer: non-finite position");
    if (!(rcs >= 0.0) || !std::isfinite(rcs)) throw Error("Scatterer: rcs must be finite and >= 0");
  }
};

using Scene = std::vector<Scatterer>;

struct RadarMount {
  double mount_angle_rad = kPi / 2.0;
  Point2 lever_arm_m{};  // robot frame: x forward, y left
};

/// Optional per-step odometry error used to emulate drift.
struct OdometryNoise {
  double heading_std_rad = 0.0;
  double translation_std_m = 0.0;
};

struct TrajectorySpec {
  std::vector<Pose2> waypoints;  // only positions are used; headings follow the path
  double scan_spacing_m = 0.025;
  std::vector<RadarMount> radar_mounts{RadarMount{kPi / 2.0, {}}, RadarMount{-kPi / 2.0, {}}};

  void validate() const {
    if (waypoints.size() < 2) throw Error("TrajectorySpec: need at least two waypoints");
    if (!(scan_spacing_m > 0.0) || !std::isfinite(scan_spacing_m))
      throw Error("TrajectorySpec: scan spacing must be positive");
    if (radar_mounts.empty()) throw Error("TrajectorySpec: no radar mounts");
  }
};

/// Robot pose at one acquisition and the phase-center pose of each radar.
/// Radar poses keep the robot heading; the boresight offset is the radar's
/// mount_angle_rad in its RadarConfig.
struct TrajectorySample {
  Pose2 robot;
  std::vector<Pose2> radars;
};

inline Pose2 radar_pose(const Pose2& robot, const RadarMount& m) {
  const double c = std::cos(robot.theta_rad), s = std::sin(robot.theta_rad);
  return Pose2(robot.x_m + c * m.lever_arm_m.x - s * m.lever_arm_m.y,
               robot.y_m + s * m.lever_arm_m.x + c * m.lever_arm_m.y, robot.theta_rad);
}

/// Poses every scan_spacing_m of arc length along the waypoint polyline.
/// A pose exactly on an interior waypoint takes the outgoing heading.
inline std::vector<TrajectorySample> generate_trajectory(const TrajectorySpec& spec) {
  spec.validate();
  struct Seg {
    Point2 a;
    double len, heading, s0;
    double ux, uy;
  };
  std::vector<Seg> segs;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < spec.waypoints.size(); ++i) {
    const Point2 a = spec.waypoints[i].position();
    const Point2 b = spec.waypoints[i + 1].position();
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    if (len == 0.0) continue;
    segs.push_back({a, len, std::atan2(b.y - a.y, b.x - a.x), total, (b.x - a.x) / len, (b.y - a.y) / len});
    total += len;
  }
  if (segs.empty()) throw Error("generate_trajectory: degenerate path of zero length");

  const auto n = static_cast<std::size_t>(std::floor(total / spec.scan_spacing_m + 1e-9)) + 1;
  std::vector<TrajectorySample> out;
  out.reserve(n);
  std::size_t si = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double s = std::min(total, static_cast<double>(k) * spec.scan_spacing_m);
    while (si + 1 < segs.size() && s >= segs[si + 1].s0 - 1e-12) ++si;
    const Seg& g = segs[si];
    const double u = s - g.s0;
    TrajectorySample ts;
    ts.robot = Pose2(g.a.x + g.ux * u, g.a.y + g.uy * u, g.heading);
    for (const auto& m : spec.radar_mounts) ts.radars.push_back(radar_pose(ts.robot, m));
    out.push_back(std::move(ts));
  }
  return out;
}

/// Applies accumulated dead-reckoning error to an ideal trajectory: each step
/// perturbs heading and traveled distance, and the error integrates.
inline std::vector<TrajectorySample> perturb_trajectory(std::span<const TrajectorySample> ideal,
                                                        std::span<const RadarMount> mounts, const OdometryNoise& noise,
                                                        std::mt19937_64& rng) {
  std::vector<TrajectorySample> out(ideal.begin(), ideal.end());
  if (ideal.empty() || (noise.heading_std_rad == 0.0 && noise.translation_std_m == 0.0)) return out;
  std::normal_distribution<double> nh(0.0, noise.heading_std_rad), nt(0.0, noise.translation_std_m);
  Pose2 est = ideal.front().robot;
  for (std::size_t i = 1; i < ideal.size(); ++i) {
    const Pose2& a = ideal[i - 1].robot;
    const Pose2& b = ideal[i].robot;
    const double step = std::hypot(b.x_m - a.x_m, b.y_m - a.y_m);
    const double dtheta = normalize_angle(b.theta_rad - a.theta_rad);
    const double theta = est.theta_rad + dtheta + (noise.heading_std_rad > 0 ? nh(rng) : 0.0);
    const double d = step + (noise.translation_std_m > 0 ? nt(rng) : 0.0);
    est = Pose2(est.x_m + d * std::cos(theta), est.y_m + d * std::sin(theta), theta);
    out[i].robot = est;
    out[i].radars.clear();
    for (const auto& m : mounts) out[i].radars.push_back(radar_pose(est, m));
  }
  return out;
}

/// Peak echo voltage of a scatterer at one-way range r: A * sqrt(rcs) / r^2.
inline double echo_amplitude(const RadarConfig& cfg, double rcs, double range_m) {
  return cfg.pulse_amplitude_v / (range_m * range_m) * std::sqrt(rcs);
}

/// Noise standard deviation that puts a reference echo amplitude at snr_db.
inline double noise_std_for_snr(double reference_amplitude_v, double snr_db) {
  return reference_amplitude_v / std::pow(10.0, snr_db / 20.0);
}

/// Raw echo: delayed pulse replicas from every scatterer inside the FOV plus
/// white Gaussian noise. The RNG is only touched when noise_std > 0.
inline RawScan simulate_echo(std::span<const Scatterer> scene, const Pose2& radar, const RadarConfig& cfg,
                             std::size_t n_bins, double noise_std, std::mt19937_64& rng) {
  cfg.validate();
  if (static_cast<double>(n_bins) * range_bin_spacing(cfg) < cfg.range_max_m)
    throw Error("simulate_echo: scan does not cover range_max");
  if (!(noise_std >= 0.0)) throw Error("simulate_echo: negative noise std");
  RawScan scan;
  scan.pose = radar;
  scan.echo.sample_rate_hz = cfg.sample_rate_hz;
  scan.echo.t0_s = 0.0;
  scan.echo.samples.assign(n_bins, 0.0);
  const double fs = cfg.sample_rate_hz;
  const double tail = pulse_half_duration(cfg, 1e-6);
  for (const auto& sc : scene) {
    sc.validate();
    if (!in_fov(sc.position, radar, cfg)) continue;
    const double r = pixel_range(sc.position, radar);
    const double tau = 2.0 * r / kSpeedOfLight;
    const double gain = cfg.pulse_amplitude_v / (r * r);
    const double root_rcs = std::sqrt(sc.rcs);
    const auto k0 = std::max<long>(0, static_cast<long>(std::floor((tau - tail) * fs)));
    const auto k1 = std::min<long>(static_cast<long>(n_bins) - 1, static_cast<long>(std::ceil((tau + tail) * fs)));
    for (long k = k0; k <= k1; ++k) {
      const double t = static_cast<double>(k) / fs - tau;
      // Unit-amplitude pulse shape scaled by the spreading gain and sqrt(rcs).
      const double shape = pulse_value(cfg, t) / cfg.pulse_amplitude_v;
      scan.echo.samples[static_cast<std::size_t>(k)] += shape * gain * root_rcs;
    }
  }
  if (noise_std > 0.0) {
    std::normal_distribution<double> noise(0.0, noise_std);
    for (auto& s : scan.echo.samples) s += noise(rng);
  }
  return scan;
}

struct SceneRender {
  std::vector<RawScan> scans;  // pose-major, radar-minor
  BinaryGrid truth;            // cells holding at least one scatterer
};

/// Occupancy grid marking the pixel nearest to each scatterer.
inline BinaryGrid truth_occupancy(std::span<const Scatterer> scene, const ImageGrid& grid) {
  BinaryGrid g(grid.width_px, grid.height_px);
  for (const auto& s : scene) {
    const Point2 p = grid.to_pixel(s.position);
    const long c = std::lround(p.x), r = std::lround(p.y);
    if (c < 0 || r < 0 || c >= static_cast<long>(grid.width_px) || r >= static_cast<long>(grid.height_px)) continue;
    g.set(static_cast<std::size_t>(c), static_cast<std::size_t>(r));
  }
  return g;
}

/// Full forward simulation. `configs[i]` describes radar i of every sample.
inline SceneRender render_scene(std::span<const Scatterer> scene, std::span<const TrajectorySample> trajectory,
                                std::span<const RadarConfig> configs, const ImageGrid& grid, double noise_std,
                                std::mt19937_64& rng, std::size_t n_bins = 0) {
  grid.validate();
  if (configs.empty()) throw Error("render_scene: no radar configurations");
  SceneRender out;
  for (const auto& ts : trajectory) {
    if (ts.radars.size() != configs.size()) throw Error("render_scene: radar count mismatch");
    for (std::size_t i = 0; i < ts.radars.size(); ++i) {
      const std::size_t nb = n_bins ? n_bins : bins_to_cover(configs[i]);
      RawScan s = simulate_echo(scene, ts.radars[i], configs[i], nb, noise_std, rng);
      s.radar_index = i;
      out.scans.push_back(std::move(s));
    }
  }
  out.truth = truth_occupancy(scene, grid);
  return out;
}

// ---------------------------------------------------------------------------
// Text formats: scene `x_m y_m rcs`, trajectory `x_m y_m theta_rad`, one entry
// per line. Blank lines and '#' comments are skipped.

namespace detail {

inline std::vector<std::vector<double>> read_table(std::istream& in, std::size_t cols, const std::string& what) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<double> vals;
    std::string tok;
    while (ls >> tok) {
      try {
        std::size_t used = 0;
        vals.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw Error(what + ": line " + std::to_string(lineno) + ": not a number: " + tok);
      }
    }
    if (vals.empty()) continue;
    if (vals.size() != cols)
      throw Error(what + ": line " + std::to_string(lineno) + ": expected " + std::to_string(cols) + " columns");
    for (double v : vals)
      if (!std::isfinite(v)) throw Error(what + ": line " + std::to_string(lineno) + ": non-finite value");
    rows.push_back(std::move(vals));
  }
  return rows;
}

inline std::ifstream open_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return in;
}

}  // namespace detail

inline Scene parse_scene(std::istream& in) {
  Scene scene;
  for (const auto& r : detail::read_table(in, 3, "scene")) {
    Scatterer s{{r[0], r[1]}, r[2]};
    s.validate();
    scene.push_back(s);
  }
  return scene;
}

inline std::vector<Pose2> parse_trajectory(std::istream& in) {
  std::vector<Pose2> wps;
  for (const auto& r : detail::read_table(in, 3, "trajectory")) wps.emplace_back(r[0], r[1], r[2]);
  return wps;
}

inline Scene load_scene(const std::string& path) {
  auto in = detail::open_text(path);
  return parse_scene(in);
}

inline std::vector<Pose2> load_trajectory(const std::string& path) {
  auto in = detail::open_text(path);
  return parse_trajectory(in);
}

}  // namespace uwbsar

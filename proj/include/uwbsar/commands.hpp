#pragma once

// Stage commands. Each reads its inputs from files and writes its outputs
// into the output directory; cmd_pipeline chains them through those same
// files.

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "uwbsar/backprojection.hpp"
#include "uwbsar/config.hpp"
#include "uwbsar/features.hpp"
#include "uwbsar/image_io.hpp"
#include "uwbsar/image_post.hpp"
#include "uwbsar/loopclose.hpp"
#include "uwbsar/radar_model.hpp"
#include "uwbsar/scan_log.hpp"
#include "uwbsar/simulator.hpp"

namespace uwbsar {

namespace fs = std::filesystem;

struct CommandOptions {
  RunConfig config;
  fs::path out_dir = ".";
  bool overwrite = false;
  std::ostream* log = &std::cout;
};

/// Pixel rectangle `col,row,width,height`.
struct Region {
  std::size_t col = 0, row = 0, width = 0, height = 0;
  bool empty() const { return width == 0 || height == 0; }
};

inline Region parse_region(const std::string& s) {
  Region r;
  char c1 = 0, c2 = 0, c3 = 0;
  long v[4] = {-1, -1, -1, -1};
  std::istringstream is(s);
  if (!(is >> v[0] >> c1 >> v[1] >> c2 >> v[2] >> c3 >> v[3]) || c1 != ',' || c2 != ',' || c3 != ',' ||
      !(is >> std::ws).eof())
    throw Error("region must be col,row,width,height: " + s);
  for (long x : v)
    if (x < 0) throw Error("region values must be non-negative: " + s);
  r.col = static_cast<std::size_t>(v[0]);
  r.row = static_cast<std::size_t>(v[1]);
  r.width = static_cast<std::size_t>(v[2]);
  r.height = static_cast<std::size_t>(v[3]);
  if (r.empty()) throw Error("region must have a positive size: " + s);
  return r;
}

namespace detail {

/// Reserves output paths: all collisions are reported before anything is written.
inline std::vector<fs::path> claim_outputs(const CommandOptions& opt, const std::vector<std::string>& names) {
  fs::create_directories(opt.out_dir);
  std::vector<fs::path> out;
  for (const auto& n : names) {
    auto p = opt.out_dir / n;
    if (fs::exists(p) && !opt.overwrite) throw Error("output exists: " + p.string() + " (pass --overwrite)");
    out.push_back(std::move(p));
  }
  return out;
}

inline ImageGrid resolve_grid(const RunConfig& cfg, std::span<const Pose2> radar_poses) {
  if (cfg.grid.width_px > 0) {
    ImageGrid g;
    g.width_px = cfg.grid.width_px;
    g.height_px = cfg.grid.height_px;
    g.resolution_m = cfg.grid.resolution_m;
    g.origin_x_m = cfg.grid.origin_x_m;
    g.origin_y_m = cfg.grid.origin_y_m;
    g.validate();
    return g;
  }
  return grid_for_poses(radar_poses, cfg.radar.range_max_m, cfg.grid.resolution_m);
}

inline Gray8 occupancy_image(const BinaryGrid& g, double res) {
  Gray8 img(g.width, g.height, res);
  for (std::size_t i = 0; i < g.cells.size(); ++i) img.pixels[i] = g.cells[i] ? 255 : 0;
  return img;
}

inline BinaryGrid occupancy_from_image(const Gray8& img) { return threshold_occupancy(img, 127); }

inline MatchReport read_first_report(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw Error("cannot open " + p.string());
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    return parse_report(line);
  }
  throw Error("no report record in " + p.string());
}

inline void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text)) throw Error("cannot write " + p.string());
}

}  // namespace detail

struct SimulateOutputs {
  fs::path scan_log, truth;
};

/// scene + waypoints -> scans.uwbs, truth.pgm
inline SimulateOutputs cmd_simulate(const CommandOptions& opt, const fs::path& scene_path, const fs::path& traj_path) {
  const auto& cfg = opt.config;
  const auto out = detail::claim_outputs(opt, {"scans.uwbs", "truth.pgm"});
  const Scene scene = load_scene(scene_path.string());
  TrajectorySpec spec;
  spec.waypoints = load_trajectory(traj_path.string());
  spec.scan_spacing_m = cfg.sim.scan_spacing_m;
  spec.radar_mounts.clear();
  for (std::size_t i = 0; i < cfg.mount_angles_rad.size(); ++i) spec.radar_mounts.push_back(RadarMount{cfg.mount_angles_rad[i], {}});
  const auto traj = generate_trajectory(spec);

  std::vector<Pose2> radar_poses;
  for (const auto& t : traj) radar_poses.insert(radar_poses.end(), t.radars.begin(), t.radars.end());
  const ImageGrid grid = detail::resolve_grid(cfg, radar_poses);
  const auto configs = cfg.radar_configs();
  const std::size_t n_bins = cfg.sim.n_bins ? cfg.sim.n_bins : bins_to_cover(cfg.radar);
  const double noise = cfg.sim.noise_std_v >= 0.0
                           ? cfg.sim.noise_std_v
                           : noise_std_for_snr(echo_amplitude(cfg.radar, 1.0, cfg.sim.reference_range_m), cfg.sim.snr_db);
  std::mt19937_64 rng(cfg.seed);
  const auto render = render_scene(scene, traj, configs, grid, noise, rng, n_bins);

  ScanLog log;
  log.header.radar = configs.front();
  log.header.mount_angles_rad = cfg.mount_angles_rad;
  log.header.samples_per_record = n_bins;
  const std::size_t radars = configs.size();
  for (std::size_t i = 0; i < render.scans.size(); ++i) {
    const auto& s = render.scans[i];
    ScanRecord r;
    r.timestamp_s = static_cast<double>(i / radars) * cfg.sim.scan_spacing_m / cfg.sim.speed_mps;
    r.radar_index = static_cast<std::uint32_t>(s.radar_index);
    r.pose = s.pose;
    r.samples.assign(s.echo.samples.begin(), s.echo.samples.end());
    log.records.push_back(std::move(r));
  }
  write_scan_log(out[0].string(), log);
  write_pgm(out[1].string(), detail::occupancy_image(render.truth, grid.resolution_m));
  *opt.log << "simulate: " << log.records.size() << " records, grid " << grid.width_px << "x" << grid.height_px
           << ", " << render.truth.count() << " occupied truth cells\n";
  return {out[0], out[1]};
}

struct BackprojectOutputs {
  fs::path real, imag;
};

/// scans.uwbs -> sar_re.f32, sar_im.f32
inline BackprojectOutputs cmd_backproject(const CommandOptions& opt, const fs::path& log_path) {
  const auto& cfg = opt.config;
  const auto out = detail::claim_outputs(opt, {"sar_re.f32", "sar_im.f32"});
  const ScanLog log = read_scan_log(log_path.string());
  if (log.records.empty()) throw Error("backproject: scan log " + log_path.string() + " has no records");
  std::vector<Pose2> poses;
  for (const auto& r : log.records) poses.push_back(r.pose);
  const ImageGrid grid = detail::resolve_grid(cfg, poses);
  const auto configs = log.header.configs();
  const Waveform pulse = synthesize_pulse(log.header.radar);
  SarAccumulator acc(grid);
  for (const auto& raw : to_raw_scans(log)) acc.add(compress_scan(raw, pulse), configs.at(raw.radar_index));
  const auto [re, im] = split_complex(std::move(acc).image());
  write_float_dump(out[0].string(), re);
  write_float_dump(out[1].string(), im);
  *opt.log << "backproject: " << log.records.size() << " scans onto " << grid.width_px << "x" << grid.height_px
           << " px\n";
  return {out[0], out[1]};
}

struct PostOutputs {
  fs::path image, occupancy;
  std::optional<double> cellwise_difference;
};

/// sar_re.f32 + sar_im.f32 -> sar.pgm, occupancy.pgm (+ metrics.txt with a truth grid)
inline PostOutputs cmd_post(const CommandOptions& opt, const fs::path& re_path, const fs::path& im_path,
                            const std::optional<fs::path>& truth_path = std::nullopt) {
  const auto& cfg = opt.config;
  std::vector<std::string> names{"sar.pgm", "occupancy.pgm"};
  if (truth_path) names.push_back("metrics.txt");
  const auto out = detail::claim_outputs(opt, names);
  const SarImage sar = join_complex(read_float_dump(re_path.string()), read_float_dump(im_path.string()));
  const Gray8 img = enhance(sar, cfg.post);
  const int level = cfg.occupancy_threshold >= 0 ? cfg.occupancy_threshold : otsu_threshold(img);
  const BinaryGrid occ = threshold_occupancy(img, level);
  write_pgm(out[0].string(), img);
  write_pgm(out[1].string(), detail::occupancy_image(occ, img.resolution_m));
  PostOutputs res{out[0], out[1], std::nullopt};
  *opt.log << "post: threshold " << level << ", " << occ.count() << " occupied cells\n";
  if (truth_path) {
    const BinaryGrid truth = detail::occupancy_from_image(read_pgm(truth_path->string()));
    const double d = cellwise_difference(occ, truth);
    detail::write_text(out[2], "threshold=" + std::to_string(level) + "\ncellwise_difference=" + detail::format_double(d) + "\n");
    *opt.log << "post: cellwise difference " << d << "\n";
    res.cellwise_difference = d;
  }
  return res;
}

/// image.pgm -> <name>.feat
inline fs::path cmd_detect(const CommandOptions& opt, const fs::path& image_path, DetectorId detector,
                           const std::optional<Region>& region, const std::string& name) {
  const auto& cfg = opt.config;
  const auto out = detail::claim_outputs(opt, {name + ".feat"});
  Gray8 img = read_pgm(image_path.string(), cfg.grid.resolution_m);
  if (region) img = crop(img, region->col, region->row, region->width, region->height);
  DetectorConfig dc;
  if (detector == kOrbDetector) dc = cfg.orb;
  else if (detector == kBriskDetector) dc = cfg.brisk;
  else throw Error("detect: no native detector for id " + detector_name(detector));
  const FeatureSet fs = detect_and_describe(img, dc);
  write_feature_set(out[0].string(), fs);
  *opt.log << "detect: " << detector_name(detector) << " " << fs.keypoints.size() << " keypoints (" << fs.dropped
           << " dropped at the border)\n";
  return out[0];
}

/// a.feat + b.feat -> <name>.tsv
inline fs::path cmd_match(const CommandOptions& opt, const fs::path& a_path, const fs::path& b_path,
                          const std::string& name) {
  const auto out = detail::claim_outputs(opt, {name + ".tsv"});
  const FeatureSet a = read_feature_set(a_path.string());
  const FeatureSet b = read_feature_set(b_path.string());
  if (!(a.detector == b.detector))
    throw Error("match: detector mismatch: " + a_path.string() + " is " + detector_name(a.detector) + " but " +
                b_path.string() + " is " + detector_name(b.detector));
  const MatchReport rep = match_feature_sets(a, b, opt.config.matcher);
  detail::write_text(out[0], std::string(kReportHeader) + "\n" + format_report(rep) + "\n");
  *opt.log << "match: " << detector_name(rep.detector) << " " << rep.good_matches << "/" << rep.total_matches
           << " good matches\n";
  return out[0];
}

struct LoopOutputs {
  fs::path decision;
  LoopDecision result;
};

/// two match reports from different detectors -> loop.tsv
inline LoopOutputs cmd_loopclose(const CommandOptions& opt, const fs::path& report_a, const fs::path& report_b) {
  const auto out = detail::claim_outputs(opt, {"loop.tsv"});
  const MatchReport ra = detail::read_first_report(report_a);
  const MatchReport rb = detail::read_first_report(report_b);
  LoopDecision dec = validate_loop(ra, rb, opt.config.loop);
  const std::string verdict = dec.accepted ? "accept" : "reject";
  std::ostringstream os;
  os << kReportHeader << '\n';
  for (const auto& r : dec.reports) os << format_report(r, verdict, join_reasons(dec.reasons)) << '\n';
  if (dec.fused_transform) {
    const auto& t = *dec.fused_transform;
    os << "#fused\tscale=" << detail::format_double(t.scale) << "\ttx_mm=" << detail::format_double(t.tx_m * 1e3)
       << "\tty_mm=" << detail::format_double(t.ty_m * 1e3) << "\trot_deg=" << detail::format_double(rad2deg(t.rot_rad))
       << '\n';
  }
  detail::write_text(out[0], os.str());
  *opt.log << "loopclose: " << verdict << (dec.accepted ? "" : " (" + join_reasons(dec.reasons) + ")") << "\n";
  return {out[0], std::move(dec)};
}

struct PipelineOutputs {
  SimulateOutputs sim;
  BackprojectOutputs sar;
  PostOutputs post;
  LoopOutputs loop;
};

/// simulate -> backproject -> post -> detect (a, b per detector) -> match -> loopclose
inline PipelineOutputs cmd_pipeline(const CommandOptions& opt, const fs::path& scene_path, const fs::path& traj_path,
                                    const std::optional<Region>& region_a, const std::optional<Region>& region_b) {
  PipelineOutputs p;
  p.sim = cmd_simulate(opt, scene_path, traj_path);
  p.sar = cmd_backproject(opt, p.sim.scan_log);
  p.post = cmd_post(opt, p.sar.real, p.sar.imag, p.sim.truth);
  std::vector<fs::path> reports;
  for (DetectorId id : {kOrbDetector, kBriskDetector}) {
    const std::string n = detector_name(id);
    const auto fa = cmd_detect(opt, p.post.image, id, region_a, "a_" + n);
    const auto fb = cmd_detect(opt, p.post.image, id, region_b, "b_" + n);
    reports.push_back(cmd_match(opt, fa, fb, "match_" + n));
  }
  p.loop = cmd_loopclose(opt, reports[0], reports[1]);
  return p;
}

}  // namespace uwbsar

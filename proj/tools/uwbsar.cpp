// uwbsar: command-line front end for the imaging and loop-closure pipeline.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "uwbsar/commands.hpp"

namespace {

constexpr const char* kConfigEnv = "UWBSAR_CONFIG";

std::optional<uwbsar::Region> region_arg(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return uwbsar::parse_region(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UWB SAR imaging and loop-closure pipeline"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir = ".";
  bool overwrite = false;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, std::string("key=value configuration file (default: $") + kConfigEnv + ")");
  app.add_option("--out", out_dir, "output directory");
  app.add_flag("--overwrite", overwrite, "replace existing outputs");
  app.add_option("--seed", seed, "seed for noise and RANSAC");
  app.add_option("--threshold", overrides, "override a configuration key, KEY=VALUE")->take_all();

  std::string scene, traj, scans, re, im, truth, image, detector, region, name, a, b, region_a, region_b;

  auto* sim = app.add_subcommand("simulate", "scene + waypoints -> scans.uwbs, truth.pgm");
  sim->add_option("--scene", scene, "scene file (x_m y_m rcs per line)")->required();
  sim->add_option("--trajectory", traj, "waypoint file (x_m y_m theta_rad per line)")->required();

  auto* bp = app.add_subcommand("backproject", "scans.uwbs -> sar_re.f32, sar_im.f32");
  bp->add_option("--scans", scans, "scan log")->required();

  auto* post = app.add_subcommand("post", "SAR float dumps -> sar.pgm, occupancy.pgm");
  post->add_option("--re", re, "real-part float dump")->required();
  post->add_option("--im", im, "imaginary-part float dump")->required();
  post->add_option("--truth", truth, "truth occupancy PGM; adds metrics.txt");

  auto* det = app.add_subcommand("detect", "PGM -> NAME.feat");
  det->add_option("--image", image, "8-bit PGM")->required();
  det->add_option("--detector", detector, "orb or brisk")->required();
  det->add_option("--region", region, "crop col,row,width,height");
  det->add_option("--name", name, "output stem")->required();

  auto* match = app.add_subcommand("match", "two feature sets -> NAME.tsv");
  match->add_option("--a", a, "feature set of region A")->required();
  match->add_option("--b", b, "feature set of region B")->required();
  match->add_option("--name", name, "output stem")->required();

  auto* loop = app.add_subcommand("loopclose", "two match reports -> loop.tsv");
  loop->add_option("--a", a, "first detector's match report")->required();
  loop->add_option("--b", b, "second detector's match report")->required();

  auto* pipe = app.add_subcommand("pipeline", "all stages end to end");
  pipe->add_option("--scene", scene, "scene file")->required();
  pipe->add_option("--trajectory", traj, "waypoint file")->required();
  pipe->add_option("--region-a", region_a, "region A, col,row,width,height (default: whole image)");
  pipe->add_option("--region-b", region_b, "region B, col,row,width,height (default: whole image)");

  app.add_subcommand("config", "print the documented default configuration");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("config")) {
      std::cout << uwbsar::default_config_text();
      return 0;
    }
    if (config_path.empty())
      if (const char* env = std::getenv(kConfigEnv)) config_path = env;
    if (seed) overrides.push_back("seed=" + std::to_string(*seed));

    uwbsar::CommandOptions opt;
    opt.config = uwbsar::load_run_config(config_path, overrides);
    opt.out_dir = out_dir;
    opt.overwrite = overwrite;

    if (app.got_subcommand(sim)) {
      uwbsar::cmd_simulate(opt, scene, traj);
    } else if (app.got_subcommand(bp)) {
      uwbsar::cmd_backproject(opt, scans);
    } else if (app.got_subcommand(post)) {
      uwbsar::cmd_post(opt, re, im, truth.empty() ? std::nullopt : std::optional<uwbsar::fs::path>(truth));
    } else if (app.got_subcommand(det)) {
      uwbsar::cmd_detect(opt, image, uwbsar::parse_detector_id(detector), region_arg(region), name);
    } else if (app.got_subcommand(match)) {
      uwbsar::cmd_match(opt, a, b, name);
    } else if (app.got_subcommand(loop)) {
      uwbsar::cmd_loopclose(opt, a, b);
    } else if (app.got_subcommand(pipe)) {
      uwbsar::cmd_pipeline(opt, scene, traj, region_arg(region_a), region_arg(region_b));
    }
  } catch (const std::exception& e) {
    std::cerr << "uwbsar: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

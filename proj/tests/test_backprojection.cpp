#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "support/harness.hpp"

using namespace uwbsar;

namespace {

// 6 m x 6 m around the origin at 1 cm.
ImageGrid wide_grid() {
  ImageGrid g;
  g.width_px = 601;
  g.height_px = 601;
  g.resolution_m = 0.01;
  g.origin_x_m = -3.0;
  g.origin_y_m = -3.0;
  return g;
}

CompressedScan random_scan(const Pose2& pose, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  CompressedScan s;
  s.pose = pose;
  for (std::size_t i = 0; i < n; ++i) s.bins.emplace_back(nd(rng), nd(rng));
  return s;
}

}  // namespace

TEST(Pose2, NormalizesHeading) {
  EXPECT_NEAR(Pose2(0, 0, 3 * kPi / 2).theta_rad, -kPi / 2, 1e-12);
  EXPECT_NEAR(Pose2(0, 0, -kPi).theta_rad, kPi, 1e-12);
  EXPECT_EQ(Pose2(0, 0, kPi).theta_rad, kPi);
  EXPECT_EQ(Pose2(0, 0, 0.25).theta_rad, 0.25);
}

TEST(Pose2, RejectsNonFinite) {
  EXPECT_THROW(Pose2(NAN, 0, 0), Error);
  EXPECT_THROW(Pose2(0, INFINITY, 0), Error);
  EXPECT_THROW(Pose2(0, 0, NAN), Error);
}

TEST(ImageGrid, ValidatesAndMapsPixelCenters) {
  ImageGrid g = wide_grid();
  EXPECT_NO_THROW(g.validate());
  const Point2 c = g.pixel_center(300, 400);
  EXPECT_NEAR(c.x, 0.0, 1e-12);
  EXPECT_NEAR(c.y, 1.0, 1e-12);
  const Point2 p = g.to_pixel({0.0, 1.0});
  EXPECT_NEAR(p.x, 300.0, 1e-9);
  EXPECT_NEAR(p.y, 400.0, 1e-9);
  g.resolution_m = 0;
  EXPECT_THROW(g.validate(), Error);
  g = wide_grid();
  g.width_px = 0;
  EXPECT_THROW(g.validate(), Error);
}

TEST(PixelRange, Examples) {
  const Pose2 radar(2.0, -1.0, 0.3);
  EXPECT_EQ(pixel_range({2.0, -1.0}, radar), 0.0);
  EXPECT_DOUBLE_EQ(pixel_range({5.0, 3.0}, radar), 5.0);
  EXPECT_NEAR(pixel_range({3.2, -1.5}, radar), 1.3, 1e-12);
}

TEST(FovMask, ReferenceBeamAndRange) {
  const RadarConfig cfg;  // boresight +y for heading 0
  const Pose2 radar(0, 0, 0);
  const ImageGrid g = wide_grid();
  const BinaryGrid mask = fov_mask(radar, cfg, g);
  auto at = [&](double x, double y) {
    const Point2 p = g.to_pixel({x, y});
    return mask.at(static_cast<std::size_t>(std::lround(p.x)), static_cast<std::size_t>(std::lround(p.y)));
  };
  EXPECT_TRUE(at(0.0, 1.0));
  EXPECT_FALSE(at(0.0, 0.2));
  const double off = deg2rad(40.0);
  EXPECT_FALSE(at(std::sin(off) * 1.0, std::cos(off) * 1.0));
  EXPECT_TRUE(at(std::sin(deg2rad(20.0)), std::cos(deg2rad(20.0))));
  EXPECT_FALSE(at(0.0, -1.0));
  EXPECT_FALSE(at(0.0, 2.95 + 0.1));
}

TEST(FovMask, AgreesWithDirectPredicateAwayFromBoundary) {
  const ImageGrid g = wide_grid();
  const double diag = g.resolution_m * std::sqrt(2.0);
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<std::size_t> col(0, g.width_px - 1), row(0, g.height_px - 1);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  int checked = 0;
  for (int pose_i = 0; pose_i < 5; ++pose_i) {
    RadarConfig cfg;
    cfg.mount_angle_rad = pose_i % 2 ? -kPi / 2 : kPi / 2;
    const Pose2 radar(0.1 * pose_i, -0.05 * pose_i, ang(rng));
    const BinaryGrid mask = fov_mask(radar, cfg, g);
    for (int i = 0; i < 1000; ++i) {
      const std::size_t c = col(rng), r = row(rng);
      const Point2 p = g.pixel_center(c, r);
      const double range = pixel_range(p, radar);
      const double off = std::abs(normalize_angle(std::atan2(p.y - radar.y_m, p.x - radar.x_m) -
                                                  normalize_angle(radar.theta_rad + cfg.mount_angle_rad)));
      const double half = cfg.beamwidth_rad / 2;
      const double side_dist = std::abs(off - half) < kPi / 2 ? range * std::abs(std::sin(off - half)) : INFINITY;
      if (std::abs(range - cfg.range_min_m) < diag || std::abs(range - cfg.range_max_m) < diag || side_dist < diag)
        continue;
      const bool expect = range >= cfg.range_min_m && range <= cfg.range_max_m && off <= half;
      EXPECT_EQ(mask.at(c, r), expect) << "pixel " << c << "," << r;
      ++checked;
    }
  }
  EXPECT_GT(checked, 4500);
}

TEST(BackprojectScan, ZeroScanGivesZeroImage) {
  const RadarConfig cfg;
  CompressedScan s;
  s.pose = Pose2(0, 0, 0);
  s.bins.assign(bins_to_cover(cfg), {0.0, 0.0});
  const SarImage img = backproject_scan(s, cfg, wide_grid());
  EXPECT_EQ(img.scan_count, 1u);
  for (const auto& p : img.pixels) EXPECT_EQ(p, std::complex<double>(0, 0));
}

TEST(BackprojectScan, SingleBinLightsItsAnnulus) {
  const RadarConfig cfg;
  const ImageGrid g = wide_grid();
  const Pose2 radar(0.2, -0.1, 0.4);
  const std::size_t k = 156;
  const double dd = range_bin_spacing(cfg);
  CompressedScan s;
  s.pose = radar;
  s.bins.assign(bins_to_cover(cfg), {0.0, 0.0});
  s.bins[k] = {1.0, 2.0};
  const SarImage img = backproject_scan(s, cfg, g);
  const BinaryGrid mask = fov_mask(radar, cfg, g);
  std::size_t lit = 0;
  for (std::size_t r = 0; r < g.height_px; ++r)
    for (std::size_t c = 0; c < g.width_px; ++c) {
      const double range = pixel_range(g.pixel_center(c, r), radar);
      const bool on_ring = std::abs(range - static_cast<double>(k) * dd) < dd / 2;
      const bool expect = mask.at(c, r) && on_ring;
      EXPECT_EQ(img.at(c, r) != std::complex<double>(0, 0), expect) << c << "," << r;
      if (expect) {
        EXPECT_EQ(img.at(c, r), std::complex<double>(1.0, 2.0));
        ++lit;
      }
    }
  EXPECT_GT(lit, 50u);
}

TEST(BackprojectScan, NothingOutsideTheMask) {
  const RadarConfig cfg;
  const ImageGrid g = wide_grid();
  const Pose2 radar(-0.3, 0.4, -1.0);
  const SarImage img = backproject_scan(random_scan(radar, bins_to_cover(cfg), 4), cfg, g);
  const BinaryGrid mask = fov_mask(radar, cfg, g);
  for (std::size_t i = 0; i < img.pixels.size(); ++i)
    if (!mask.cells[i]) { EXPECT_EQ(img.pixels[i], std::complex<double>(0, 0)); }
}

TEST(BackprojectScan, ShortScanClipsInsteadOfFailing) {
  const RadarConfig cfg;
  const Pose2 radar(0, 0, 0);
  const SarImage img = backproject_scan(random_scan(radar, 200, 4), cfg, wide_grid());
  const double reach = 199.5 * range_bin_spacing(cfg);
  for (std::size_t r = 0; r < img.grid.height_px; ++r)
    for (std::size_t c = 0; c < img.grid.width_px; ++c)
      if (pixel_range(img.grid.pixel_center(c, r), radar) > reach + 1e-9) { EXPECT_EQ(img.at(c, r), std::complex<double>()); }
}

TEST(BackprojectScan, EnergyBoundedByMaskTimesMaxBin) {
  const RadarConfig cfg;
  const ImageGrid g = wide_grid();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Pose2 radar(0.1 * static_cast<double>(seed), 0.0, 0.2 * static_cast<double>(seed));
    const auto scan = random_scan(radar, bins_to_cover(cfg), seed);
    double max_bin = 0;
    for (const auto& b : scan.bins) max_bin = std::max(max_bin, std::abs(b));
    const SarImage img = backproject_scan(scan, cfg, g);
    double total = 0;
    for (const auto& p : img.pixels) total += std::abs(p);
    EXPECT_LE(total, static_cast<double>(fov_mask(radar, cfg, g).count()) * max_bin);
  }
}

TEST(BackprojectScan, RangeSquaredWeightingScalesBySquaredRange) {
  const RadarConfig cfg;
  const ImageGrid g = wide_grid();
  const Pose2 radar(0, 0, 0);
  const auto scan = random_scan(radar, bins_to_cover(cfg), 9);
  BackprojectionOptions o;
  o.range_squared_weighting = true;
  const SarImage plain = backproject_scan(scan, cfg, g);
  const SarImage weighted = backproject_scan(scan, cfg, g, o);
  for (std::size_t r = 0; r < g.height_px; r += 7)
    for (std::size_t c = 0; c < g.width_px; c += 7) {
      const double rr = pixel_range(g.pixel_center(c, r), radar);
      EXPECT_NEAR(std::abs(weighted.at(c, r) - plain.at(c, r) * rr * rr), 0.0, 1e-12 * (1 + std::abs(weighted.at(c, r))));
    }
}

TEST(BackprojectScan, RejectsNonFinitePose) {
  const RadarConfig cfg;
  CompressedScan s;
  s.pose.x_m = NAN;
  s.bins.assign(10, {});
  EXPECT_THROW(backproject_scan(s, cfg, wide_grid()), Error);
}

TEST(Accumulate, SingleAndDouble) {
  const RadarConfig cfg;
  const ImageGrid g = wide_grid();
  const SarImage p = backproject_scan(random_scan(Pose2(0, 0, 0), bins_to_cover(cfg), 2), cfg, g);
  const std::vector<SarImage> one{p};
  const SarImage a = accumulate(one);
  EXPECT_EQ(a.pixels, p.pixels);
  EXPECT_EQ(a.scan_count, 1u);
  const std::vector<SarImage> two{p, p};
  const SarImage b = accumulate(two);
  EXPECT_EQ(b.scan_count, 2u);
  for (std::size_t i = 0; i < b.pixels.size(); ++i) EXPECT_EQ(b.pixels[i], 2.0 * p.pixels[i]);
}

TEST(Accumulate, GridMismatchAndEmptyInputThrow) {
  const ImageGrid g = wide_grid();
  ImageGrid h = g;
  h.origin_x_m += 0.01;
  const std::vector<SarImage> mixed{SarImage(g), SarImage(h)};
  EXPECT_THROW(accumulate(mixed), Error);
  EXPECT_THROW(accumulate(std::vector<SarImage>{}), Error);
}

TEST(BuildSar, OneScanEqualsBackprojectScan) {
  const RadarConfig cfg;
  const ImageGrid g = wide_grid();
  const std::vector<CompressedScan> scans{random_scan(Pose2(0.1, 0.2, 0.3), bins_to_cover(cfg), 3)};
  const SarImage a = build_sar(scans, cfg, g);
  const SarImage b = backproject_scan(scans.front(), cfg, g);
  EXPECT_EQ(a.pixels, b.pixels);
  EXPECT_EQ(a.scan_count, 1u);
}

TEST(BuildSar, EqualsAccumulatedPartialsExactly) {
  const RadarConfig cfg;
  const ImageGrid g = wide_grid();
  std::vector<CompressedScan> scans;
  std::vector<SarImage> partials;
  for (int i = 0; i < 8; ++i) {
    scans.push_back(random_scan(Pose2(0.05 * i, 0, 0), bins_to_cover(cfg), 100 + static_cast<std::uint64_t>(i)));
    partials.push_back(backproject_scan(scans.back(), cfg, g));
  }
  const SarImage a = build_sar(scans, cfg, g);
  const SarImage b = accumulate(partials);
  EXPECT_EQ(a.pixels, b.pixels);
  EXPECT_EQ(a.scan_count, 8u);
}

TEST(BuildSar, ScanOrderPermutationChangesLittle) {
  const RadarConfig cfg;
  const ImageGrid g = wide_grid();
  std::vector<CompressedScan> scans;
  for (int i = 0; i < 10; ++i)
    scans.push_back(random_scan(Pose2(0.03 * i, 0.01 * i, 0.05 * i), bins_to_cover(cfg), 200 + static_cast<std::uint64_t>(i)));
  const SarImage a = build_sar(scans, cfg, g);
  std::mt19937_64 rng(1);
  std::shuffle(scans.begin(), scans.end(), rng);
  const SarImage b = build_sar(scans, cfg, g);
  for (std::size_t i = 0; i < a.pixels.size(); ++i)
    EXPECT_LE(std::abs(a.pixels[i] - b.pixels[i]), 1e-6 * std::max(1.0, std::abs(a.pixels[i])));
}

TEST(BuildSar, EmptyInputThrows) {
  EXPECT_THROW(build_sar(std::vector<CompressedScan>{}, RadarConfig{}, wide_grid()), Error);
}

TEST(BuildSar, SideRadarsIlluminateOppositeHalfPlanes) {
  const auto configs = uwbsar::testing::side_radars();
  const ImageGrid g = wide_grid();
  BinaryGrid left(g.width_px, g.height_px), right(g.width_px, g.height_px);
  for (const auto& t : uwbsar::testing::straight_drive(20, 1.0)) {
    const auto ml = fov_mask(t.radars[0], configs[0], g);
    const auto mr = fov_mask(t.radars[1], configs[1], g);
    for (std::size_t i = 0; i < ml.cells.size(); ++i) {
      left.cells[i] |= ml.cells[i];
      right.cells[i] |= mr.cells[i];
    }
  }
  ASSERT_GT(left.count(), 0u);
  ASSERT_GT(right.count(), 0u);
  for (std::size_t r = 0; r < g.height_px; ++r)
    for (std::size_t c = 0; c < g.width_px; ++c) {
      const double y = g.pixel_center(c, r).y;
      EXPECT_FALSE(left.at(c, r) && right.at(c, r));
      if (left.at(c, r)) { EXPECT_GT(y, 0.0); }
      if (right.at(c, r)) { EXPECT_LT(y, 0.0); }
    }
  // Each radar's scans only ever land in its own half-plane.
  std::vector<CompressedScan> scans;
  for (const auto& t : uwbsar::testing::straight_drive(20, 1.0))
    for (std::size_t i = 0; i < 2; ++i) {
      auto s = random_scan(t.radars[i], bins_to_cover(configs[i]), scans.size() + 1);
      s.radar_index = i;
      scans.push_back(std::move(s));
    }
  const SarImage img = build_sar(scans, configs, g);
  EXPECT_EQ(img.scan_count, 40u);
  for (std::size_t i = 0; i < img.pixels.size(); ++i)
    if (!left.cells[i] && !right.cells[i]) { EXPECT_EQ(img.pixels[i], std::complex<double>()); }
}

TEST(BuildSar, MissingRadarConfigurationThrows) {
  CompressedScan s = random_scan(Pose2(0, 0, 0), 10, 1);
  s.radar_index = 3;
  const std::vector<RadarConfig> configs(2);
  EXPECT_THROW(build_sar(std::vector<CompressedScan>{s}, configs, wide_grid()), Error);
}

TEST(GridForPoses, CoversBoundingBoxPaddedByRange) {
  const std::vector<Pose2> poses{Pose2(0, 0, 0), Pose2(1.5, 0.2, 0)};
  const ImageGrid g = grid_for_poses(poses, 3.0, 0.005);
  EXPECT_DOUBLE_EQ(g.origin_x_m, -3.0);
  EXPECT_DOUBLE_EQ(g.origin_y_m, -3.0);
  const Point2 far = g.pixel_center(g.width_px - 1, g.height_px - 1);
  EXPECT_GE(far.x, 4.5 - 1e-9);
  EXPECT_GE(far.y, 3.2 - 1e-9);
  EXPECT_THROW(grid_for_poses(std::vector<Pose2>{}, 3.0, 0.005), Error);
}

#pragma once

// Back-projection image formation: each compressed scan is spread over the
// pixels of its field of view by round-trip range, and the partial images of
// all poses are summed coherently.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "uwbsar/core.hpp"
#include "uwbsar/radar_model.hpp"

namespace uwbsar {

/// Pixel lattice in the image frame. Pixel (col, row) has its center at
/// origin + (col, row) * resolution.
struct ImageGrid {
  std::size_t width_px = 1;
  std::size_t height_px = 1;
  double resolution_m = 0.005;
  double origin_x_m = 0.0;
  double origin_y_m = 0.0;

  void validate() const {
    if (width_px < 1 || height_px < 1) throw Error("ImageGrid: empty grid");
    if (!(resolution_m > 0.0) || !std::isfinite(resolution_m))
      throw Error("ImageGrid: resolution must be positive");
    if (!std::isfinite(origin_x_m) || !std::isfinite(origin_y_m))
      throw Error("ImageGrid: non-finite origin");
  }
  std::size_t size() const { return width_px * height_px; }
  Point2 pixel_center(std::size_t col, std::size_t row) const {
    return {origin_x_m + static_cast<double>(col) * resolution_m,
            origin_y_m + static_cast<double>(row) * resolution_m};
  }
  /// Fractional pixel coordinates of a world point.
  Point2 to_pixel(Point2 p) const {
    return {(p.x - origin_x_m) / resolution_m, (p.y - origin_y_m) / resolution_m};
  }
  bool operator==(const ImageGrid&) const = default;
};

/// Complex accumulator over a grid; scan_count is the number of summed S_i.
struct SarImage {
  ImageGrid grid;
  std::vector<std::complex<double>> pixels;
  std::size_t scan_count = 0;

  SarImage() = default;
  explicit SarImage(const ImageGrid& g) : grid(g), pixels(g.size()) {}

  std::complex<double>& at(std::size_t col, std::size_t row) {
    return pixels[row * grid.width_px + col];
  }
  const std::complex<double>& at(std::size_t col, std::size_t row) const {
    return pixels[row * grid.width_px + col];
  }
};

/// Euclidean distance between a pixel center and the radar phase center.
inline double pixel_range(Point2 pixel_center, const Pose2& radar) {
  const double dx = pixel_center.x - radar.x_m;
  const double dy = pixel_center.y - radar.y_m;
  return std::sqrt(dx * dx + dy * dy);
}

inline double boresight_angle(const Pose2& radar, const RadarConfig& cfg) {
  return normalize_angle(radar.theta_rad + cfg.mount_angle_rad);
}

/// Direct FOV predicate: range within [range_min, range_max] and bearing
/// within half the beamwidth of boresight.
inline bool in_fov(Point2 p, const Pose2& radar, const RadarConfig& cfg) {
  const double r = pixel_range(p, radar);
  if (r < cfg.range_min_m || r > cfg.range_max_m) return false;
  const double bearing = std::atan2(p.y - radar.y_m, p.x - radar.x_m);
  const double off = normalize_angle(bearing - boresight_angle(radar, cfg));
  return std::abs(off) <= cfg.beamwidth_rad / 2.0;
}

/// Annular-sector outline: outer arc then inner arc, chords every
/// `chord_step_rad`. World coordinates.
inline std::vector<Point2> fov_polygon(const Pose2& radar, const RadarConfig& cfg,
                                       double chord_step_rad = deg2rad(2.0)) {
  const double center = boresight_angle(radar, cfg);
  const double half = cfg.beamwidth_rad / 2.0;
  const auto segments = std::max<int>(1, static_cast<int>(std::ceil(cfg.beamwidth_rad / chord_step_rad)));
  std::vector<Point2> poly;
  poly.reserve(2 * static_cast<std::size_t>(segments) + 2);
  for (int i = 0; i <= segments; ++i) {
    const double a = center - half + cfg.beamwidth_rad * i / segments;
    poly.push_back({radar.x_m + cfg.range_max_m * std::cos(a), radar.y_m + cfg.range_max_m * std::sin(a)});
  }
  for (int i = segments; i >= 0; --i) {
    const double a = center - half + cfg.beamwidth_rad * i / segments;
    poly.push_back({radar.x_m + cfg.range_min_m * std::cos(a), radar.y_m + cfg.range_min_m * std::sin(a)});
  }
  return poly;
}

/// Horizontal run of pixel columns [col_begin, col_end) on one row.
struct PixelSpan {
  std::size_t row;
  std::size_t col_begin;
  std::size_t col_end;
};

/// Scanline polygon fill in pixel space. A pixel is covered when its center
/// lies inside the polygon (even-odd rule, edges half-open in y).
inline std::vector<PixelSpan> fill_polygon(std::span<const Point2> poly_world, const ImageGrid& grid) {
  std::vector<PixelSpan> spans;
  if (poly_world.size() < 3) return spans;
  std::vector<Point2> poly;
  poly.reserve(poly_world.size());
  double ymin = INFINITY, ymax = -INFINITY;
  for (const auto& p : poly_world) {
    poly.push_back(grid.to_pixel(p));
    ymin = std::min(ymin, poly.back().y);
    ymax = std::max(ymax, poly.back().y);
  }
  const auto h = static_cast<long>(grid.height_px);
  const auto w = static_cast<long>(grid.width_px);
  const long r0 = std::max<long>(0, static_cast<long>(std::ceil(ymin)));
  const long r1 = std::min<long>(h - 1, static_cast<long>(std::floor(ymax)));
  std::vector<double> xs;
  for (long r = r0; r <= r1; ++r) {
    const double y = static_cast<double>(r);
    xs.clear();
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
      const Point2& a = poly[j];
      const Point2& b = poly[i];
      if ((a.y <= y && y < b.y) || (b.y <= y && y < a.y))
        xs.push_back(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      const long c0 = std::max<long>(0, static_cast<long>(std::ceil(xs[k])));
      const long c1 = std::min<long>(w - 1, static_cast<long>(std::floor(xs[k + 1])));
      if (c0 <= c1)
        spans.push_back({static_cast<std::size_t>(r), static_cast<std::size_t>(c0),
                         static_cast<std::size_t>(c1 + 1)});
    }
  }
  return spans;
}

inline std::vector<PixelSpan> fov_spans(const Pose2& radar, const RadarConfig& cfg, const ImageGrid& grid) {
  const auto poly = fov_polygon(radar, cfg);
  return fill_polygon(poly, grid);
}

/// Rasterized FOV of one radar pose.
inline BinaryGrid fov_mask(const Pose2& radar, const RadarConfig& cfg, const ImageGrid& grid) {
  cfg.validate();
  grid.validate();
  BinaryGrid mask(grid.width_px, grid.height_px);
  for (const auto& s : fov_spans(radar, cfg, grid))
    for (std::size_t c = s.col_begin; c < s.col_end; ++c) mask.set(c, s.row);
  return mask;
}

struct BackprojectionOptions {
  /// Multiply each sample by R^2 to undo two-way spreading. Off by default.
  bool range_squared_weighting = false;
};

namespace detail {

template <typename Sink>
void for_each_fov_sample(const CompressedScan& scan, const RadarConfig& cfg, const ImageGrid& grid,
                         const BackprojectionOptions& opts, Sink&& sink) {
  const double inv_dd = 1.0 / range_bin_spacing(cfg);
  const std::size_t n_bins = scan.bins.size();
  for (const auto& s : fov_spans(scan.pose, cfg, grid)) {
    const double dy = grid.origin_y_m + static_cast<double>(s.row) * grid.resolution_m - scan.pose.y_m;
    const double dy2 = dy * dy;
    for (std::size_t c = s.col_begin; c < s.col_end; ++c) {
      const double dx = grid.origin_x_m + static_cast<double>(c) * grid.resolution_m - scan.pose.x_m;
      const double r = std::sqrt(dx * dx + dy2);
      const auto k = static_cast<std::size_t>(std::llround(r * inv_dd));
      if (k >= n_bins) continue;
      std::complex<double> v = scan.bins[k];
      if (opts.range_squared_weighting) v *= r * r;
      sink(s.row * grid.width_px + c, v);
    }
  }
}

inline void check_scan(const CompressedScan& scan) {
  const Pose2& p = scan.pose;
  if (!std::isfinite(p.x_m) || !std::isfinite(p.y_m) || !std::isfinite(p.theta_rad))
    throw Error("backprojection: non-finite scan pose");
}

}  // namespace detail

/// Partial image S_i of one scan: masked pixels take the nearest range bin,
/// everything else stays zero.
inline SarImage backproject_scan(const CompressedScan& scan, const RadarConfig& cfg, const ImageGrid& grid,
                                 const BackprojectionOptions& opts = {}) {
  cfg.validate();
  grid.validate();
  detail::check_scan(scan);
  SarImage img(grid);
  img.scan_count = 1;
  detail::for_each_fov_sample(scan, cfg, grid, opts,
                              [&](std::size_t idx, std::complex<double> v) { img.pixels[idx] = v; });
  return img;
}

/// Elementwise sum of partial images in the given order.
inline SarImage accumulate(std::span<const SarImage> partials) {
  if (partials.empty()) throw Error("accumulate: no partial images");
  SarImage out(partials.front().grid);
  for (const auto& p : partials) {
    if (!(p.grid == out.grid)) throw Error("accumulate: grid mismatch");
    for (std::size_t i = 0; i < out.pixels.size(); ++i) out.pixels[i] += p.pixels[i];
    out.scan_count += p.scan_count;
  }
  return out;
}

/// Streaming accumulator: memory is one image regardless of scan count.
/// Each scan may bring its own radar configuration (dual side radars).
class SarAccumulator {
 public:
  explicit SarAccumulator(const ImageGrid& grid, BackprojectionOptions opts = {})
      : image_(grid), opts_(opts) {
    grid.validate();
  }

  void add(const CompressedScan& scan, const RadarConfig& cfg) {
    cfg.validate();
    detail::check_scan(scan);
    auto& px = image_.pixels;
    detail::for_each_fov_sample(scan, cfg, image_.grid, opts_,
                                [&](std::size_t idx, std::complex<double> v) { px[idx] += v; });
    ++image_.scan_count;
  }

  const SarImage& image() const& { return image_; }
  SarImage image() && { return std::move(image_); }

 private:
  SarImage image_;
  BackprojectionOptions opts_;
};

inline SarImage build_sar(std::span<const CompressedScan> scans, const RadarConfig& cfg, const ImageGrid& grid,
                          const BackprojectionOptions& opts = {}) {
  if (scans.empty()) throw Error("build_sar: no scans");
  SarAccumulator acc(grid, opts);
  for (const auto& s : scans) acc.add(s, cfg);
  return std::move(acc).image();
}

/// Multi-radar variant: scan.radar_index selects the configuration.
inline SarImage build_sar(std::span<const CompressedScan> scans, std::span<const RadarConfig> configs,
                          const ImageGrid& grid, const BackprojectionOptions& opts = {}) {
  if (scans.empty()) throw Error("build_sar: no scans");
  SarAccumulator acc(grid, opts);
  for (const auto& s : scans) {
    if (s.radar_index >= configs.size()) throw Error("build_sar: radar index without configuration");
    acc.add(s, configs[s.radar_index]);
  }
  return std::move(acc).image();
}

/// Grid covering the bounding box of the poses padded by range_max.
inline ImageGrid grid_for_poses(std::span<const Pose2> poses, double range_max_m, double resolution_m) {
  if (poses.empty()) throw Error("grid_for_poses: no poses");
  if (!(resolution_m > 0.0)) throw Error("grid_for_poses: resolution must be positive");
  double x0 = INFINITY, y0 = INFINITY, x1 = -INFINITY, y1 = -INFINITY;
  for (const auto& p : poses) {
    x0 = std::min(x0, p.x_m);
    y0 = std::min(y0, p.y_m);
    x1 = std::max(x1, p.x_m);
    y1 = std::max(y1, p.y_m);
  }
  ImageGrid g;
  g.resolution_m = resolution_m;
  g.origin_x_m = x0 - range_max_m;
  g.origin_y_m = y0 - range_max_m;
  g.width_px = static_cast<std::size_t>(std::ceil((x1 - x0 + 2 * range_max_m) / resolution_m)) + 1;
  g.height_px = static_cast<std::size_t>(std::ceil((y1 - y0 + 2 * range_max_m) / resolution_m)) + 1;
  return g;
}

}  // namespace uwbsar

#pragma once

// Keypoints and binary descriptors on 8-bit SAR images. Two native detector
// families share the segment-test corner front end:
//   - ORB-style: intensity-centroid orientation, 256 steered point-pair tests
//   - BRISK-style: 60-point ring pattern, long-pair gradient orientation,
//     512 short-pair tests
// Third-party detectors plug in through FeatureDetector.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "uwbsar/core.hpp"
#include "uwbsar/detail/orb_pattern.hpp"
#include "uwbsar/image_io.hpp"
#include "uwbsar/image_post.hpp"

namespace uwbsar {

struct DetectorId {
  std::uint32_t value = 0;
  constexpr bool operator==(const DetectorId&) const = default;
};

inline constexpr DetectorId kOrbDetector{1};
inline constexpr DetectorId kBriskDetector{2};

inline std::string detector_name(DetectorId id) {
  if (id == kOrbDetector) return "orb";
  if (id == kBriskDetector) return "brisk";
  return "ext" + std::to_string(id.value);
}

inline DetectorId parse_detector_id(const std::string& name) {
  if (name == "orb") return kOrbDetector;
  if (name == "brisk") return kBriskDetector;
  if (name.rfind("ext", 0) == 0 && name.size() > 3) {
    try {
      return DetectorId{static_cast<std::uint32_t>(std::stoul(name.substr(3)))};
    } catch (const std::exception&) {
    }
  }
  throw Error("unknown detector id: " + name);
}

/// Keypoint in level-0 pixel coordinates.
struct Keypoint {
  float x = 0.f;
  float y = 0.f;
  float response = 0.f;
  float angle = 0.f;  // radians, image axes (x right, y down)
  std::int32_t octave = 0;
  bool operator==(const Keypoint&) const = default;
};

/// Fixed-length bit string; bit i lives in words[i / 64] at position i % 64.
struct Descriptor {
  DetectorId detector;
  std::size_t bit_length = 0;
  std::vector<std::uint64_t> words;

  Descriptor() = default;
  Descriptor(DetectorId id, std::size_t bits) : detector(id), bit_length(bits), words((bits + 63) / 64, 0) {}

  bool bit(std::size_t i) const { return (words[i / 64] >> (i % 64)) & 1u; }
  void set_bit(std::size_t i, bool v) {
    const std::uint64_t m = std::uint64_t{1} << (i % 64);
    if (v)
      words[i / 64] |= m;
    else
      words[i / 64] &= ~m;
  }
  bool operator==(const Descriptor&) const = default;
};

inline std::size_t hamming_distance(const Descriptor& a, const Descriptor& b) {
  if (!(a.detector == b.detector) || a.bit_length != b.bit_length)
    throw Error("hamming_distance: descriptors from different detectors");
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.words.size(); ++i) d += static_cast<std::size_t>(std::popcount(a.words[i] ^ b.words[i]));
  return d;
}

struct DetectorConfig {
  DetectorId detector = kOrbDetector;
  int corner_threshold = 15;
  int n_octaves = 4;
  std::size_t target_keypoints = 200;
  double scale_factor = 1.2;

  void validate() const {
    if (corner_threshold <= 0) throw Error("DetectorConfig: corner_threshold must be > 0");
    if (target_keypoints < 1) throw Error("DetectorConfig: target_keypoints must be >= 1");
    if (n_octaves < 1) throw Error("DetectorConfig: n_octaves must be >= 1");
    if (!(scale_factor > 1.0)) throw Error("DetectorConfig: scale_factor must be > 1");
  }
};

struct FeatureSet {
  DetectorId detector;
  std::vector<Keypoint> keypoints;
  std::vector<Descriptor> descriptors;
  std::size_t dropped = 0;  // keypoints discarded for lack of border room
  bool operator==(const FeatureSet&) const = default;
};

/// Descriptors for the keypoints that fit; `keypoints[i]` pairs with
/// `descriptors[i]`.
struct DescribeResult {
  std::vector<Keypoint> keypoints;
  std::vector<Descriptor> descriptors;
  std::size_t dropped = 0;
};

// ---------------------------------------------------------------------------
// Pyramid

struct PyramidLevel {
  Gray8 image;
  double scale = 1.0;  // level-0 pixels per level pixel
};

/// Bilinear resample of `src` to w x h with pixel-center alignment.
inline Gray8 resize_bilinear(const Gray8& src, std::size_t w, std::size_t h) {
  Gray8 dst(w, h, src.resolution_m);
  const double sx = static_cast<double>(src.width_px) / static_cast<double>(w);
  const double sy = static_cast<double>(src.height_px) / static_cast<double>(h);
  const auto sw = static_cast<long>(src.width_px), sh = static_cast<long>(src.height_px);
  for (std::size_t r = 0; r < h; ++r) {
    const double fy = std::clamp((static_cast<double>(r) + 0.5) * sy - 0.5, 0.0, static_cast<double>(sh - 1));
    const long y0 = static_cast<long>(fy);
    const long y1 = std::min(y0 + 1, sh - 1);
    const double wy = fy - static_cast<double>(y0);
    for (std::size_t c = 0; c < w; ++c) {
      const double fx = std::clamp((static_cast<double>(c) + 0.5) * sx - 0.5, 0.0, static_cast<double>(sw - 1));
      const long x0 = static_cast<long>(fx);
      const long x1 = std::min(x0 + 1, sw - 1);
      const double wx = fx - static_cast<double>(x0);
      auto px = [&](long x, long y) { return static_cast<double>(src.pixels[static_cast<std::size_t>(y * sw + x)]); };
      const double v = (1 - wy) * ((1 - wx) * px(x0, y0) + wx * px(x1, y0)) + wy * ((1 - wx) * px(x0, y1) + wx * px(x1, y1));
      dst.at(c, r) = static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
    }
  }
  return dst;
}

/// Levels are resampled from level 0 directly; scale = factor^level.
inline std::vector<PyramidLevel> build_pyramid(const Gray8& img, int n_levels, double factor) {
  std::vector<PyramidLevel> levels;
  levels.push_back({img, 1.0});
  for (int l = 1; l < n_levels; ++l) {
    const double s = std::pow(factor, l);
    const auto w = static_cast<std::size_t>(std::lround(static_cast<double>(img.width_px) / s));
    const auto h = static_cast<std::size_t>(std::lround(static_cast<double>(img.height_px) / s));
    if (w < 8 || h < 8) break;
    levels.push_back({resize_bilinear(img, w, h), s});
  }
  return levels;
}

// ---------------------------------------------------------------------------
// Segment-test corners

namespace detail {

// Bresenham circle of radius 3, clockwise from 12 o'clock.
inline constexpr std::array<std::array<int, 2>, 16> kCircle16 = {{{0, -3}, {1, -3}, {2, -2}, {3, -1}, {3, 0}, {3, 1},
                                                                  {2, 2}, {1, 3}, {0, 3}, {-1, 3}, {-2, 2}, {-3, 1},
                                                                  {-3, 0}, {-3, -1}, {-2, -2}, {-1, -3}}};
inline constexpr int kArcLength = 9;

}  // namespace detail

/// Largest t for which (x, y) passes the 9-of-16 segment test, i.e. the best
/// over all contiguous 9-arcs of the smallest brighter (or darker) margin.
/// Zero or negative means no corner at any threshold. Needs a 3 px border.
inline int segment_test_score(const Gray8& img, std::size_t x, std::size_t y) {
  const int c = img.at(x, y);
  std::array<int, 16> d;
  for (std::size_t k = 0; k < 16; ++k)
    d[k] = static_cast<int>(img.at(x + static_cast<std::size_t>(detail::kCircle16[k][0]),
                                   y + static_cast<std::size_t>(detail::kCircle16[k][1]))) - c;
  int best = 0;
  for (std::size_t s = 0; s < 16; ++s) {
    int lo = 1 << 20, hi = 1 << 20;
    for (std::size_t j = 0; j < detail::kArcLength; ++j) {
      const int v = d[(s + j) % 16];
      lo = std::min(lo, v);
      hi = std::min(hi, -v);
    }
    best = std::max({best, lo, hi});
  }
  return best;
}

/// Segment-test corners on every pyramid octave, 3x3 non-maximum
/// suppression per octave, strongest first, capped at target_keypoints.
/// `border` is the margin (level pixels) excluded on each octave.
inline std::vector<Keypoint> detect_corners(const std::vector<PyramidLevel>& pyramid, const DetectorConfig& cfg,
                                            std::size_t border = 3) {
  cfg.validate();
  border = std::max<std::size_t>(border, 3);
  const int t = cfg.corner_threshold;
  std::vector<Keypoint> kps;
  for (std::size_t l = 0; l < pyramid.size() && static_cast<int>(l) < cfg.n_octaves; ++l) {
    const Gray8& im = pyramid[l].image;
    const std::size_t w = im.width_px, h = im.height_px;
    if (w <= 2 * border || h <= 2 * border) continue;
    std::vector<int> score(w * h, 0);
    for (std::size_t y = border; y < h - border; ++y) {
      for (std::size_t x = border; x < w - border; ++x) {
        // Any 9-arc covers at least two of the four compass points.
        const int c = im.at(x, y);
        int bright = 0, dark = 0;
        for (std::size_t k = 0; k < 16; k += 4) {
          const int v = im.at(x + static_cast<std::size_t>(detail::kCircle16[k][0]),
                              y + static_cast<std::size_t>(detail::kCircle16[k][1]));
          bright += v > c + t;
          dark += v < c - t;
        }
        if (bright < 2 && dark < 2) continue;
        const int s = segment_test_score(im, x, y);
        if (s > t) score[y * w + x] = s;
      }
    }
    for (std::size_t y = border; y < h - border; ++y) {
      for (std::size_t x = border; x < w - border; ++x) {
        const int s = score[y * w + x];
        if (s == 0) continue;
        // Equal neighbours all survive, so a plateau keeps every pixel.
        bool keep = true;
        for (int dy = -1; dy <= 1 && keep; ++dy)
          for (int dx = -1; dx <= 1 && keep; ++dx)
            keep = score[(y + static_cast<std::size_t>(dy)) * w + x + static_cast<std::size_t>(dx)] <= s;
        if (!keep) continue;
        Keypoint kp;
        kp.x = static_cast<float>(static_cast<double>(x) * pyramid[l].scale);
        kp.y = static_cast<float>(static_cast<double>(y) * pyramid[l].scale);
        kp.response = static_cast<float>(s);
        kp.octave = static_cast<std::int32_t>(l);
        kps.push_back(kp);
      }
    }
  }
  std::stable_sort(kps.begin(), kps.end(), [](const Keypoint& a, const Keypoint& b) {
    if (a.response != b.response) return a.response > b.response;
    if (a.octave != b.octave) return a.octave < b.octave;
    if (a.y != b.y) return a.y < b.y;
    return a.x < b.x;
  });
  if (kps.size() > cfg.target_keypoints) kps.resize(cfg.target_keypoints);
  return kps;
}

inline std::vector<Keypoint> detect_corners(const Gray8& img, const DetectorConfig& cfg, std::size_t border = 3) {
  if (img.width_px < 32 || img.height_px < 32) throw Error("detect_corners: image smaller than 32x32");
  cfg.validate();
  return detect_corners(build_pyramid(img, cfg.n_octaves, cfg.scale_factor), cfg, border);
}

// ---------------------------------------------------------------------------
// Orientation and sampling helpers

namespace detail {

/// Inclusive box sums via a summed-area table.
class BoxSampler {
 public:
  explicit BoxSampler(const Gray8& img) : w_(img.width_px), h_(img.height_px), sat_((w_ + 1) * (h_ + 1), 0) {
    for (std::size_t y = 0; y < h_; ++y) {
      std::int64_t row = 0;
      for (std::size_t x = 0; x < w_; ++x) {
        row += img.at(x, y);
        sat_[(y + 1) * (w_ + 1) + x + 1] = sat_[y * (w_ + 1) + x + 1] + row;
      }
    }
  }
  /// Sum over the (2h+1)^2 square centered at (x, y); caller keeps it inside.
  std::int64_t sum(long x, long y, long h) const {
    const auto x0 = static_cast<std::size_t>(x - h), y0 = static_cast<std::size_t>(y - h);
    const auto x1 = static_cast<std::size_t>(x + h + 1), y1 = static_cast<std::size_t>(y + h + 1);
    return sat_[y1 * (w_ + 1) + x1] - sat_[y0 * (w_ + 1) + x1] - sat_[y1 * (w_ + 1) + x0] + sat_[y0 * (w_ + 1) + x0];
  }
  std::size_t width() const { return w_; }
  std::size_t height() const { return h_; }

 private:
  std::size_t w_, h_;
  std::vector<std::int64_t> sat_;
};

inline long round_to_long(double v) { return static_cast<long>(std::lround(v)); }

}  // namespace detail

/// Intensity-centroid orientation atan2(m01, m10) over the disc of
/// `radius_px` around (x, y). The radius shrinks to fit inside the image; a
/// zero-moment patch gives 0.
inline double orientation_centroid(const Gray8& img, long x, long y, int radius_px) {
  const long r = std::min<long>({radius_px, x, y, static_cast<long>(img.width_px) - 1 - x,
                                 static_cast<long>(img.height_px) - 1 - y});
  if (r <= 0) return 0.0;
  std::int64_t m10 = 0, m01 = 0;
  for (long dy = -r; dy <= r; ++dy) {
    for (long dx = -r; dx <= r; ++dx) {
      if (dx * dx + dy * dy > r * r) continue;
      const std::int64_t v = img.at(static_cast<std::size_t>(x + dx), static_cast<std::size_t>(y + dy));
      m10 += dx * v;
      m01 += dy * v;
    }
  }
  if (m10 == 0 && m01 == 0) return 0.0;
  return std::atan2(static_cast<double>(m01), static_cast<double>(m10));
}

inline double orientation_centroid(const Gray8& img, const Keypoint& kp, int radius_px) {
  return orientation_centroid(img, detail::round_to_long(kp.x), detail::round_to_long(kp.y), radius_px);
}

// ---------------------------------------------------------------------------
// ORB-style descriptor

inline constexpr std::size_t kOrbBits = 256;
inline constexpr int kOrbOrientationRadius = 15;
inline constexpr int kOrbSmoothHalf = 2;  // 5x5 box
inline constexpr std::size_t kOrbBorder = static_cast<std::size_t>(detail::kOrbPatternRadius + kOrbSmoothHalf + 1);

namespace detail {

inline Descriptor orb_descriptor_at(const BoxSampler& box, long x, long y, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Descriptor d(kOrbDetector, kOrbBits);
  for (std::size_t i = 0; i < kOrbBits; ++i) {
    const auto& p = kOrbPattern[i];
    const long x1 = x + round_to_long(c * p[0] - s * p[1]);
    const long y1 = y + round_to_long(s * p[0] + c * p[1]);
    const long x2 = x + round_to_long(c * p[2] - s * p[3]);
    const long y2 = y + round_to_long(s * p[2] + c * p[3]);
    d.set_bit(i, box.sum(x1, y1, kOrbSmoothHalf) < box.sum(x2, y2, kOrbSmoothHalf));
  }
  return d;
}

inline bool fits(const Gray8& img, long x, long y, long margin) {
  return x >= margin && y >= margin && x + margin < static_cast<long>(img.width_px) &&
         y + margin < static_cast<long>(img.height_px);
}

inline Point2 level_coords(const Keypoint& kp, const PyramidLevel& lvl) {
  return {static_cast<double>(kp.x) / lvl.scale, static_cast<double>(kp.y) / lvl.scale};
}

inline const PyramidLevel& level_of(const std::vector<PyramidLevel>& pyr, const Keypoint& kp) {
  if (kp.octave < 0 || static_cast<std::size_t>(kp.octave) >= pyr.size())
    throw Error("keypoint octave outside pyramid");
  return pyr[static_cast<std::size_t>(kp.octave)];
}

}  // namespace detail

/// Intensity-centroid angle for each keypoint, measured on its octave.
inline void assign_orb_orientations(const std::vector<PyramidLevel>& pyramid, std::span<Keypoint> kps) {
  for (auto& kp : kps) {
    const auto& lvl = detail::level_of(pyramid, kp);
    const Point2 p = detail::level_coords(kp, lvl);
    kp.angle = static_cast<float>(orientation_centroid(lvl.image, detail::round_to_long(p.x),
                                                       detail::round_to_long(p.y), kOrbOrientationRadius));
  }
}

/// Steered 256-test descriptors on the 5x5 box-smoothed octave image.
inline DescribeResult describe_orb(const std::vector<PyramidLevel>& pyramid, std::span<const Keypoint> kps) {
  DescribeResult out;
  std::vector<detail::BoxSampler> boxes;
  boxes.reserve(pyramid.size());
  for (const auto& l : pyramid) boxes.emplace_back(l.image);
  for (const auto& kp : kps) {
    const auto& lvl = detail::level_of(pyramid, kp);
    const Point2 p = detail::level_coords(kp, lvl);
    const long x = detail::round_to_long(p.x), y = detail::round_to_long(p.y);
    if (!detail::fits(lvl.image, x, y, static_cast<long>(kOrbBorder))) {
      ++out.dropped;
      continue;
    }
    out.keypoints.push_back(kp);
    out.descriptors.push_back(detail::orb_descriptor_at(boxes[static_cast<std::size_t>(kp.octave)], x, y, kp.angle));
  }
  return out;
}

inline DescribeResult describe_orb(const Gray8& img, std::span<const Keypoint> kps, double scale_factor = 1.2) {
  int levels = 1;
  for (const auto& kp : kps) levels = std::max(levels, kp.octave + 1);
  return describe_orb(build_pyramid(img, levels, scale_factor), kps);
}

// ---------------------------------------------------------------------------
// BRISK-style descriptor

inline constexpr std::size_t kBriskBits = 512;
inline constexpr std::size_t kBriskPoints = 60;

/// Ring geometry: radii 0.85 * {0, 2.9, 4.9, 7.4, 10.8} px and 1/10/14/15/20
/// points per ring, all scaled by kPatternScale. Short pairs are closer than
/// 5.85 px, long pairs farther than 8.2 px (same scaling); this yields
/// exactly 512 short pairs.
struct BriskPattern {
  static constexpr double kPatternScale = 1.5;
  static constexpr std::array<double, 5> kRadii = {0.0, 2.9, 4.9, 7.4, 10.8};
  static constexpr std::array<int, 5> kCounts = {1, 10, 14, 15, 20};
  static constexpr double kShortMax = 5.85;
  static constexpr double kLongMin = 8.2;

  struct PatternPoint {
    double radius;
    double phase;
    long half;  // box half-width standing in for the ring's Gaussian
  };
  struct Pair {
    std::uint8_t i, j;
  };
  struct LongPair {
    std::uint8_t i, j;
    double wx, wy;  // (p_j - p_i) / |p_j - p_i|^2
  };

  std::vector<PatternPoint> points;
  std::vector<Pair> short_pairs;
  std::vector<LongPair> long_pairs;
  long max_reach = 0;

  BriskPattern() {
    const double f = 0.85 * kPatternScale;
    for (std::size_t ring = 0; ring < kRadii.size(); ++ring) {
      const double r = kRadii[ring] * f;
      // Smoothing sigma proportional to ring radius (0.15 r); a box of
      // half-width h has sigma ~ h / sqrt(3).
      const long h = std::max<long>(1, std::lround(0.15 * r * std::sqrt(3.0)));
      for (int k = 0; k < kCounts[ring]; ++k)
        points.push_back({r, 2.0 * kPi * k / kCounts[ring], h});
      max_reach = std::max(max_reach, static_cast<long>(std::ceil(r)) + h + 1);
    }
    const double dmax = kShortMax * kPatternScale, dmin = kLongMin * kPatternScale;
    for (std::size_t i = 0; i < points.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        const double dx = points[j].radius * std::cos(points[j].phase) - points[i].radius * std::cos(points[i].phase);
        const double dy = points[j].radius * std::sin(points[j].phase) - points[i].radius * std::sin(points[i].phase);
        const double d2 = dx * dx + dy * dy;
        const double d = std::sqrt(d2);
        if (d < dmax) short_pairs.push_back({static_cast<std::uint8_t>(i), static_cast<std::uint8_t>(j)});
        if (d > dmin)
          long_pairs.push_back({static_cast<std::uint8_t>(i), static_cast<std::uint8_t>(j), dx / d2, dy / d2});
      }
    }
    if (short_pairs.size() < kBriskBits) throw Error("BriskPattern: too few short pairs");
    short_pairs.resize(kBriskBits);
  }

  static const BriskPattern& instance() {
    static const BriskPattern p;
    return p;
  }
};

inline constexpr std::size_t kBriskBorder = 19;

namespace detail {

struct BriskSample {
  std::int64_t sum;
  std::int64_t count;
};

inline void brisk_sample(const BoxSampler& box, long x, long y, double angle, std::span<BriskSample> out) {
  const auto& pat = BriskPattern::instance();
  for (std::size_t k = 0; k < pat.points.size(); ++k) {
    const auto& p = pat.points[k];
    const long px = x + round_to_long(p.radius * std::cos(p.phase + angle));
    const long py = y + round_to_long(p.radius * std::sin(p.phase + angle));
    out[k] = {box.sum(px, py, p.half), (2 * p.half + 1) * (2 * p.half + 1)};
  }
}

/// Mean(a) - mean(b) scaled by count_a * count_b, exact in integers.
inline std::int64_t scaled_diff(const BriskSample& a, const BriskSample& b) {
  return a.sum * b.count - b.sum * a.count;
}

inline double brisk_orientation(const BoxSampler& box, long x, long y) {
  const auto& pat = BriskPattern::instance();
  std::array<BriskSample, kBriskPoints> s;
  brisk_sample(box, x, y, 0.0, s);
  double gx = 0.0, gy = 0.0;
  for (const auto& lp : pat.long_pairs) {
    const double diff = static_cast<double>(scaled_diff(s[lp.j], s[lp.i])) /
                        static_cast<double>(s[lp.i].count * s[lp.j].count);
    gx += diff * lp.wx;
    gy += diff * lp.wy;
  }
  if (gx == 0.0 && gy == 0.0) return 0.0;
  return std::atan2(gy, gx);
}

inline Descriptor brisk_descriptor_at(const BoxSampler& box, long x, long y, double angle) {
  const auto& pat = BriskPattern::instance();
  std::array<BriskSample, kBriskPoints> s;
  brisk_sample(box, x, y, angle, s);
  Descriptor d(kBriskDetector, kBriskBits);
  for (std::size_t b = 0; b < kBriskBits; ++b) {
    const auto& pr = pat.short_pairs[b];
    d.set_bit(b, scaled_diff(s[pr.j], s[pr.i]) > 0);
  }
  return d;
}

}  // namespace detail

/// Gradient orientation from long pairs, then 512 short-pair comparisons on
/// the pattern rotated by that angle. Keypoint angles are overwritten.
inline DescribeResult describe_brisk(const std::vector<PyramidLevel>& pyramid, std::span<const Keypoint> kps) {
  DescribeResult out;
  std::vector<detail::BoxSampler> boxes;
  boxes.reserve(pyramid.size());
  for (const auto& l : pyramid) boxes.emplace_back(l.image);
  for (auto kp : kps) {
    const auto& lvl = detail::level_of(pyramid, kp);
    const Point2 p = detail::level_coords(kp, lvl);
    const long x = detail::round_to_long(p.x), y = detail::round_to_long(p.y);
    if (!detail::fits(lvl.image, x, y, static_cast<long>(kBriskBorder))) {
      ++out.dropped;
      continue;
    }
    const auto& box = boxes[static_cast<std::size_t>(kp.octave)];
    const double angle = detail::brisk_orientation(box, x, y);
    kp.angle = static_cast<float>(angle);
    out.keypoints.push_back(kp);
    out.descriptors.push_back(detail::brisk_descriptor_at(box, x, y, angle));
  }
  return out;
}

inline DescribeResult describe_brisk(const Gray8& img, std::span<const Keypoint> kps, double scale_factor = 1.2) {
  int levels = 1;
  for (const auto& kp : kps) levels = std::max(levels, kp.octave + 1);
  return describe_brisk(build_pyramid(img, levels, scale_factor), kps);
}

// ---------------------------------------------------------------------------
// Detector interface

class FeatureDetector {
 public:
  virtual ~FeatureDetector() = default;
  virtual DetectorId id() const = 0;
  virtual FeatureSet detect_and_describe(const Gray8& img) const = 0;
};

class OrbDetector final : public FeatureDetector {
 public:
  explicit OrbDetector(DetectorConfig cfg = {}) : cfg_(cfg) {
    cfg_.detector = kOrbDetector;
    cfg_.validate();
  }
  DetectorId id() const override { return kOrbDetector; }

  FeatureSet detect_and_describe(const Gray8& img) const override {
    if (img.width_px < 32 || img.height_px < 32) throw Error("detect_and_describe: image smaller than 32x32");
    const auto pyr = build_pyramid(img, cfg_.n_octaves, cfg_.scale_factor);
    auto kps = detect_corners(pyr, cfg_, kOrbBorder);
    assign_orb_orientations(pyr, kps);
    auto d = describe_orb(pyr, kps);
    return {kOrbDetector, std::move(d.keypoints), std::move(d.descriptors), d.dropped};
  }

 private:
  DetectorConfig cfg_;
};

class BriskDetector final : public FeatureDetector {
 public:
  explicit BriskDetector(DetectorConfig cfg = {}) : cfg_(cfg) {
    cfg_.detector = kBriskDetector;
    cfg_.validate();
  }
  DetectorId id() const override { return kBriskDetector; }

  FeatureSet detect_and_describe(const Gray8& img) const override {
    if (img.width_px < 32 || img.height_px < 32) throw Error("detect_and_describe: image smaller than 32x32");
    const auto pyr = build_pyramid(img, cfg_.n_octaves, cfg_.scale_factor);
    const auto kps = detect_corners(pyr, cfg_, kBriskBorder);
    auto d = describe_brisk(pyr, kps);
    return {kBriskDetector, std::move(d.keypoints), std::move(d.descriptors), d.dropped};
  }

 private:
  DetectorConfig cfg_;
};

inline std::unique_ptr<FeatureDetector> make_detector(const DetectorConfig& cfg) {
  if (cfg.detector == kOrbDetector) return std::make_unique<OrbDetector>(cfg);
  if (cfg.detector == kBriskDetector) return std::make_unique<BriskDetector>(cfg);
  throw Error("make_detector: no native detector for id " + detector_name(cfg.detector));
}

inline FeatureSet detect_and_describe(const Gray8& img, const DetectorConfig& cfg) {
  return make_detector(cfg)->detect_and_describe(img);
}

// ---------------------------------------------------------------------------
// Serialization: "UWBF", version, detector id, count, bit length, then per
// keypoint x, y, response, angle (f32) and octave (i32), then descriptor
// bytes packed LSB-first. All little-endian.

inline constexpr std::uint32_t kFeatureSetVersion = 1;

inline void write_feature_set(std::ostream& out, const FeatureSet& fs) {
  if (fs.keypoints.size() != fs.descriptors.size()) throw Error("write_feature_set: keypoint/descriptor count mismatch");
  const std::size_t bits = fs.descriptors.empty() ? 0 : fs.descriptors.front().bit_length;
  out.write("UWBF", 4);
  detail::put_u32le(out, kFeatureSetVersion);
  detail::put_u32le(out, fs.detector.value);
  detail::put_u32le(out, static_cast<std::uint32_t>(fs.keypoints.size()));
  detail::put_u32le(out, static_cast<std::uint32_t>(bits));
  for (std::size_t i = 0; i < fs.keypoints.size(); ++i) {
    const auto& kp = fs.keypoints[i];
    const auto& d = fs.descriptors[i];
    if (d.bit_length != bits || !(d.detector == fs.detector)) throw Error("write_feature_set: inconsistent descriptors");
    detail::put_f32le(out, kp.x);
    detail::put_f32le(out, kp.y);
    detail::put_f32le(out, kp.response);
    detail::put_f32le(out, kp.angle);
    detail::put_u32le(out, static_cast<std::uint32_t>(kp.octave));
    for (std::size_t b = 0; b < (bits + 7) / 8; ++b) {
      const auto byte = static_cast<char>((d.words[b / 8] >> (8 * (b % 8))) & 0xffu);
      out.put(byte);
    }
  }
  if (!out) throw Error("write_feature_set: write failed");
}

inline FeatureSet read_feature_set(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::string(magic, 4) != "UWBF") throw Error("read_feature_set: bad magic");
  std::uint32_t version, id, count, bits;
  if (!detail::get_u32le(in, version) || !detail::get_u32le(in, id) || !detail::get_u32le(in, count) ||
      !detail::get_u32le(in, bits))
    throw Error("read_feature_set: truncated header");
  if (version != kFeatureSetVersion) throw Error("read_feature_set: unsupported version " + std::to_string(version));
  FeatureSet fs;
  fs.detector = DetectorId{id};
  for (std::uint32_t i = 0; i < count; ++i) {
    Keypoint kp;
    std::uint32_t oct;
    if (!detail::get_f32le(in, kp.x) || !detail::get_f32le(in, kp.y) || !detail::get_f32le(in, kp.response) ||
        !detail::get_f32le(in, kp.angle) || !detail::get_u32le(in, oct))
      throw Error("read_feature_set: truncated keypoint " + std::to_string(i));
    kp.octave = static_cast<std::int32_t>(oct);
    Descriptor d(fs.detector, bits);
    for (std::size_t b = 0; b < (bits + 7) / 8; ++b) {
      char c;
      if (!in.get(c)) throw Error("read_feature_set: truncated descriptor " + std::to_string(i));
      d.words[b / 8] |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * (b % 8));
    }
    fs.keypoints.push_back(kp);
    fs.descriptors.push_back(std::move(d));
  }
  return fs;
}

inline void write_feature_set(const std::string& path, const FeatureSet& fs) {
  auto out = detail::open_binary_out(path);
  write_feature_set(out, fs);
}

inline FeatureSet read_feature_set(const std::string& path) {
  auto in = detail::open_binary_in(path);
  return read_feature_set(in);
}

}  // namespace uwbsar

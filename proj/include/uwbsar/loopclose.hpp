#pragma once

// Descriptor matching (brute-force 2-NN, ratio test), RANSAC similarity
// estimation, and the dual-detector loop-closure check with weighted fusion.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "uwbsar/core.hpp"
#include "uwbsar/features.hpp"
#include "uwbsar/image_io.hpp"
#include "uwbsar/image_post.hpp"

namespace uwbsar {

struct MatchPair {
  std::size_t index_a = 0;
  std::size_t index_b = 0;
  std::size_t distance = 0;
  std::size_t second_distance = 0;
  bool operator==(const MatchPair&) const = default;
};

/// Two nearest descriptors of b for every descriptor of a; ties keep the
/// lower index in b.
inline std::vector<MatchPair> knn_match(const FeatureSet& a, const FeatureSet& b) {
  if (!(a.detector == b.detector))
    throw Error("knn_match: detector mismatch (" + detector_name(a.detector) + " vs " + detector_name(b.detector) + ")");
  if (a.descriptors.empty()) throw Error("knn_match: empty query set");
  if (b.descriptors.size() < 2) throw Error("knn_match: train set needs at least 2 descriptors");
  const std::size_t bits = a.descriptors.front().bit_length;
  for (const auto* s : {&a, &b})
    for (const auto& d : s->descriptors)
      if (d.bit_length != bits || !(d.detector == a.detector)) throw Error("knn_match: inconsistent descriptors");

  const std::size_t words = a.descriptors.front().words.size();
  std::vector<MatchPair> out;
  out.reserve(a.descriptors.size());
  for (std::size_t i = 0; i < a.descriptors.size(); ++i) {
    const auto* qa = a.descriptors[i].words.data();
    std::size_t best = std::numeric_limits<std::size_t>::max(), second = best, best_j = 0;
    for (std::size_t j = 0; j < b.descriptors.size(); ++j) {
      const auto* qb = b.descriptors[j].words.data();
      std::size_t d = 0;
      for (std::size_t w = 0; w < words; ++w) d += static_cast<std::size_t>(std::popcount(qa[w] ^ qb[w]));
      if (d < best) {
        second = best;
        best = d;
        best_j = j;
      } else if (d < second) {
        second = d;
      }
    }
    out.push_back({i, best_j, best, second});
  }
  return out;
}

/// Keeps unambiguous matches: distance < ratio * second_distance. A zero
/// second distance only admits an exact (zero-distance) match.
inline std::vector<MatchPair> ratio_test(std::span<const MatchPair> matches, double ratio) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw Error("ratio_test: ratio must lie in (0, 1)");
  std::vector<MatchPair> out;
  for (const auto& m : matches) {
    const bool keep = m.second_distance == 0
                          ? m.distance == 0
                          : static_cast<double>(m.distance) < ratio * static_cast<double>(m.second_distance);
    if (keep) out.push_back(m);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Similarity estimation

/// b = scale * R(rotation) * a + t, in whatever units the points carry.
struct Similarity2 {
  double scale = 1.0;
  double rotation_rad = 0.0;
  double tx = 0.0;
  double ty = 0.0;

  Point2 apply(Point2 p) const {
    const double c = scale * std::cos(rotation_rad), s = scale * std::sin(rotation_rad);
    return {c * p.x - s * p.y + tx, s * p.x + c * p.y + ty};
  }
};

struct Correspondence {
  Point2 a;
  Point2 b;
};

namespace detail {

inline std::complex<double> as_complex(Point2 p) { return {p.x, p.y}; }

inline Similarity2 from_complex(std::complex<double> z, std::complex<double> t) {
  return {std::abs(z), std::arg(z), t.real(), t.imag()};
}

}  // namespace detail

/// Exact similarity through two correspondences; empty if the a-points coincide.
inline std::optional<Similarity2> fit_similarity_two_point(const Correspondence& c1, const Correspondence& c2) {
  const auto da = detail::as_complex(c2.a) - detail::as_complex(c1.a);
  if (std::abs(da) == 0.0) return std::nullopt;
  const auto z = (detail::as_complex(c2.b) - detail::as_complex(c1.b)) / da;
  if (std::abs(z) == 0.0) return std::nullopt;
  return detail::from_complex(z, detail::as_complex(c1.b) - z * detail::as_complex(c1.a));
}

/// Least-squares similarity (closed form in complex arithmetic).
inline std::optional<Similarity2> fit_similarity_least_squares(std::span<const Correspondence> cs) {
  if (cs.size() < 2) return std::nullopt;
  std::complex<double> ma{}, mb{};
  for (const auto& c : cs) {
    ma += detail::as_complex(c.a);
    mb += detail::as_complex(c.b);
  }
  const double n = static_cast<double>(cs.size());
  ma /= n;
  mb /= n;
  std::complex<double> num{};
  double den = 0.0;
  for (const auto& c : cs) {
    const auto a = detail::as_complex(c.a) - ma;
    const auto b = detail::as_complex(c.b) - mb;
    num += std::conj(a) * b;
    den += std::norm(a);
  }
  if (den == 0.0 || std::abs(num) == 0.0) return std::nullopt;
  const auto z = num / den;
  return detail::from_complex(z, mb - z * ma);
}

struct RansacConfig {
  std::size_t iterations = 2000;
  double inlier_threshold = 3.0;  // same units as the points
  std::size_t min_inliers = 3;
};

struct RansacResult {
  std::optional<Similarity2> model;
  std::vector<std::uint8_t> inliers;
  std::size_t inlier_count = 0;
};

/// 2-point RANSAC over similarities, then a least-squares refit on the
/// winning hypothesis' inliers. Deterministic for a given seed.
inline RansacResult estimate_similarity_ransac(std::span<const Correspondence> cs, std::uint64_t seed,
                                               const RansacConfig& cfg = {}) {
  if (cs.size() < 2) throw Error("estimate_similarity_ransac: need at least 2 correspondences");
  const std::size_t n = cs.size();
  const double thr2 = cfg.inlier_threshold * cfg.inlier_threshold;
  auto count_inliers = [&](const Similarity2& m, std::vector<std::uint8_t>* flags) {
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const Point2 p = m.apply(cs[i].a);
      const double dx = p.x - cs[i].b.x, dy = p.y - cs[i].b.y;
      const bool in = dx * dx + dy * dy <= thr2;
      k += in;
      if (flags) (*flags)[i] = in;
    }
    return k;
  };

  std::mt19937_64 rng(seed);
  std::optional<Similarity2> best;
  std::size_t best_count = 0;
  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    const std::size_t i = static_cast<std::size_t>(rng() % n);
    std::size_t j = static_cast<std::size_t>(rng() % (n - 1));
    if (j >= i) ++j;
    const auto m = fit_similarity_two_point(cs[i], cs[j]);
    if (!m) continue;
    const std::size_t k = count_inliers(*m, nullptr);
    if (k > best_count) {
      best_count = k;
      best = m;
      if (k == n) break;
    }
  }

  RansacResult res;
  res.inliers.assign(n, 0);
  if (!best || best_count < std::max<std::size_t>(cfg.min_inliers, 2)) return res;
  res.inlier_count = count_inliers(*best, &res.inliers);
  std::vector<Correspondence> in;
  for (std::size_t i = 0; i < n; ++i)
    if (res.inliers[i]) in.push_back(cs[i]);
  res.model = fit_similarity_least_squares(in);
  if (!res.model) res.model = best;
  return res;
}

// ---------------------------------------------------------------------------
// Reports

/// Metric similarity between two regions. Held in meters and radians;
/// printed in millimeters and degrees.
struct SimilarityTransform {
  double scale = 1.0;
  double tx_m = 0.0;
  double ty_m = 0.0;
  double rot_rad = 0.0;

  bool valid() const {
    return scale > 0.0 && std::isfinite(scale) && std::isfinite(tx_m) && std::isfinite(ty_m) && std::isfinite(rot_rad);
  }
  bool operator==(const SimilarityTransform&) const = default;
};

inline SimilarityTransform to_metric(const Similarity2& s, double resolution_m) {
  return {s.scale, s.tx * resolution_m, s.ty * resolution_m, normalize_angle(s.rotation_rad)};
}

struct MatchReport {
  DetectorId detector;
  std::size_t keypoints_a = 0;
  std::size_t keypoints_b = 0;
  std::size_t total_matches = 0;  // after the ratio test
  std::size_t good_matches = 0;   // RANSAC inliers
  std::optional<SimilarityTransform> transform;

  /// Good matches as a percentage of ratio-test survivors.
  double good_percent() const {
    return total_matches ? 100.0 * static_cast<double>(good_matches) / static_cast<double>(total_matches) : 0.0;
  }
};

struct MatcherConfig {
  double ratio = 0.75;
  RansacConfig ransac;  // inlier threshold in pixels
  std::uint64_t seed = 1;
  double resolution_m = 0.005;
};

/// knn -> ratio test -> RANSAC for one detector's feature sets. Sets too
/// small to match yield an empty report rather than an error.
inline MatchReport match_feature_sets(const FeatureSet& a, const FeatureSet& b, const MatcherConfig& cfg = {}) {
  if (!(a.detector == b.detector))
    throw Error("match_feature_sets: detector mismatch (" + detector_name(a.detector) + " vs " +
                detector_name(b.detector) + ")");
  MatchReport rep;
  rep.detector = a.detector;
  rep.keypoints_a = a.keypoints.size();
  rep.keypoints_b = b.keypoints.size();
  if (a.descriptors.empty() || b.descriptors.size() < 2) return rep;
  const auto good = ratio_test(knn_match(a, b), cfg.ratio);
  rep.total_matches = good.size();
  if (good.size() < 2) return rep;
  std::vector<Correspondence> cs;
  cs.reserve(good.size());
  for (const auto& m : good) {
    const auto& ka = a.keypoints[m.index_a];
    const auto& kb = b.keypoints[m.index_b];
    cs.push_back({{ka.x, ka.y}, {kb.x, kb.y}});
  }
  const auto r = estimate_similarity_ransac(cs, cfg.seed, cfg.ransac);
  if (r.model) {
    rep.good_matches = r.inlier_count;
    rep.transform = to_metric(*r.model, cfg.resolution_m);
  }
  return rep;
}

/// Full per-detector pipeline on two 8-bit regions.
inline std::vector<MatchReport> match_regions(const Gray8& img_a, const Gray8& img_b,
                                              std::span<const FeatureDetector* const> detectors,
                                              const MatcherConfig& cfg = {}) {
  std::vector<MatchReport> out;
  for (const auto* d : detectors) {
    const auto fa = d->detect_and_describe(img_a);
    const auto fb = d->detect_and_describe(img_b);
    out.push_back(match_feature_sets(fa, fb, cfg));
  }
  return out;
}

inline std::vector<MatchReport> match_regions(const Gray8& img_a, const Gray8& img_b,
                                              std::span<const DetectorConfig> detectors,
                                              const MatcherConfig& cfg = {}) {
  std::vector<std::unique_ptr<FeatureDetector>> owned;
  std::vector<const FeatureDetector*> ptrs;
  for (const auto& c : detectors) {
    owned.push_back(make_detector(c));
    ptrs.push_back(owned.back().get());
  }
  return match_regions(img_a, img_b, ptrs, cfg);
}

// ---------------------------------------------------------------------------
// Loop validation

struct LoopThresholds {
  std::size_t min_good_matches = 20;
  double scale_tolerance = 0.05;
  double translation_tolerance_m = 0.100;
  double rotation_tolerance_rad = deg2rad(2.0);
};

struct LoopDecision {
  bool accepted = false;
  std::optional<SimilarityTransform> fused_transform;
  std::vector<MatchReport> reports;
  std::vector<std::string> reasons;  // each starts with its criterion name
};

/// Count-weighted mean of two transforms; rotation is averaged on the circle.
inline SimilarityTransform fuse_transform(const SimilarityTransform& ta, std::size_t na, const SimilarityTransform& tb,
                                          std::size_t nb) {
  if (na + nb == 0) throw Error("fuse_transform: both weights are zero");
  if (nb == 0) return ta;
  if (na == 0) return tb;
  const double wa = static_cast<double>(na), wb = static_cast<double>(nb), w = wa + wb;
  SimilarityTransform t;
  t.scale = (wa * ta.scale + wb * tb.scale) / w;
  t.tx_m = (wa * ta.tx_m + wb * tb.tx_m) / w;
  t.ty_m = (wa * ta.ty_m + wb * tb.ty_m) / w;
  t.rot_rad = std::atan2(wa * std::sin(ta.rot_rad) + wb * std::sin(tb.rot_rad),
                         wa * std::cos(ta.rot_rad) + wb * std::cos(tb.rot_rad));
  return t;
}

namespace detail {

inline std::string fmt(double v, int prec = 4) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

}  // namespace detail

/// Accepts a loop when both detectors have enough good matches, both scales
/// are near 1, and the two transforms agree. Every failed criterion is
/// listed. On acceptance the transforms are fused by match count and a
/// fused scale within tolerance is snapped to 1.
inline LoopDecision validate_loop(const MatchReport& ra, const MatchReport& rb, const LoopThresholds& thr = {}) {
  if (ra.detector == rb.detector)
    throw Error("validate_loop: both reports come from detector " + detector_name(ra.detector));
  LoopDecision dec;
  dec.reports = {ra, rb};
  for (const auto* r : {&ra, &rb})
    if (r->good_matches < thr.min_good_matches)
      dec.reasons.push_back("match_count: " + detector_name(r->detector) + " has " + std::to_string(r->good_matches) +
                            " good matches < " + std::to_string(thr.min_good_matches));
  for (const auto* r : {&ra, &rb}) {
    if (!r->transform) {
      dec.reasons.push_back("no_transform: " + detector_name(r->detector) + " produced no transform");
    } else if (!r->transform->valid() || std::abs(r->transform->scale - 1.0) > thr.scale_tolerance) {
      dec.reasons.push_back("scale: " + detector_name(r->detector) + " scale " + detail::fmt(r->transform->scale) +
                            " outside 1 +/- " + detail::fmt(thr.scale_tolerance));
    }
  }
  if (ra.transform && rb.transform) {
    const auto& a = *ra.transform;
    const auto& b = *rb.transform;
    const double dtx = std::abs(a.tx_m - b.tx_m), dty = std::abs(a.ty_m - b.ty_m);
    if (!(dtx <= thr.translation_tolerance_m && dty <= thr.translation_tolerance_m))
      dec.reasons.push_back("translation: detectors disagree by (" + detail::fmt(dtx * 1e3) + ", " +
                            detail::fmt(dty * 1e3) + ") mm");
    const double drot = std::abs(normalize_angle(a.rot_rad - b.rot_rad));
    if (!(drot <= thr.rotation_tolerance_rad))
      dec.reasons.push_back("rotation: detectors disagree by " + detail::fmt(rad2deg(drot)) + " deg");
  }
  dec.accepted = dec.reasons.empty();
  if (dec.accepted) {
    auto t = fuse_transform(*ra.transform, ra.good_matches, *rb.transform, rb.good_matches);
    if (std::abs(t.scale - 1.0) <= thr.scale_tolerance) t.scale = 1.0;
    dec.fused_transform = t;
  }
  return dec;
}

// ---------------------------------------------------------------------------
// Tab-separated report records

inline constexpr const char* kReportHeader =
    "#detector\tkeypoints_a\tkeypoints_b\ttotal_matches\tgood_matches\tgood_pct\tscale\ttx_mm\tty_mm\trot_deg\tdecision\t"
    "reasons";

inline std::string format_report(const MatchReport& r, const std::string& decision = "-",
                                 const std::string& reasons = "-") {
  std::ostringstream os;
  os << detector_name(r.detector) << '\t' << r.keypoints_a << '\t' << r.keypoints_b << '\t' << r.total_matches << '\t'
     << r.good_matches << '\t' << detail::format_double(r.good_percent()) << '\t';
  if (r.transform) {
    const auto& t = *r.transform;
    os << detail::format_double(t.scale) << '\t' << detail::format_double(t.tx_m * 1e3) << '\t'
       << detail::format_double(t.ty_m * 1e3) << '\t' << detail::format_double(rad2deg(t.rot_rad));
  } else {
    os << "-\t-\t-\t-";
  }
  os << '\t' << decision << '\t' << reasons;
  return os.str();
}

inline MatchReport parse_report(const std::string& line) {
  std::vector<std::string> f;
  std::string cur;
  for (char c : line) {
    if (c == '\t') {
      f.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  f.push_back(cur);
  if (f.size() != 12) throw Error("parse_report: expected 12 tab-separated columns, got " + std::to_string(f.size()));
  MatchReport r;
  try {
    r.detector = parse_detector_id(f[0]);
    r.keypoints_a = std::stoul(f[1]);
    r.keypoints_b = std::stoul(f[2]);
    r.total_matches = std::stoul(f[3]);
    r.good_matches = std::stoul(f[4]);
    if (f[6] != "-") {
      SimilarityTransform t;
      t.scale = std::stod(f[6]);
      t.tx_m = std::stod(f[7]) / 1e3;
      t.ty_m = std::stod(f[8]) / 1e3;
      t.rot_rad = deg2rad(std::stod(f[9]));
      r.transform = t;
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    throw Error("parse_report: malformed record: " + line);
  }
  return r;
}

inline std::string join_reasons(const std::vector<std::string>& reasons) {
  if (reasons.empty()) return "-";
  std::string s;
  for (std::size_t i = 0; i < reasons.size(); ++i) {
    if (i) s += "; ";
    s += reasons[i];
  }
  return s;
}

}  // namespace uwbsar

#pragma once

// Turns the complex SAR accumulator into a feature-ready 8-bit image and
// scores reconstructed occupancy against ground truth.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "uwbsar/backprojection.hpp"
#include "uwbsar/core.hpp"

namespace uwbsar {

/// Real-valued raster, row-major.
struct GrayImage {
  std::size_t width_px = 0;
  std::size_t height_px = 0;
  double resolution_m = 0.005;
  std::vector<double> pixels;

  GrayImage() = default;
  GrayImage(std::size_t w, std::size_t h, double res = 0.005) : width_px(w), height_px(h), resolution_m(res), pixels(w * h, 0.0) {}

  double& at(std::size_t c, std::size_t r) { return pixels[r * width_px + c]; }
  double at(std::size_t c, std::size_t r) const { return pixels[r * width_px + c]; }
};

/// 8-bit raster, row-major. Feature detectors consume this.
struct Gray8 {
  std::size_t width_px = 0;
  std::size_t height_px = 0;
  double resolution_m = 0.005;
  std::vector<std::uint8_t> pixels;

  Gray8() = default;
  Gray8(std::size_t w, std::size_t h, double res = 0.005) : width_px(w), height_px(h), resolution_m(res), pixels(w * h, 0) {}

  std::uint8_t& at(std::size_t c, std::size_t r) { return pixels[r * width_px + c]; }
  std::uint8_t at(std::size_t c, std::size_t r) const { return pixels[r * width_px + c]; }
  bool operator==(const Gray8&) const = default;
};

/// Re(p) + |p| per pixel: negative lobes vanish, positive ones double.
inline GrayImage positive_image(const SarImage& sar) {
  GrayImage out(sar.grid.width_px, sar.grid.height_px, sar.grid.resolution_m);
  for (std::size_t i = 0; i < sar.pixels.size(); ++i) {
    const auto p = sar.pixels[i];
    if (!std::isfinite(p.real()) || !std::isfinite(p.imag())) throw Error("positive_image: non-finite pixel");
    out.pixels[i] = std::max(0.0, p.real() + std::abs(p));
  }
  return out;
}

/// Normalized sampled Gaussian, radius ceil(3 sigma).
inline std::vector<double> gaussian_kernel(double sigma_px) {
  if (!(sigma_px > 0.0)) return {1.0};
  const auto radius = static_cast<long>(std::ceil(3.0 * sigma_px));
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (long i = -radius; i <= radius; ++i) {
    const double v = std::exp(-0.5 * static_cast<double>(i * i) / (sigma_px * sigma_px));
    k[static_cast<std::size_t>(i + radius)] = v;
    sum += v;
  }
  for (auto& v : k) v /= sum;
  return k;
}

namespace detail {

/// Edge-duplicating reflection (fedcba|abcdef), folded until in range.
inline std::size_t reflect_index(long i, long n) {
  if (n == 1) return 0;
  const long period = 2 * n;
  i %= period;
  if (i < 0) i += period;
  return static_cast<std::size_t>(i < n ? i : period - 1 - i);
}

}  // namespace detail

/// Separable Gaussian blur with reflected borders. Total mass is preserved
/// because the reflection folds every out-of-range tap back onto the image.
inline GrayImage gaussian_blur(const GrayImage& img, double sigma_px) {
  if (!(sigma_px >= 0.0) || !std::isfinite(sigma_px)) throw Error("gaussian_blur: sigma must be >= 0");
  if (sigma_px == 0.0 || img.pixels.empty()) return img;
  const auto k = gaussian_kernel(sigma_px);
  const long radius = static_cast<long>(k.size() / 2);
  const auto w = static_cast<long>(img.width_px), h = static_cast<long>(img.height_px);

  GrayImage tmp(img.width_px, img.height_px, img.resolution_m);
  for (long r = 0; r < h; ++r) {
    const double* row = &img.pixels[static_cast<std::size_t>(r * w)];
    for (long c = 0; c < w; ++c) {
      double acc = 0.0;
      for (long t = -radius; t <= radius; ++t)
        acc += k[static_cast<std::size_t>(t + radius)] * row[detail::reflect_index(c + t, w)];
      tmp.pixels[static_cast<std::size_t>(r * w + c)] = acc;
    }
  }
  GrayImage out(img.width_px, img.height_px, img.resolution_m);
  for (long r = 0; r < h; ++r) {
    for (long c = 0; c < w; ++c) {
      double acc = 0.0;
      for (long t = -radius; t <= radius; ++t)
        acc += k[static_cast<std::size_t>(t + radius)] *
               tmp.pixels[detail::reflect_index(r + t, h) * static_cast<std::size_t>(w) + static_cast<std::size_t>(c)];
      out.pixels[static_cast<std::size_t>(r * w + c)] = acc;
    }
  }
  return out;
}

/// Affine min->0, max->255 with round-half-up. Constant images map to 0.
inline Gray8 quantize(const GrayImage& img) {
  Gray8 out(img.width_px, img.height_px, img.resolution_m);
  if (img.pixels.empty()) return out;
  const auto [mn, mx] = std::minmax_element(img.pixels.begin(), img.pixels.end());
  const double lo = *mn, hi = *mx;
  if (!(hi > lo)) return out;
  const double scale = 255.0 / (hi - lo);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    const double q = std::floor((img.pixels[i] - lo) * scale + 0.5);
    out.pixels[i] = static_cast<std::uint8_t>(std::clamp(q, 0.0, 255.0));
  }
  return out;
}

/// Otsu's threshold on the 8-bit histogram: levels <= t form the background.
inline int otsu_threshold(const Gray8& img) {
  std::array<double, 256> hist{};
  for (auto p : img.pixels) hist[p] += 1.0;
  const double total = static_cast<double>(img.pixels.size());
  if (total == 0.0) return 0;
  double sum_all = 0.0;
  for (int i = 0; i < 256; ++i) sum_all += i * hist[static_cast<std::size_t>(i)];
  double w0 = 0.0, sum0 = 0.0, best = -1.0;
  int best_t = 0;
  for (int t = 0; t < 255; ++t) {
    w0 += hist[static_cast<std::size_t>(t)];
    sum0 += t * hist[static_cast<std::size_t>(t)];
    const double w1 = total - w0;
    if (w0 == 0.0 || w1 == 0.0) continue;
    const double m0 = sum0 / w0, m1 = (sum_all - sum0) / w1;
    const double between = w0 * w1 * (m0 - m1) * (m0 - m1);
    if (between > best) {
      best = between;
      best_t = t;
    }
  }
  return best_t;
}

/// Occupied where the level exceeds `level`.
inline BinaryGrid threshold_occupancy(const Gray8& img, int level) {
  BinaryGrid g(img.width_px, img.height_px);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) g.cells[i] = img.pixels[i] > level ? 1 : 0;
  return g;
}

/// Fraction of cells on which two occupancy grids disagree.
inline double cellwise_difference(const BinaryGrid& predicted, const BinaryGrid& truth) {
  if (predicted.width != truth.width || predicted.height != truth.height)
    throw Error("cellwise_difference: size mismatch");
  if (predicted.cells.empty()) return 0.0;
  std::size_t diff = 0;
  for (std::size_t i = 0; i < predicted.cells.size(); ++i)
    diff += ((predicted.cells[i] != 0) != (truth.cells[i] != 0));
  return static_cast<double>(diff) / static_cast<double>(predicted.cells.size());
}

struct PostParams {
  double blur_sigma_px = 1.0;
};

/// positive image -> blur -> 8-bit.
inline Gray8 enhance(const SarImage& sar, const PostParams& params = {}) {
  return quantize(gaussian_blur(positive_image(sar), params.blur_sigma_px));
}

template <typename Image>
Image crop(const Image& img, std::size_t col, std::size_t row, std::size_t w, std::size_t h) {
  if (col + w > img.width_px || row + h > img.height_px || w == 0 || h == 0)
    throw Error("crop: region outside image");
  Image out(w, h, img.resolution_m);
  for (std::size_t r = 0; r < h; ++r)
    for (std::size_t c = 0; c < w; ++c) out.at(c, r) = img.at(col + c, row + r);
  return out;
}

inline BinaryGrid crop(const BinaryGrid& g, std::size_t col, std::size_t row, std::size_t w, std::size_t h) {
  if (col + w > g.width || row + h > g.height) throw Error("crop: region outside grid");
  BinaryGrid out(w, h);
  for (std::size_t r = 0; r < h; ++r)
    for (std::size_t c = 0; c < w; ++c) out.set(c, r, g.at(col + c, row + r));
  return out;
}

}  // namespace uwbsar

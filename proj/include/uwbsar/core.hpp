#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace uwbsar {

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s
inline constexpr double kPi = std::numbers::pi;

/// Raised for invalid input, malformed files and violated preconditions.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Wraps an angle into (-pi, pi].
inline double normalize_angle(double a) {
  if (!std::isfinite(a)) throw Error("normalize_angle: non-finite angle");
  a = std::remainder(a, 2.0 * kPi);  // [-pi, pi]
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

/// Planar pose of a radar phase center (or the robot) in the image frame.
struct Pose2 {
  double x_m = 0.0;
  double y_m = 0.0;
  double theta_rad = 0.0;

  Pose2() = default;
  Pose2(double x, double y, double theta) : x_m(x), y_m(y), theta_rad(theta) {
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(theta))
      throw Error("Pose2: non-finite component");
    theta_rad = normalize_angle(theta);
  }

  Point2 position() const { return {x_m, y_m}; }
  bool operator==(const Pose2&) const = default;
};

/// Row-major binary raster: FOV masks, occupancy grids.
struct BinaryGrid {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> cells;

  BinaryGrid() = default;
  BinaryGrid(std::size_t w, std::size_t h) : width(w), height(h), cells(w * h, 0) {}

  bool at(std::size_t col, std::size_t row) const { return cells[row * width + col] != 0; }
  void set(std::size_t col, std::size_t row, bool v = true) {
    cells[row * width + col] = v ? 1 : 0;
  }
  std::size_t count() const {
    std::size_t n = 0;
    for (auto c : cells) n += (c != 0);
    return n;
  }
  bool operator==(const BinaryGrid&) const = default;
};

}  // namespace uwbsar

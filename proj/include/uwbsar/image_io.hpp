#pragma once

// Binary PGM (P5, maxval 255) and the float dump: an ASCII header line
// `width height resolution_m` followed by little-endian float32 pixels,
// row-major.

#include <bit>
#include <cctype>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>

#include "uwbsar/core.hpp"
#include "uwbsar/image_post.hpp"

namespace uwbsar {

namespace detail {

inline void put_u32le(std::ostream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                     static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(b, 4);
}

inline bool get_u32le(std::istream& in, std::uint32_t& v) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) return false;
  v = static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
      (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
  return true;
}

inline void put_f32le(std::ostream& out, float f) { put_u32le(out, std::bit_cast<std::uint32_t>(f)); }

inline bool get_f32le(std::istream& in, float& f) {
  std::uint32_t u;
  if (!get_u32le(in, u)) return false;
  f = std::bit_cast<float>(u);
  return true;
}

inline void put_f64le(std::ostream& out, double d) {
  const auto u = std::bit_cast<std::uint64_t>(d);
  put_u32le(out, static_cast<std::uint32_t>(u & 0xffffffffu));
  put_u32le(out, static_cast<std::uint32_t>(u >> 32));
}

inline bool get_f64le(std::istream& in, double& d) {
  std::uint32_t lo, hi;
  if (!get_u32le(in, lo) || !get_u32le(in, hi)) return false;
  d = std::bit_cast<double>(static_cast<std::uint64_t>(lo) | (static_cast<std::uint64_t>(hi) << 32));
  return true;
}

/// Shortest text that parses back to the same double.
inline std::string format_double(double v) {
  std::ostringstream os;
  os.precision(std::numeric_limits<double>::max_digits10);
  os << v;
  return os.str();
}

inline std::ofstream open_binary_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  return out;
}

inline std::ifstream open_binary_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return in;
}

}  // namespace detail

inline void write_pgm(std::ostream& out, const Gray8& img) {
  out << "P5\n" << img.width_px << ' ' << img.height_px << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
  if (!out) throw Error("write_pgm: write failed");
}

inline Gray8 read_pgm(std::istream& in, double resolution_m = 0.005) {
  auto token = [&in]() {
    std::string t;
    char c;
    while (in.get(c)) {
      if (c == '#') {
        std::string skip;
        std::getline(in, skip);
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        if (!t.empty()) break;
        continue;
      }
      t.push_back(c);
    }
    return t;
  };
  if (token() != "P5") throw Error("read_pgm: not a binary PGM (P5)");
  std::size_t w = 0, h = 0;
  int maxval = 0;
  try {
    w = std::stoul(token());
    h = std::stoul(token());
    maxval = std::stoi(token());
  } catch (const std::exception&) {
    throw Error("read_pgm: malformed header");
  }
  if (maxval != 255) throw Error("read_pgm: only maxval 255 is supported");
  if (w == 0 || h == 0) throw Error("read_pgm: empty image");
  Gray8 img(w, h, resolution_m);
  if (!in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size())))
    throw Error("read_pgm: truncated pixel data");
  return img;
}

inline void write_pgm(const std::string& path, const Gray8& img) {
  auto out = detail::open_binary_out(path);
  write_pgm(out, img);
}

inline Gray8 read_pgm(const std::string& path, double resolution_m = 0.005) {
  auto in = detail::open_binary_in(path);
  return read_pgm(in, resolution_m);
}

inline void write_float_dump(std::ostream& out, const GrayImage& img) {
  out << img.width_px << ' ' << img.height_px << ' ' << detail::format_double(img.resolution_m) << '\n';
  for (double v : img.pixels) detail::put_f32le(out, static_cast<float>(v));
  if (!out) throw Error("write_float_dump: write failed");
}

inline GrayImage read_float_dump(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw Error("read_float_dump: missing header");
  std::istringstream hs(header);
  std::size_t w = 0, h = 0;
  double res = 0.0;
  if (!(hs >> w >> h >> res) || w == 0 || h == 0 || !(res > 0.0)) throw Error("read_float_dump: malformed header");
  GrayImage img(w, h, res);
  for (auto& v : img.pixels) {
    float f;
    if (!detail::get_f32le(in, f)) throw Error("read_float_dump: truncated pixel data");
    v = f;
  }
  return img;
}

inline void write_float_dump(const std::string& path, const GrayImage& img) {
  auto out = detail::open_binary_out(path);
  write_float_dump(out, img);
}

inline GrayImage read_float_dump(const std::string& path) {
  auto in = detail::open_binary_in(path);
  return read_float_dump(in);
}

/// Splits a SAR image into real and imaginary float dumps.
inline std::pair<GrayImage, GrayImage> split_complex(const SarImage& sar) {
  GrayImage re(sar.grid.width_px, sar.grid.height_px, sar.grid.resolution_m), im = re;
  for (std::size_t i = 0; i < sar.pixels.size(); ++i) {
    re.pixels[i] = sar.pixels[i].real();
    im.pixels[i] = sar.pixels[i].imag();
  }
  return {std::move(re), std::move(im)};
}

inline SarImage join_complex(const GrayImage& re, const GrayImage& im) {
  if (re.width_px != im.width_px || re.height_px != im.height_px) throw Error("join_complex: size mismatch");
  ImageGrid g;
  g.width_px = re.width_px;
  g.height_px = re.height_px;
  g.resolution_m = re.resolution_m;
  SarImage sar(g);
  for (std::size_t i = 0; i < sar.pixels.size(); ++i) sar.pixels[i] = {re.pixels[i], im.pixels[i]};
  return sar;
}

}  // namespace uwbsar

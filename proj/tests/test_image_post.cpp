#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "support/harness.hpp"

using namespace uwbsar;

namespace {

SarImage sar_of(std::initializer_list<std::complex<double>> px) {
  ImageGrid g;
  g.width_px = px.size();
  g.height_px = 1;
  SarImage s(g);
  std::copy(px.begin(), px.end(), s.pixels.begin());
  return s;
}

GrayImage random_gray(std::size_t w, std::size_t h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  GrayImage g(w, h);
  for (auto& v : g.pixels) v = u(rng);
  return g;
}

}  // namespace

TEST(PositiveImage, Examples) {
  const GrayImage g = positive_image(sar_of({{-0.5, 0.0}, {0.7, 0.0}, {3.0, 4.0}}));
  EXPECT_EQ(g.pixels[0], 0.0);
  EXPECT_DOUBLE_EQ(g.pixels[1], 1.4);
  EXPECT_DOUBLE_EQ(g.pixels[2], 8.0);
}

TEST(PositiveImage, NonNegativeAndDoublesRealNonNegativePixels) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd;
  ImageGrid grid;
  grid.width_px = 50;
  grid.height_px = 20;
  SarImage s(grid);
  for (std::size_t i = 0; i < s.pixels.size(); ++i)
    s.pixels[i] = i % 3 == 0 ? std::complex<double>(std::abs(nd(rng)), 0.0) : std::complex<double>(nd(rng), nd(rng));
  const GrayImage g = positive_image(s);
  EXPECT_EQ(g.width_px, 50u);
  EXPECT_EQ(g.height_px, 20u);
  for (std::size_t i = 0; i < g.pixels.size(); ++i) {
    EXPECT_GE(g.pixels[i], 0.0);
    if (i % 3 == 0) { EXPECT_EQ(g.pixels[i], 2.0 * s.pixels[i].real()); }
  }
}

TEST(PositiveImage, RejectsNonFinitePixels) {
  EXPECT_THROW(positive_image(sar_of({{NAN, 0.0}})), Error);
}

TEST(GaussianBlur, ZeroSigmaIsIdentity) {
  const GrayImage g = random_gray(17, 9, 1);
  EXPECT_EQ(gaussian_blur(g, 0.0).pixels, g.pixels);
}

TEST(GaussianBlur, ConstantImageUnchanged) {
  GrayImage g(20, 13);
  for (auto& v : g.pixels) v = 3.25;
  for (double v : gaussian_blur(g, 1.7).pixels) EXPECT_NEAR(v, 3.25, 1e-12);
}

TEST(GaussianBlur, ImpulseCenterMatchesContinuousPeak) {
  GrayImage g(21, 21);
  g.at(10, 10) = 1.0;
  const GrayImage b = gaussian_blur(g, 1.0);
  // Oracle: product of the two normalized 1-D taps at offset 0.
  double sum = 0;
  for (int i = -3; i <= 3; ++i) sum += std::exp(-0.5 * i * i);
  EXPECT_NEAR(b.at(10, 10), 1.0 / (sum * sum), 1e-12);
  EXPECT_NEAR(b.at(10, 10), 1.0 / (2 * kPi), 0.02 / (2 * kPi));
}

TEST(GaussianBlur, KernelHasRadiusThreeSigma) {
  EXPECT_EQ(gaussian_kernel(1.0).size(), 7u);
  EXPECT_EQ(gaussian_kernel(1.5).size(), 11u);
  double s = 0;
  for (double v : gaussian_kernel(2.3)) s += v;
  EXPECT_NEAR(s, 1.0, 1e-15);
}

TEST(GaussianBlur, PreservesMass) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const GrayImage g = random_gray(31, 23, seed);
    const GrayImage b = gaussian_blur(g, 0.5 + static_cast<double>(seed));
    double s0 = 0, s1 = 0;
    for (double v : g.pixels) s0 += v;
    for (double v : b.pixels) s1 += v;
    EXPECT_NEAR(s1, s0, 1e-6 * s0);
  }
}

TEST(GaussianBlur, ReflectsAtEdges) {
  EXPECT_EQ(detail::reflect_index(-1, 5), 0u);
  EXPECT_EQ(detail::reflect_index(-2, 5), 1u);
  EXPECT_EQ(detail::reflect_index(5, 5), 4u);
  EXPECT_EQ(detail::reflect_index(6, 5), 3u);
  EXPECT_EQ(detail::reflect_index(-7, 2), 1u);
}

TEST(GaussianBlur, NegativeSigmaThrows) { EXPECT_THROW(gaussian_blur(GrayImage(3, 3), -1.0), Error); }

TEST(Quantize, MapsRangeOntoEightBits) {
  GrayImage g(3, 1);
  g.pixels = {-2.0, 4.0, 1.0};
  const Gray8 q = quantize(g);
  EXPECT_EQ(q.pixels[0], 0);
  EXPECT_EQ(q.pixels[1], 255);
  EXPECT_EQ(q.pixels[2], 128);
}

TEST(Quantize, ConstantImageIsAllZero) {
  GrayImage g(4, 4);
  for (auto& v : g.pixels) v = 7.0;
  for (auto v : quantize(g).pixels) EXPECT_EQ(v, 0);
}

TEST(Quantize, Monotone) {
  const GrayImage g = random_gray(64, 64, 3);
  const Gray8 q = quantize(g);
  std::vector<std::size_t> idx(g.pixels.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return g.pixels[a] < g.pixels[b]; });
  for (std::size_t i = 1; i < idx.size(); ++i) EXPECT_LE(q.pixels[idx[i - 1]], q.pixels[idx[i]]);
}

TEST(Otsu, SeparatesBimodalHistogram) {
  Gray8 img(100, 1);
  for (std::size_t i = 0; i < 100; ++i) img.pixels[i] = i < 70 ? 20 + (i % 5) : 200 + (i % 7);
  const int t = otsu_threshold(img);
  EXPECT_GE(t, 24);
  EXPECT_LT(t, 200);
  const BinaryGrid occ = threshold_occupancy(img, t);
  EXPECT_EQ(occ.count(), 30u);
}

TEST(CellwiseDifference, IdenticalAndComplementary) {
  std::mt19937_64 rng(4);
  BinaryGrid a(30, 20), b(30, 20);
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    a.cells[i] = rng() & 1u;
    b.cells[i] = !a.cells[i];
  }
  EXPECT_EQ(cellwise_difference(a, a), 0.0);
  EXPECT_EQ(cellwise_difference(a, b), 1.0);
}

TEST(CellwiseDifference, SymmetricAndZeroOnlyWhenIdentical) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 20; ++t) {
    BinaryGrid a(16, 16), b(16, 16);
    for (std::size_t i = 0; i < a.cells.size(); ++i) {
      a.cells[i] = (rng() % 5) == 0;
      b.cells[i] = (rng() % 5) == 0;
    }
    EXPECT_EQ(cellwise_difference(a, b), cellwise_difference(b, a));
    EXPECT_EQ(cellwise_difference(a, b) == 0.0, a == b);
  }
}

TEST(CellwiseDifference, CountsDifferingCells) {
  // 1397 of 16800 cells differ.
  BinaryGrid a(168, 100), b(168, 100);
  for (std::size_t i = 0; i < 1397; ++i) a.cells[i * 12] = 1;
  EXPECT_NEAR(cellwise_difference(a, b), 1397.0 / 16800.0, 1e-15);
  EXPECT_NEAR(cellwise_difference(a, b), 0.0832, 1e-4);
}

TEST(CellwiseDifference, SizeMismatchThrows) {
  EXPECT_THROW(cellwise_difference(BinaryGrid(3, 3), BinaryGrid(3, 4)), Error);
}

TEST(Crop, ExtractsRegionAndChecksBounds) {
  Gray8 img(10, 8);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) img.pixels[i] = static_cast<std::uint8_t>(i);
  const Gray8 c = crop(img, 2, 3, 4, 2);
  EXPECT_EQ(c.width_px, 4u);
  EXPECT_EQ(c.at(0, 0), img.at(2, 3));
  EXPECT_EQ(c.at(3, 1), img.at(5, 4));
  EXPECT_THROW(crop(img, 8, 0, 4, 2), Error);
}

TEST(ImageIo, PgmRoundTrip) {
  Gray8 img(7, 5);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) img.pixels[i] = static_cast<std::uint8_t>(i * 7);
  std::stringstream ss;
  write_pgm(ss, img);
  EXPECT_EQ(ss.str().substr(0, 11), "P5\n7 5\n255\n");
  EXPECT_EQ(read_pgm(ss), img);
}

TEST(ImageIo, PgmRejectsOtherFormats) {
  std::stringstream p2("P2\n2 2\n255\n0 0 0 0\n");
  EXPECT_THROW(read_pgm(p2), Error);
  std::stringstream deep("P5\n2 2\n65535\n");
  EXPECT_THROW(read_pgm(deep), Error);
  std::stringstream shortdata("P5\n4 4\n255\nabc");
  EXPECT_THROW(read_pgm(shortdata), Error);
}

TEST(ImageIo, FloatDumpLayout) {
  GrayImage g(3, 2, 0.005);
  g.pixels = {0.0, 1.5, -2.0, 3.25, 1e-3, 7.0};
  std::stringstream ss;
  write_float_dump(ss, g);
  const std::string s = ss.str();
  const std::string header = "3 2 0.0050000000000000001\n";
  ASSERT_EQ(s.substr(0, header.size()), header);
  ASSERT_EQ(s.size(), header.size() + 6 * 4);
  // Little-endian float32 of 1.5 is 00 00 c0 3f.
  EXPECT_EQ(static_cast<unsigned char>(s[header.size() + 4 + 3]), 0x3f);
  EXPECT_EQ(static_cast<unsigned char>(s[header.size() + 4 + 2]), 0xc0);
  const GrayImage back = read_float_dump(ss);
  EXPECT_EQ(back.width_px, 3u);
  EXPECT_EQ(back.resolution_m, 0.005);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(back.pixels[i], static_cast<double>(static_cast<float>(g.pixels[i])));
}

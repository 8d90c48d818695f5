#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "test_support.hpp"
#include "vqdemark/image.hpp"

namespace vqdemark {
namespace {

using testing::file_bytes;
using testing::random_image;
using testing::scratch_dir;
using testing::write_bytes;

std::vector<std::uint8_t> bytes_of(const std::string& s) { return {s.begin(), s.end()}; }

TEST(LoadImage, SmallestLegalPgm) {
  const auto dir = scratch_dir("load_1x1");
  auto bytes = bytes_of("P5\n1 1\n255\n");
  bytes.push_back(0x00);
  write_bytes(dir / "a.pgm", bytes);
  const auto img = load_image(dir / "a.pgm");
  EXPECT_EQ(img, GrayImage(1, 1, std::vector<std::uint8_t>{0}));
}

TEST(LoadImage, TwoByTwoPayloadIsRowMajor) {
  const auto dir = scratch_dir("load_2x2");
  auto bytes = bytes_of("P5\n2 2\n255\n");
  for (std::uint8_t v : {10, 20, 30, 40}) bytes.push_back(v);
  ASSERT_EQ(bytes.size(), 15u);
  write_bytes(dir / "a.pgm", bytes);
  const auto img = load_image(dir / "a.pgm");
  ASSERT_EQ(img.width(), 2u);
  ASSERT_EQ(img.height(), 2u);
  EXPECT_EQ(img.at(0, 0), 10);
  EXPECT_EQ(img.at(1, 0), 20);
  EXPECT_EQ(img.at(0, 1), 30);
  EXPECT_EQ(img.at(1, 1), 40);
}

TEST(LoadImage, HeaderCommentsAndWhitespaceAccepted) {
  const auto dir = scratch_dir("load_comments");
  auto bytes = bytes_of("P5 # magic\n# a comment line\n  2\t\n1 # width height\n255\n");
  bytes.push_back(7);
  bytes.push_back(9);
  write_bytes(dir / "a.pgm", bytes);
  EXPECT_EQ(load_image(dir / "a.pgm"), GrayImage(2, 1, std::vector<std::uint8_t>{7, 9}));
}

TEST(LoadImage, ErrorPaths) {
  const auto dir = scratch_dir("load_errors");
  auto expect_code = [&](const std::vector<std::uint8_t>& bytes, ErrorCode code) {
    write_bytes(dir / "x.pgm", bytes);
    try {
      (void)load_image(dir / "x.pgm");
      ADD_FAILURE() << "expected " << to_string(code);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), code) << e.what();
    }
  };
  auto p6 = bytes_of("P6\n1 1\n255\n");
  p6.insert(p6.end(), {1, 2, 3});
  expect_code(p6, ErrorCode::MalformedFile);
  auto deep = bytes_of("P5\n1 1\n65535\n");
  deep.insert(deep.end(), {0, 0});
  expect_code(deep, ErrorCode::UnsupportedDepth);
  expect_code(bytes_of("P5\n2 2\n255\n\x01"), ErrorCode::MalformedFile);
  expect_code(bytes_of("P5\n0 2\n255\n"), ErrorCode::MalformedFile);
  expect_code(bytes_of("P5\nx 2\n255\n"), ErrorCode::MalformedFile);

  try {
    (void)load_image(dir / "does_not_exist.pgm");
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IoFailure);
  }
}

TEST(SaveImage, OnePixelPgmBytes) {
  const auto dir = scratch_dir("save_1px");
  save_image(GrayImage(1, 1, std::vector<std::uint8_t>{255}), dir / "a.pgm", ImageFormat::Pgm);
  auto expected = bytes_of("P5\n1 1\n255\n");
  expected.push_back(0xFF);
  EXPECT_EQ(file_bytes(dir / "a.pgm"), expected);
}

TEST(SaveImage, NonexistentDirectoryIsIoFailure) {
  try {
    save_image(GrayImage(1, 1), "/nonexistent_dir_for_vqdemark/a.pgm", ImageFormat::Pgm);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IoFailure);
  }
}

TEST(SaveImage, RoundTripBothFormats) {
  const auto dir = scratch_dir("roundtrip");
  for (std::uint32_t seed = 0; seed < 8; ++seed) {
    const auto img = random_image(64 + seed, 64 - seed, seed);
    save_image(img, dir / "r.pgm", ImageFormat::Pgm);
    save_image(img, dir / "r.png", ImageFormat::Png);
    EXPECT_EQ(load_image(dir / "r.pgm"), img);
    EXPECT_EQ(load_image(dir / "r.png"), img);
  }
}

TEST(SaveImage, PgmPayloadIsByteExactAfterReload) {
  const auto dir = scratch_dir("payload");
  const auto img = random_image(17, 5, 99);
  save_image(img, dir / "a.pgm");
  const auto first = file_bytes(dir / "a.pgm");
  save_image(load_image(dir / "a.pgm"), dir / "b.pgm");
  EXPECT_EQ(file_bytes(dir / "b.pgm"), first);
}

TEST(SaveImage, ExtensionSelectsFormat) {
  const auto dir = scratch_dir("ext");
  save_image(GrayImage(3, 2, 50), dir / "a.PNG");
  const auto bytes = file_bytes(dir / "a.PNG");
  ASSERT_GE(bytes.size(), 8u);
  EXPECT_EQ(bytes[1], 'P');
  EXPECT_EQ(bytes[2], 'N');
  EXPECT_EQ(load_image(dir / "a.PNG"), GrayImage(3, 2, 50));
}

TEST(HistogramEqualize, ConstantImageStaysConstant) {
  const auto out = histogram_equalize(GrayImage(9, 4, 77));
  EXPECT_EQ(out, GrayImage(9, 4, 0));
}

TEST(HistogramEqualize, TwoLevelImage) {
  const GrayImage img(4, 1, std::vector<std::uint8_t>{0, 0, 255, 255});
  EXPECT_EQ(histogram_equalize(img), img);
}

TEST(HistogramEqualize, UniformRampChangesAtMostOne) {
  GrayImage ramp(256, 256);
  for (std::size_t y = 0; y < 256; ++y) {
    for (std::size_t x = 0; x < 256; ++x) ramp.at(x, y) = static_cast<std::uint8_t>(x);
  }
  const auto out = histogram_equalize(ramp);
  int worst = 0;
  for (std::size_t i = 0; i < ramp.size(); ++i) worst = std::max(worst, std::abs(out.pixels()[i] - ramp.pixels()[i]));
  EXPECT_LE(worst, 1);
}

TEST(HistogramEqualize, LutIsMonotoneAndSpansRange) {
  for (std::uint32_t seed = 0; seed < 50; ++seed) {
    const auto img = random_image(20, 20, seed, static_cast<int>(seed), 200);
    const auto lut = equalization_lut(compute_histogram(img));
    EXPECT_TRUE(std::is_sorted(lut.begin(), lut.end()));
    const auto out = histogram_equalize(img);
    const auto [lo, hi] = std::minmax_element(out.pixels().begin(), out.pixels().end());
    EXPECT_EQ(*lo, 0);
    EXPECT_EQ(*hi, 255);
  }
}

double uniform_cdf_deviation(const GrayImage& img) {
  const auto h = compute_histogram(img);
  double cdf = 0.0;
  double worst = 0.0;
  for (std::size_t v = 0; v < 256; ++v) {
    cdf += static_cast<double>(h.counts[v]);
    worst = std::max(worst, std::abs(cdf / static_cast<double>(h.total) - static_cast<double>(v + 1) / 256.0));
  }
  return worst;
}

// Gaussian-shaped histograms of random location and spread. Histograms
// dominated by their lowest bin (constant images, say) are excluded: the
// anchored transform sends that bin to 0 and can move the CDF further
// from uniform.
TEST(HistogramEqualize, OutputCdfNoFurtherFromUniform) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::normal_distribution<double> nd(std::uniform_real_distribution<>(0, 255)(rng),
                                        std::uniform_real_distribution<>(1, 80)(rng));
    GrayImage img(32, 32);
    for (auto& v : img.pixels()) v = static_cast<std::uint8_t>(std::clamp(std::round(nd(rng)), 0.0, 255.0));
    EXPECT_LE(uniform_cdf_deviation(histogram_equalize(img)), uniform_cdf_deviation(img) + 1e-12);
  }
}

TEST(GrayImage, RejectsMismatchedBuffer) {
  EXPECT_THROW(GrayImage(2, 2, std::vector<std::uint8_t>(3)), Error);
}

}  // namespace
}  // namespace vqdemark

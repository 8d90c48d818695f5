#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"
#include "vqdemark/edges.hpp"

namespace vqdemark {
namespace {

CannyParams params(double sigma, double low, double high) {
  CannyParams p;
  p.sigma = sigma;
  p.low = low;
  p.high = high;
  return p;
}

TEST(Canny, ConstantImageHasNoEdges) {
  EXPECT_EQ(canny(GrayImage(32, 32, 128), CannyParams{}).count(), 0u);
}

TEST(Canny, VerticalStepGivesOnePixelLine) {
  const std::size_t w = 40;
  const std::size_t h = 30;
  const std::size_t step = 20;
  const auto em = canny(testing::step_image(w, h, step), params(1.0, 0.1, 0.3));
  std::size_t good_rows = 0;
  for (std::size_t y = 0; y < h; ++y) {
    std::vector<std::size_t> xs;
    for (std::size_t x = 0; x < w; ++x) {
      if (em.at(x, y)) xs.push_back(x);
    }
    // the step sits between columns step-1 and step
    if (xs.size() == 1 && xs[0] + 1 >= step - 1 && xs[0] <= step) ++good_rows;
  }
  EXPECT_EQ(good_rows, h);
}

TEST(Canny, HysteresisKeepsOnlyCandidates) {
  for (std::uint32_t seed = 0; seed < 10; ++seed) {
    const auto st = canny_stages(testing::brain_like_image(64, seed), CannyParams{});
    for (std::size_t i = 0; i < st.edges.mask.size(); ++i) {
      if (st.edges.mask[i]) EXPECT_TRUE(st.candidates.mask[i]);
    }
  }
}

TEST(Canny, CandidatesAreLocalMaximaAlongGradient) {
  for (std::uint32_t seed = 0; seed < 10; ++seed) {
    const auto img = testing::random_image(30, 25, seed);
    const auto st = canny_stages(img, params(1.0, 0.1, 0.3));
    const auto w = static_cast<std::ptrdiff_t>(img.width());
    const auto h = static_cast<std::ptrdiff_t>(img.height());
    for (std::ptrdiff_t y = 0; y < h; ++y) {
      for (std::ptrdiff_t x = 0; x < w; ++x) {
        const auto i = static_cast<std::size_t>(y * w + x);
        if (!st.candidates.mask[i]) continue;
        const auto [dx, dy] = canny_detail::step_of(static_cast<canny_detail::Sector>(st.sector[i]));
        for (int s : {-1, 1}) {
          const auto nx = x + s * dx;
          const auto ny = y + s * dy;
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          EXPECT_GE(st.magnitude.values[i], st.magnitude.at(static_cast<std::size_t>(nx), static_cast<std::size_t>(ny)));
        }
      }
    }
  }
}

TEST(Canny, RaisingHighNeverAddsEdges) {
  const auto img = testing::brain_like_image(80, 3);
  EdgeMap previous = canny(img, params(1.4, 0.1, 0.1));
  for (double high : {0.2, 0.3, 0.5, 0.7, 1.0}) {
    const auto em = canny(img, params(1.4, 0.1, high));
    for (std::size_t i = 0; i < em.mask.size(); ++i) {
      if (em.mask[i]) EXPECT_TRUE(previous.mask[i]) << "high " << high;
    }
    previous = em;
  }
}

TEST(Canny, SectorsFollowGradientAngle) {
  using namespace canny_detail;
  EXPECT_EQ(sector_of(1, 0), kHorizontal);
  EXPECT_EQ(sector_of(-1, 0), kHorizontal);
  EXPECT_EQ(sector_of(0, 1), kVertical);
  EXPECT_EQ(sector_of(0, -1), kVertical);
  EXPECT_EQ(sector_of(1, 1), kDiagonalDown);
  EXPECT_EQ(sector_of(1, -1), kDiagonalUp);
}

TEST(Canny, ErrorsAndValidation) {
  try {
    (void)canny(GrayImage(2, 2), CannyParams{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ImageSmallerThanKernel);
  }
  EXPECT_THROW((void)canny(GrayImage(5, 5), params(0.0, 0.1, 0.3)), Error);
  EXPECT_THROW((void)canny(GrayImage(5, 5), params(1.0, 0.4, 0.3)), Error);
  EXPECT_THROW((void)canny(GrayImage(5, 5), params(1.0, 0.1, 1.5)), Error);
}

TEST(Superimpose, EmptyMapIsIdentity) {
  const auto img = testing::random_image(12, 9, 1);
  EXPECT_EQ(superimpose(img, EdgeMap(12, 9)), img);
}

TEST(Superimpose, FullMapIsWhite) {
  EdgeMap em(7, 3);
  em.mask.assign(21, 1);
  EXPECT_EQ(superimpose(testing::random_image(7, 3, 2), em), GrayImage(7, 3, 255));
}

TEST(Superimpose, NonEdgePixelsUnchanged) {
  const auto img = testing::brain_like_image(64);
  const auto em = canny(img, CannyParams{});
  const auto out = superimpose(img, em);
  for (std::size_t i = 0; i < img.size(); ++i) {
    EXPECT_EQ(out.pixels()[i], em.mask[i] ? 255 : img.pixels()[i]);
  }
}

TEST(Superimpose, DimensionMismatch) {
  try {
    (void)superimpose(GrayImage(4, 4), EdgeMap(4, 5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(RenderEdges, WhiteOnBlack) {
  EdgeMap em(3, 1);
  em.mask = {0, 1, 0};
  EXPECT_EQ(render_edges(em), GrayImage(3, 1, std::vector<std::uint8_t>{0, 255, 0}));
}

}  // namespace
}  // namespace vqdemark

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "test_support.hpp"
#include "vqdemark/phantom.hpp"
#include "vqdemark/vq.hpp"

namespace vqdemark::vq {
namespace {

PointSet points_from(const std::vector<std::vector<double>>& rows) {
  PointSet s(rows.front().size());
  for (const auto& r : rows) s.push_back(r);
  return s;
}

std::vector<std::vector<double>> rows_of(const PointSet& s) {
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < s.size(); ++i) out.emplace_back(s[i].begin(), s[i].end());
  return out;
}

PointSet random_points(std::size_t n, std::size_t dim, std::uint32_t seed, double spread = 100.0) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0.0, spread);
  PointSet s(dim);
  std::vector<double> v(dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& x : v) x = std::round(u(rng));
    s.push_back(v);
  }
  return s;
}

SplitParams to_fixed_point() {
  SplitParams p;
  p.lloyd_tol = 0.0;
  p.max_lloyd_iters = 10000;
  return p;
}

TEST(ExtractTrainingVectors, OneBlockImage) {
  const auto img = testing::random_image(4, 3, 1);
  const auto ts = extract_training_vectors(img, 4, 3);
  ASSERT_EQ(ts.vectors.size(), 1u);
  ASSERT_EQ(ts.vectors.dim(), 12u);
  for (std::size_t i = 0; i < 12; ++i) EXPECT_EQ(ts.vectors[0][i], img.pixels()[i]);
}

TEST(ExtractTrainingVectors, TwelveDimensionalBlocks) {
  const auto ts = extract_training_vectors(testing::random_image(37, 29, 2), 4, 3);
  EXPECT_EQ(ts.geometry.dim(), 12u);
  EXPECT_EQ(ts.vectors.dim(), 12u);
  EXPECT_EQ(ts.vectors.size(), ts.geometry.grid_w * ts.geometry.grid_h);
  EXPECT_GE(ts.geometry.grid_w * 4, 37u);
  EXPECT_GE(ts.geometry.grid_h * 3, 29u);
}

TEST(ExtractTrainingVectors, PaddingReplicatesLastColumn) {
  const auto img = testing::random_image(5, 3, 3);
  const auto ts = extract_training_vectors(img, 4, 3);
  ASSERT_EQ(ts.vectors.size(), 2u);
  // padded column px of block 1 maps to image column min(4 + px, 4)
  for (std::size_t py = 0; py < 3; ++py) {
    for (std::size_t px = 0; px < 4; ++px) {
      const std::size_t src_x = std::min<std::size_t>(4 + px, 4);
      EXPECT_EQ(ts.vectors[1][py * 4 + px], img.at(src_x, py));
    }
  }
}

TEST(ExtractTrainingVectors, Errors) {
  EXPECT_THROW(extract_training_vectors(GrayImage(), 4, 3), Error);
  EXPECT_THROW(extract_training_vectors(GrayImage(4, 4), 0, 3), Error);
}

TEST(LbgGenerate, IdenticalVectorsCollapseToOne) {
  PointSet s(3);
  for (int i = 0; i < 10; ++i) s.push_back(std::vector<double>{5, 6, 7});
  const auto r = lbg_generate(s, 1, SplitParams{});
  ASSERT_EQ(r.codebook.size(), 1u);
  EXPECT_EQ(rows_of(r.codebook.codevectors)[0], (std::vector<double>{5, 6, 7}));
  EXPECT_EQ(r.codebook.distortion, 0.0);
}

// Hand check: each point sits 0.5 from its cluster mean on one axis, so the
// mean squared distance is 0.25 and the per-component distortion 0.125.
TEST(LbgGenerate, FourPointsTwoClustersMatchesExhaustiveOracle) {
  const std::vector<std::vector<double>> pts{{0, 0}, {0, 1}, {10, 10}, {10, 11}};
  const double oracle = oracle::best_two_partition_mse(pts);
  EXPECT_DOUBLE_EQ(oracle, 0.125);
  const auto r = lbg_generate(points_from(pts), 2, SplitParams{});
  EXPECT_NEAR(r.codebook.distortion, oracle, 1e-12);
  auto cb = rows_of(r.codebook.codevectors);
  std::sort(cb.begin(), cb.end());
  EXPECT_EQ(cb[0], (std::vector<double>{0, 0.5}));
  EXPECT_EQ(cb[1], (std::vector<double>{10, 10.5}));
}

TEST(LbgGenerate, Codebook128In12Dimensions) {
  PhantomSpec spec;
  const auto ts = extract_training_vectors(generate_phantom(spec), 4, 3);
  const auto r = lbg_generate(ts, 128, SplitParams{});
  EXPECT_EQ(r.codebook.size(), 128u);
  EXPECT_EQ(r.codebook.dim(), 12u);
}

TEST(LbgGenerate, VisitsEveryPowerOfTwo) {
  const auto r = lbg_generate(random_points(200, 3, 4), 32, SplitParams{});
  std::vector<std::size_t> sizes;
  for (const auto& l : r.levels) sizes.push_back(l.codebook_size);
  EXPECT_EQ(sizes, (std::vector<std::size_t>{1, 2, 4, 8, 16, 32}));
}

TEST(LbgGenerate, DistortionNeverIncreasesWithinALevel) {
  for (std::uint32_t seed = 0; seed < 10; ++seed) {
    const auto r = lbg_generate(random_points(300, 4, seed), 16, SplitParams{});
    for (const auto& level : r.levels) {
      for (std::size_t i = 1; i < level.distortions.size(); ++i) {
        EXPECT_LE(level.distortions[i], level.distortions[i - 1] * (1 + 1e-9)) << "seed " << seed;
      }
    }
  }
}

TEST(LbgGenerate, NearestAssignmentAndCentroidAtFixedPoint) {
  for (std::uint32_t seed = 0; seed < 10; ++seed) {
    const auto pts = random_points(150, 3, seed + 100);
    const auto r = lbg_generate(pts, 8, to_fixed_point());
    ASSERT_TRUE(r.levels.back().converged_to_fixed_point);
    const auto& cb = r.codebook.codevectors;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double mine = squared_distance(pts[i], cb[r.assignment.labels[i]]);
      for (std::size_t c = 0; c < cb.size(); ++c) {
        EXPECT_LE(mine, squared_distance(pts[i], cb[c]));
        if (squared_distance(pts[i], cb[c]) == mine) EXPECT_LE(r.assignment.labels[i], c);
      }
    }
    for (std::size_t c = 0; c < cb.size(); ++c) {
      if (r.assignment.counts[c] == 0) continue;
      std::vector<double> mean(3, 0.0);
      for (std::size_t i = 0; i < pts.size(); ++i) {
        if (r.assignment.labels[i] != c) continue;
        for (std::size_t k = 0; k < 3; ++k) mean[k] += pts[i][k];
      }
      for (std::size_t k = 0; k < 3; ++k) {
        EXPECT_NEAR(cb[c][k], mean[k] / static_cast<double>(r.assignment.counts[c]), 1e-9);
      }
    }
  }
}

TEST(LbgGenerate, MatchesBruteForceLloydOracle) {
  for (std::uint32_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 8 + seed * 3;
    const std::size_t dim = 1 + seed % 3;
    const auto pts = random_points(n, dim, seed + 500);
    const auto mine = lbg_generate(pts, 2, to_fixed_point());
    const auto ref = oracle::lbg_fixed_point(rows_of(pts), 2, 1.0);
    EXPECT_NEAR(mine.codebook.distortion, ref.distortion, 1e-9 * std::max(1.0, ref.distortion));
    EXPECT_EQ(mine.assignment.labels, ref.labels);
  }
}

TEST(LbgGenerate, EmptyClusterIsRepairedAndCodebookStaysFull) {
  // two distinct values but eight requested codevectors
  PointSet s(1);
  for (int i = 0; i < 5; ++i) s.push_back(std::vector<double>{0});
  for (int i = 0; i < 5; ++i) s.push_back(std::vector<double>{50});
  const auto r = lbg_generate(s, 8, SplitParams{});
  EXPECT_EQ(r.codebook.size(), 8u);
  EXPECT_EQ(r.codebook.distortion, 0.0);
  for (double v : r.codebook.codevectors.flat()) EXPECT_TRUE(std::isfinite(v));
}

TEST(LbgGenerate, Errors) {
  const auto pts = random_points(10, 2, 1);
  try {
    (void)lbg_generate(pts, 3, SplitParams{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidTargetSize);
  }
  try {
    (void)lbg_generate(PointSet(2), 2, SplitParams{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyTrainingSet);
  }
  SplitParams bad;
  bad.epsilon = 0.0;
  EXPECT_THROW((void)lbg_generate(pts, 2, bad), Error);
}

TEST(LbgGenerate, DeterministicAcrossThreadCounts) {
  const auto ts = extract_training_vectors(generate_phantom(PhantomSpec{}), 4, 3);
  setenv("VQDEMARK_THREADS", "1", 1);
  const auto a = lbg_generate(ts, 64, SplitParams{});
  setenv("VQDEMARK_THREADS", "8", 1);
  const auto b = lbg_generate(ts, 64, SplitParams{});
  unsetenv("VQDEMARK_THREADS");
  EXPECT_EQ(a.codebook.codevectors, b.codebook.codevectors);
  EXPECT_EQ(a.assignment.labels, b.assignment.labels);
  EXPECT_EQ(a.codebook.distortion, b.codebook.distortion);
}

TEST(Assign, SingleCodevectorLabelsEverythingZero) {
  const auto pts = random_points(30, 4, 9);
  PointSet cb(4);
  cb.push_back(std::vector<double>{1, 2, 3, 4});
  const auto a = assign(pts, cb);
  EXPECT_TRUE(std::all_of(a.labels.begin(), a.labels.end(), [](auto l) { return l == 0; }));
  EXPECT_EQ(a.counts, (std::vector<std::size_t>{30}));
}

TEST(Assign, TieGoesToLowestIndex) {
  PointSet cb(1);
  for (double v : {100.0, 90.0, -1.0, 50.0, 80.0, 1.0}) cb.push_back(std::vector<double>{v});
  PointSet pts(1);
  pts.push_back(std::vector<double>{0.0});  // equidistant from entries 2 and 5
  EXPECT_EQ(assign(pts, cb).labels[0], 2u);
}

TEST(Assign, MatchesDistanceTable) {
  const auto pts = random_points(100, 5, 21);
  const auto cb = random_points(8, 5, 22);
  const auto a = assign(pts, cb);
  EXPECT_EQ(a.labels, oracle::nearest_labels(rows_of(pts), rows_of(cb)));
  EXPECT_EQ(std::accumulate(a.counts.begin(), a.counts.end(), std::size_t{0}), 100u);
}

TEST(Assign, DimensionMismatch) {
  try {
    (void)assign(random_points(3, 2, 1), random_points(2, 3, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(Requantize, FullSizeIsIdentityUpToNormOrder) {
  Codebook cb;
  cb.codevectors = points_from({{9, 9}, {1, 1}, {5, 5}, {3, 3}});
  const auto gm = requantize(cb, 4, SplitParams{});
  EXPECT_EQ(gm.group_of, (std::vector<std::size_t>{3, 0, 2, 1}));
}

TEST(Requantize, TwoPairsSplitLowFirst) {
  Codebook cb;
  cb.codevectors = points_from({{100}, {0}, {101}, {1}});
  std::uint64_t mask = 0;
  oracle::best_two_partition_mse(rows_of(cb.codevectors), &mask);
  // oracle partition: {0,1} vs {100,101}
  EXPECT_TRUE(mask == 0b0101 || mask == 0b1010);
  const auto gm = requantize(cb, 2, SplitParams{});
  EXPECT_EQ(gm.group_of, (std::vector<std::size_t>{1, 0, 1, 0}));
}

TEST(Requantize, Codebook128To8Groups) {
  const auto ts = extract_training_vectors(generate_phantom(PhantomSpec{}), 4, 3);
  const auto lbg = lbg_generate(ts, 128, SplitParams{});
  const auto r = requantize_detailed(lbg.codebook, 8, SplitParams{});
  EXPECT_EQ(r.groups.group_count, 8u);
  ASSERT_EQ(r.groups.group_of.size(), 128u);
  for (auto g : r.groups.group_of) EXPECT_LT(g, 8u);
  for (std::size_t g = 1; g < 8; ++g) {
    double a = 0;
    double b = 0;
    for (double v : r.group_codebook.codevectors[g - 1]) a += v * v;
    for (double v : r.group_codebook.codevectors[g]) b += v * v;
    EXPECT_LE(a, b);
  }
}

TEST(Requantize, InvalidGroupCounts) {
  Codebook cb;
  cb.codevectors = points_from({{1}, {2}, {3}, {4}});
  EXPECT_THROW((void)requantize(cb, 3, SplitParams{}), Error);
  EXPECT_THROW((void)requantize(cb, 8, SplitParams{}), Error);
  EXPECT_THROW((void)requantize(cb, 0, SplitParams{}), Error);
}

TEST(ClusterImages, SingleGroupKeepsOriginal) {
  const auto img = testing::random_image(10, 7, 5);
  const auto ts = extract_training_vectors(img, 4, 3);
  ClusterAssignment asg;
  asg.labels.assign(ts.vectors.size(), 0);
  asg.counts = {ts.vectors.size()};
  GroupMap gm{{0}, 3};
  const auto out = cluster_images(img, ts.geometry, asg, gm);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0], img);
  EXPECT_EQ(out[1], GrayImage(10, 7));
  EXPECT_EQ(out[2], GrayImage(10, 7));
}

TEST(ClusterImages, TwoBlocksSumToOriginal) {
  const auto img = testing::random_image(8, 3, 6);
  const auto ts = extract_training_vectors(img, 4, 3);
  ClusterAssignment asg{{0, 1}, {1, 1}};
  GroupMap gm{{0, 1}, 2};
  const auto out = cluster_images(img, ts.geometry, asg, gm);
  for (std::size_t i = 0; i < img.size(); ++i) {
    EXPECT_EQ(out[0].pixels()[i] + out[1].pixels()[i], img.pixels()[i]);
    EXPECT_TRUE(out[0].pixels()[i] == 0 || out[1].pixels()[i] == 0 || img.pixels()[i] == 0);
  }
}

TEST(ClusterImages, GeometryMismatch) {
  const auto img = testing::random_image(8, 3, 6);
  const auto ts = extract_training_vectors(img, 4, 3);
  ClusterAssignment asg{{0}, {1}};
  GroupMap gm{{0}, 1};
  try {
    (void)cluster_images(img, ts.geometry, asg, gm);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GeometryMismatch);
  }
}

}  // namespace
}  // namespace vqdemark::vq

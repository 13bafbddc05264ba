#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "helpers.hpp"
#include "stray/neighbors.hpp"

using stray::DataMatrix;
using stray::KdTree;

namespace {

// Full distance matrix, each row sorted by (distance, id), self dropped.
std::vector<std::vector<std::pair<double, std::size_t>>> all_pairs(const DataMatrix& x) {
  std::vector<std::vector<std::pair<double, std::size_t>>> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.rows(); ++j) {
      if (i == j) continue;
      double s = 0.0;
      for (std::size_t c = 0; c < x.cols(); ++c) s += (x(i, c) - x(j, c)) * (x(i, c) - x(j, c));
      out[i].push_back({std::sqrt(s), j});
    }
    std::sort(out[i].begin(), out[i].end());
  }
  return out;
}

const DataMatrix line3 = DataMatrix::from_rows({{0}, {1}, {3}});

}  // namespace

TEST(KnnExact, LineExample) {
  const auto r = stray::knn_exact(line3, 2);
  EXPECT_EQ(r.distance(0, 0), 1.0);
  EXPECT_EQ(r.distance(0, 1), 3.0);
  EXPECT_EQ(r.distance(1, 0), 1.0);
  EXPECT_EQ(r.distance(1, 1), 2.0);
  EXPECT_EQ(r.distance(2, 0), 2.0);
  EXPECT_EQ(r.distance(2, 1), 3.0);
  EXPECT_EQ(r.index(0, 0), 1u);
  EXPECT_EQ(r.index(2, 0), 1u);
}

TEST(KnnExact, MatchesAllPairsSort) {
  const auto x = testutil::uniform_matrix(50, 5, 7);
  const auto oracle = all_pairs(x);
  const auto r = stray::knn_exact(x, 10);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < 10; ++j) {
      EXPECT_NEAR(r.distance(i, j), oracle[i][j].first, 1e-12);
      EXPECT_EQ(r.index(i, j), oracle[i][j].second);
    }
  }
}

TEST(KnnExact, KOneIsNearestNeighbour) {
  const auto x = testutil::uniform_matrix(30, 3, 11);
  const auto oracle = all_pairs(x);
  const auto r = stray::knn_exact(x, 1);
  for (std::size_t i = 0; i < x.rows(); ++i) EXPECT_NEAR(r.distance(i, 0), oracle[i][0].first, 1e-12);
}

TEST(KnnExact, TooFewRows) {
  EXPECT_THROW(stray::knn_exact(line3, 3), stray::TooFewObservations);
  EXPECT_THROW(stray::knn_kdtree(line3, 3), stray::TooFewObservations);
}

TEST(KnnKdTree, LineExample) {
  EXPECT_EQ(stray::knn_kdtree(line3, 2, 0.0), stray::knn_exact(line3, 2));
}

TEST(KnnKdTree, BitEqualToBruteForce) {
  const auto x = testutil::uniform_matrix(200, 10, 3);
  EXPECT_EQ(stray::knn_kdtree(x, 10, 0.0), stray::knn_exact(x, 10));
}

TEST(KnnKdTree, BitEqualWithDuplicates) {
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 60; ++i) rows.push_back({static_cast<double>(i % 7), static_cast<double>(i % 3)});
  const auto x = DataMatrix::from_rows(rows);
  EXPECT_EQ(stray::knn_kdtree(x, 12, 0.0), stray::knn_exact(x, 12));
}

TEST(KnnKdTree, ApproximateBound) {
  const auto x = testutil::uniform_matrix(500, 4, 5);
  const auto exact = stray::knn_exact(x, 10);
  const auto approx = stray::knn_kdtree(x, 10, 0.5);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    EXPECT_LE(approx.distance(i, 9), 1.5 * exact.distance(i, 9) * (1 + 1e-12));
    EXPECT_GE(approx.distance(i, 9), exact.distance(i, 9));
  }
}

TEST(KnnKdTree, NegativeEpsRejected) {
  EXPECT_THROW(stray::knn_kdtree(line3, 1, -0.1), stray::InvalidArgument);
}

TEST(KdTreeIndex, EveryPointFindsItself) {
  const auto x = testutil::uniform_matrix(1000, 3, 9);
  const KdTree tree(x);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto nn = tree.query(x.row(i), 1);
    ASSERT_EQ(nn.size(), 1u);
    EXPECT_EQ(nn[0].distance, 0.0);
    EXPECT_EQ(nn[0].row, i);
  }
}

TEST(KdTreeIndex, LeavesPartitionRows) {
  const auto x = testutil::uniform_matrix(777, 5, 13);
  const KdTree tree(x, 16);
  std::vector<std::size_t> all;
  for (const auto& leaf : tree.leaves()) {
    EXPECT_LE(leaf.size(), 16u);
    EXPECT_FALSE(leaf.empty());
    all.insert(all.end(), leaf.begin(), leaf.end());
  }
  std::sort(all.begin(), all.end());
  std::vector<std::size_t> want(x.rows());
  std::iota(want.begin(), want.end(), 0);
  EXPECT_EQ(all, want);
}

TEST(KdTreeIndex, SinglePoint) {
  const auto x = DataMatrix::from_rows({{1.0, 2.0}});
  const KdTree tree(x);
  EXPECT_EQ(tree.leaves().size(), 1u);
  EXPECT_EQ(tree.size(), 1u);
  const double q[] = {1.0, 3.0};
  const auto nn = tree.query(q, 1);
  ASSERT_EQ(nn.size(), 1u);
  EXPECT_EQ(nn[0].distance, 1.0);
  EXPECT_EQ(nn.front().row, 0u);
}

TEST(KdTreeIndex, DuplicatesTieToSmallerRow) {
  const auto x = DataMatrix::from_rows({{0, 0}, {5, 5}, {0, 0}, {0, 0}});
  const KdTree tree(x);
  const double q[] = {0.0, 0.0};
  const auto nn = tree.query(q, 3);
  ASSERT_EQ(nn.size(), 3u);
  EXPECT_EQ(nn[0].row, 0u);
  EXPECT_EQ(nn[1].row, 2u);
  EXPECT_EQ(nn[2].row, 3u);
  const auto excl = tree.query(q, 1, 0.0, 0);
  EXPECT_EQ(excl[0].row, 2u);
}

TEST(KdTreeIndex, NearestPairIsSymmetric) {
  const auto x = testutil::uniform_matrix(300, 2, 17);
  const auto r = stray::knn_kdtree(x, 1);
  std::size_t best = 0;
  for (std::size_t i = 1; i < x.rows(); ++i) {
    if (r.distance(i, 0) < r.distance(best, 0)) best = i;
  }
  const std::size_t partner = r.index(best, 0);
  EXPECT_EQ(r.index(partner, 0), best);
  EXPECT_EQ(r.distance(partner, 0), r.distance(best, 0));
}

TEST(SquaredDistance, MatchesNaiveSum) {
  const double a[] = {1, 2, 3, 4, 5, 6, 7};
  const double b[] = {0, 0, 0, 0, 0, 0, 1};
  EXPECT_EQ(stray::squared_distance(a, b), 1 + 4 + 9 + 16 + 25 + 36 + 36);
}

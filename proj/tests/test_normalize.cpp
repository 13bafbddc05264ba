#include <gtest/gtest.h>

#include "helpers.hpp"
#include "stray/normalize.hpp"

using stray::DataMatrix;

TEST(Unitize, ColumnExamples) {
  const auto m = stray::unitize(DataMatrix::from_rows({{0, -2, 7}, {10, 0, 7}, {30, 2, 7}}));
  EXPECT_DOUBLE_EQ(m(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(m(1, 0), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(m(2, 0), 1.0);
  EXPECT_DOUBLE_EQ(m(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(m(1, 1), 0.5);
  EXPECT_DOUBLE_EQ(m(2, 1), 1.0);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(m(i, 2), 0.0);
}

TEST(Unitize, BoundsAndIdempotence) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto x = testutil::normal_matrix(40, 6, seed);
    const auto u = stray::unitize(x);
    for (std::size_t j = 0; j < u.cols(); ++j) {
      double lo = 1.0, hi = 0.0;
      for (std::size_t i = 0; i < u.rows(); ++i) {
        lo = std::min(lo, u(i, j));
        hi = std::max(hi, u(i, j));
      }
      EXPECT_EQ(lo, 0.0);
      EXPECT_EQ(hi, 1.0);
    }
    EXPECT_EQ(stray::unitize(u), u);
  }
}

TEST(Unitize, ColumnRanges) {
  const auto r = stray::column_ranges(DataMatrix::from_rows({{1, 5}, {-3, 5}, {2, 5}}));
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0].min, -3.0);
  EXPECT_EQ(r[0].max, 2.0);
  EXPECT_EQ(r[1].min, 5.0);
  EXPECT_EQ(r[1].max, 5.0);
}

TEST(DataMatrixTest, RejectsBadInput) {
  EXPECT_THROW(DataMatrix(2, 2, {1, 2, 3}), stray::DataError);
  EXPECT_THROW(DataMatrix(0, 2, {}), stray::DataError);
  EXPECT_THROW(DataMatrix::from_rows({{1, 2}, {3}}), stray::DataError);
  EXPECT_THROW(DataMatrix(1, 2, {1.0, std::nan("")}), stray::DataError);
}

#include <gtest/gtest.h>

#include "stray/scoring.hpp"
#include "stray/synth.hpp"

using stray::DataMatrix;

namespace {

stray::KnnResult profile(const std::vector<std::vector<double>>& rows) {
  stray::KnnResult r(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) r.distances(i)[j] = rows[i][j];
  }
  return r;
}

}  // namespace

TEST(MaxGap, EqualDistancesTieToFirstRank) {
  const auto s = stray::max_gap_scores(profile({{5, 5, 5}}));
  EXPECT_EQ(s.gap_index[0], 1u);
  EXPECT_EQ(s.scores[0], 5.0);
}

TEST(MaxGap, PicksDistanceAboveWidestJump) {
  const auto s = stray::max_gap_scores(profile({{0.1, 0.2, 2.0, 2.1}, {3.0, 3.1, 3.2, 3.3}}));
  EXPECT_EQ(s.gap_index[0], 3u);
  EXPECT_EQ(s.scores[0], 2.0);
  EXPECT_EQ(s.gap_index[1], 1u);
  EXPECT_EQ(s.scores[1], 3.0);
}

TEST(MaxGap, ConsecutiveRuleIgnoresFirstDistance) {
  const auto s =
      stray::max_gap_scores(profile({{3.0, 3.1, 3.5, 3.6}}), stray::GapRule::consecutive);
  EXPECT_EQ(s.gap_index[0], 3u);
  EXPECT_EQ(s.scores[0], 3.5);
}

TEST(MaxGap, SingleNeighbour) {
  const auto s = stray::max_gap_scores(profile({{0.4}, {1.5}}));
  EXPECT_EQ(s.scores[0], 0.4);
  EXPECT_EQ(s.scores[1], 1.5);
  EXPECT_EQ(s.gap_index[1], 1u);
}

TEST(MaxGap, ScaleEquivariant) {
  const auto base = profile({{0.1, 0.3, 0.9}, {0.2, 0.25, 0.3}});
  auto scaled = base;
  for (std::size_t i = 0; i < 2; ++i) {
    for (auto& d : scaled.distances(i)) d *= 4.0;
  }
  const auto a = stray::max_gap_scores(base);
  const auto b = stray::max_gap_scores(scaled);
  EXPECT_EQ(a.gap_index, b.gap_index);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(b.scores[i], 4.0 * a.scores[i]);
}

TEST(MaxGap, SingletonAnomalyProfile) {
  double mean_nn = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto ds = stray::synth::scenario("fig3_single", stray::derive_seed(7, seed));
    const auto knn = stray::knn_exact(ds.data, 10);
    const auto s = stray::max_gap_scores(knn);
    const std::size_t a = ds.planted_rows.front();
    ASSERT_EQ(s.gap_index[a], 1u);
    ASSERT_EQ(s.scores[a], knn.distance(a, 0));
    mean_nn += knn.distance(a, 0) / 100.0;
    // Gaussian tails put a few typical points outside the band
    std::size_t in_band = 0;
    for (std::size_t i = 0; i < ds.data.rows(); ++i) {
      if (i == a) continue;
      const double nn = knn.distance(i, 0);
      in_band += nn >= 0.0015 && nn <= 2.5 ? 1 : 0;
      ASSERT_LT(s.scores[i], s.scores[a]);
    }
    ASSERT_GE(in_band, 494u) << "seed " << seed;
  }
  EXPECT_NEAR(mean_nn, 14.8, 0.3);
}

TEST(MaxGap, MicroClusterProfile) {
  const auto ds = stray::synth::scenario("fig3_micro", stray::synth::kDefaultSeed);
  const auto s = stray::max_gap_scores(stray::knn_exact(ds.data, 10));
  const auto knn = stray::knn_exact(ds.data, 10);
  for (std::size_t a : ds.planted_rows) {
    EXPECT_EQ(s.gap_index[a], 3u);
    EXPECT_EQ(s.scores[a], knn.distance(a, 2));
    EXPECT_NEAR(knn.distance(a, 0), 0.7, 0.1);
  }
}

TEST(MaxGap, IndexInRangeAndScoreIsProfileValue) {
  const auto ds = stray::synth::scenario("b", 3);
  const auto knn = stray::knn_exact(ds.data, 7);
  const auto s = stray::max_gap_scores(knn);
  for (std::size_t i = 0; i < knn.rows(); ++i) {
    ASSERT_GE(s.gap_index[i], 1u);
    ASSERT_LE(s.gap_index[i], 7u);
    EXPECT_EQ(s.scores[i], knn.distance(i, s.gap_index[i] - 1));
  }
}

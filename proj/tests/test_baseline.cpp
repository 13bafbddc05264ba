#include <gtest/gtest.h>

#include "helpers.hpp"
#include "stray/baseline.hpp"
#include "stray/detect.hpp"
#include "stray/synth.hpp"

using stray::DataMatrix;
namespace bl = stray::baseline;

TEST(LeaderRadius, Examples) {
  EXPECT_NEAR(bl::default_radius(10000, 1), 0.1 / std::log(1e4), 1e-15);
  EXPECT_NEAR(bl::default_radius(10000, 1), 0.010857, 1e-6);
  EXPECT_NEAR(bl::default_radius(8, 2), 0.0694, 1e-4);
  EXPECT_NEAR(bl::default_radius(1000, 10000), 0.1, 1e-4);
  EXPECT_THROW(bl::default_radius(1, 2), stray::InvalidArgument);
}

TEST(Leader, HandTrace) {
  const auto m = bl::leader_clusters(DataMatrix::from_rows({{0}, {0.05}, {1}}), 0.1);
  EXPECT_EQ(m.exemplar_rows, (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(m.membership, (std::vector<std::size_t>{0, 0, 2}));
}

TEST(Leader, HugeRadiusGivesOneCluster) {
  const auto x = testutil::uniform_matrix(100, 3, 1, 0.0, 1.0);
  const auto m = bl::leader_clusters(x, 10.0);
  EXPECT_EQ(m.cluster_count(), 1u);
  for (auto e : m.membership) EXPECT_EQ(e, 0u);
}

TEST(Leader, MembersLieWithinRadius) {
  const auto x = testutil::uniform_matrix(400, 2, 8, 0.0, 1.0);
  const auto m = bl::leader_clusters(x, 0.05);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    EXPECT_LE(stray::squared_distance(x.row(i), x.row(m.membership[i])), 0.05 * 0.05);
  }
  EXPECT_THROW(bl::leader_clusters(x, 0.0), stray::InvalidArgument);
}

TEST(Leader, ScenarioFFormsFifteenClusters) {
  const auto ds = stray::synth::scenario("f", stray::synth::kDefaultSeed);
  const auto unit = stray::unitize(ds.data);
  const auto m = bl::leader_clusters(unit, bl::default_radius(unit.rows(), unit.cols()));
  EXPECT_EQ(m.cluster_count(), 15u);
  std::size_t typical = 0;
  for (auto e : m.exemplar_rows) typical += ds.is_planted()[e] ? 0 : 1;
  EXPECT_EQ(typical, 14u);
}

TEST(HdOutliers, Version1WithExactWindowIsStrayAtKOne) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto x = testutil::normal_matrix(150, 3, seed);
    const auto hd = bl::hdoutliers_detect(x, 0.05, false, false);
    stray::StrayConfig c;
    c.k = 1;
    c.alpha = 0.05;
    const auto s = stray::detect(x, c);
    EXPECT_EQ(hd.flags, s.flags);
    EXPECT_EQ(hd.scores, s.scores);
    EXPECT_EQ(hd.threshold, s.threshold);
  }
}

TEST(HdOutliers, ClusterVerdictSpreadsToMembers) {
  const auto ds = stray::synth::scenario("e", stray::synth::kDefaultSeed);
  const auto r = bl::hdoutliers_detect(ds.data, 0.05, true, true);
  ASSERT_TRUE(r.clusters.has_value());
  for (std::size_t i = 0; i < ds.data.rows(); ++i) {
    EXPECT_EQ(r.flags[i], r.flags[r.clusters->membership[i]]);
  }
  // the compact class collapses to few balls and is declared anomalous
  std::size_t compact_flagged = 0;
  for (std::size_t i = 1000; i < 2000; ++i) compact_flagged += r.flags[i] ? 1 : 0;
  EXPECT_GE(compact_flagged, 500u);
}

TEST(HdOutliers, Version2MissesScenarioFOutlier) {
  const auto ds = stray::synth::scenario("f", stray::synth::kDefaultSeed);
  const auto r = bl::hdoutliers_detect(ds.data, 0.05, true, true);
  EXPECT_FALSE(r.flags[ds.planted_rows.front()]);
  EXPECT_TRUE(stray::detect(ds.data).flags[ds.planted_rows.front()]);
}

TEST(HdOutliers, MicroClusterMissedByBothVersions) {
  const auto ds = stray::synth::scenario("c", stray::synth::kDefaultSeed);
  for (bool clustering : {false, true}) {
    const auto r = bl::hdoutliers_detect(ds.data, 0.05, clustering, true);
    for (auto p : ds.planted_rows) EXPECT_FALSE(r.flags[p]) << "clustering " << clustering;
  }
}

TEST(HdOutliers, FewClustersWarn) {
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 30; ++i) rows.push_back({0.001 * (i % 5), 0.0});
  rows.push_back({1.0, 1.0});
  const auto r = bl::hdoutliers_detect(DataMatrix::from_rows(rows), 0.05, true, true);
  ASSERT_TRUE(r.warning.has_value());
  EXPECT_EQ(r.clusters->cluster_count(), 2u);
  EXPECT_THROW(bl::hdoutliers_detect(testutil::normal_matrix(9, 2, 1), 0.05, true, true),
               stray::SampleTooSmall);
}

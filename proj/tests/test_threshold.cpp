#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "stray/rng.hpp"
#include "stray/threshold.hpp"

using stray::GapWindow;

namespace {

// Straight transcription of the bottom-up search with 1-based arrays.
std::optional<double> naive_bound(std::vector<double> s, double alpha, double p, std::size_t tn) {
  const std::size_t n = s.size();
  std::sort(s.begin(), s.end());
  std::vector<double> x(n + 1), g(n + 1, 0.0);
  for (std::size_t i = 1; i <= n; ++i) x[i] = s[i - 1];
  for (std::size_t i = 2; i <= n; ++i) g[i] = x[i] - x[i - 1];
  const auto np = static_cast<std::size_t>(std::floor(static_cast<double>(n) * p));
  const std::size_t n4 = std::max<std::size_t>(std::min(tn, np), 2);
  for (std::size_t i = np + 1; i <= n; ++i) {
    double ghat = 0.0;
    for (std::size_t j = 2; j <= n4; ++j) {
      ghat += static_cast<double>(j) / static_cast<double>(n4 - 1) * g[i - j + 1];
    }
    if (g[i] > std::log(1.0 / alpha) * ghat) return x[i - 1];
  }
  return std::nullopt;
}

std::vector<double> exponential_sample(std::size_t n, std::uint64_t seed) {
  stray::Rng rng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = rng.exponential();
  return v;
}

}  // namespace

TEST(ExpectedGap, ConstantGaps) {
  const std::vector<double> g{0, 2, 2, 2, 2, 2};
  EXPECT_DOUBLE_EQ(stray::expected_gap(g, 5, 3), 2.5 * 2.0);
}

TEST(ExpectedGap, ZeroGaps) {
  const std::vector<double> g(8, 0.0);
  EXPECT_EQ(stray::expected_gap(g, 6, 4), 0.0);
}

TEST(ExpectedGap, DirectSubstitution) {
  const std::vector<double> g{0, 1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(stray::expected_gap(g, 5, 3), 6.0);
}

TEST(ExpectedGap, NeverReadsCandidateGap) {
  std::vector<double> g{0, 1, 2, 3, 4, 5, 6};
  const double before = stray::expected_gap(g, 7, 5);
  g[6] = 1e6;
  EXPECT_EQ(stray::expected_gap(g, 7, 5), before);
  // the reference window does read it
  const double incl = stray::expected_gap(g, 7, 5, GapWindow::include_candidate);
  EXPECT_GT(incl, before);
}

TEST(ExpectedGap, OutOfRange) {
  const std::vector<double> g{0, 1, 2};
  EXPECT_THROW(stray::expected_gap(g, 4, 2), std::out_of_range);
  EXPECT_THROW(stray::expected_gap(g, 2, 3), std::out_of_range);
  EXPECT_THROW(stray::expected_gap(g, 3, 1), std::out_of_range);
}

TEST(BottomUp, IdenticalScoresFlagNothing) {
  const std::vector<double> s(40, 1.25);
  const auto d = stray::bottom_up_threshold(s, 0.01);
  EXPECT_FALSE(d.bound.has_value());
  EXPECT_EQ(std::count(d.flags.begin(), d.flags.end(), true), 0);
}

TEST(BottomUp, MatchesNaiveTranscription) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    stray::Rng rng(seed);
    const std::size_t n = 10 + rng.below(200);
    auto s = exponential_sample(n, seed + 1000);
    const std::size_t planted = rng.below(4);
    for (std::size_t a = 0; a < planted; ++a) s[rng.below(n)] += 5.0 + 10.0 * rng.uniform();
    for (double alpha : {0.001, 0.01, 0.05, 0.2}) {
      const auto d = stray::bottom_up_threshold(s, alpha, 0.5, 50);
      const auto want = naive_bound(s, alpha, 0.5, 50);
      ASSERT_EQ(d.bound, want) << "seed " << seed << " alpha " << alpha;
      for (std::size_t i = 0; i < n; ++i) {
        ASSERT_EQ(d.flags[i], want.has_value() && s[i] > *want);
      }
    }
  }
}

TEST(BottomUp, PlantedExtremeIsFlagged) {
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    auto s = exponential_sample(99, seed);
    s.push_back(50.0);
    hits += stray::bottom_up_threshold(s, 0.05).flags.back() ? 1 : 0;
  }
  EXPECT_GT(hits, 990);
}

TEST(BottomUp, SmallerAlphaFlagsSubset) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto s = exponential_sample(99, seed);
    s.push_back(50.0);
    const auto strict = stray::bottom_up_threshold(s, 1e-6);
    const auto loose = stray::bottom_up_threshold(s, 0.1);
    for (std::size_t i = 0; i < s.size(); ++i) {
      EXPECT_TRUE(!strict.flags[i] || loose.flags[i]);
    }
  }
}

TEST(BottomUp, CutoffRankAndBound) {
  std::vector<double> s{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 100};
  const auto d = stray::bottom_up_threshold(s, 0.05);
  ASSERT_TRUE(d.bound.has_value());
  EXPECT_EQ(*d.bound, 10.0);
  EXPECT_EQ(*d.cutoff_rank, 11u);
  EXPECT_TRUE(d.flags.back());
  EXPECT_EQ(std::count(d.flags.begin(), d.flags.end(), true), 1);
  EXPECT_DOUBLE_EQ(d.log_alpha, std::log(20.0));
}

TEST(BottomUp, Errors) {
  const std::vector<double> nine(9, 1.0);
  EXPECT_THROW(stray::bottom_up_threshold(nine, 0.05), stray::SampleTooSmall);
  const std::vector<double> ten(10, 1.0);
  EXPECT_THROW(stray::bottom_up_threshold(ten, 0.0), stray::InvalidArgument);
  EXPECT_THROW(stray::bottom_up_threshold(ten, 1.0), stray::InvalidArgument);
  EXPECT_THROW(stray::bottom_up_threshold(ten, 0.05, 1.0), stray::InvalidArgument);
  EXPECT_THROW(stray::bottom_up_threshold(ten, 0.05, 0.5, 1), stray::InvalidArgument);
}

TEST(Spacings, SmallExample) {
  const std::vector<double> x{1, 2, 4, 8};
  const auto d = stray::standardized_spacings(x, 2);
  EXPECT_EQ(d.order_stats, (std::vector<double>{8, 4}));
  EXPECT_EQ(d.spacings, (std::vector<double>{4, 2}));
  EXPECT_EQ(d.standardized, (std::vector<double>{4, 4}));
}

TEST(Spacings, ConstantSample) {
  const std::vector<double> x(20, 3.0);
  const auto d = stray::standardized_spacings(x, 5);
  for (double v : d.spacings) EXPECT_EQ(v, 0.0);
}

TEST(Spacings, Errors) {
  const std::vector<double> x{1, 2, 3};
  EXPECT_THROW(stray::standardized_spacings(x, 2), stray::SampleTooSmall);
  EXPECT_THROW(stray::standardized_spacings(x, 0), stray::InvalidArgument);
}

TEST(Spacings, NormalSampleMeansNearTheoretical) {
  // i * D(i) for a normal tail has mean about 1 / sqrt(2 ln n); averaged over
  // ten ranks and 50 replicates this is stable to a few per cent.
  double sum = 0.0;
  for (std::uint64_t r = 0; r < 50; ++r) {
    stray::Rng rng(stray::derive_seed(5, r));
    std::vector<double> x(20000);
    for (double& v : x) v = rng.normal();
    const auto d = stray::standardized_spacings(x, 10);
    for (double v : d.standardized) sum += v;
  }
  const double mean = sum / 500.0;
  EXPECT_NEAR(mean, 0.265, 0.03);
}

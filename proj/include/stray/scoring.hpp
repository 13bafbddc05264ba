#pragma once

#include <vector>

#include "stray/core.hpp"
#include "stray/neighbors.hpp"

namespace stray {

struct ScoreSet {
  std::vector<double> scores;
  /// 1-based rank in the k-NN profile whose distance became the score.
  std::vector<std::size_t> gap_index;
};

/// Max-gap anomaly scores. For each row with ascending profile d1..dk, the
/// score is the distance sitting just above the widest jump in the profile.
/// Ties between equal jumps go to the smallest rank.
inline ScoreSet max_gap_scores(const KnnResult& knn,
                               GapRule rule = GapRule::from_zero) {
  const std::size_t n = knn.rows();
  const std::size_t k = knn.k();
  if (k < 1) throw InvalidArgument("k-NN result has no neighbours");
  ScoreSet out{std::vector<double>(n), std::vector<std::size_t>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const auto d = knn.distances(i);
    std::size_t best = 0;
    if (rule == GapRule::from_zero) {
      double widest = d[0];
      for (std::size_t j = 1; j < k; ++j) {
        const double gap = d[j] - d[j - 1];
        if (gap > widest) {
          widest = gap;
          best = j;
        }
      }
    } else if (k > 1) {
      best = 1;
      double widest = d[1] - d[0];
      for (std::size_t j = 2; j < k; ++j) {
        const double gap = d[j] - d[j - 1];
        if (gap > widest) {
          widest = gap;
          best = j;
        }
      }
    }
    out.scores[i] = d[best];
    out.gap_index[i] = best + 1;
  }
  return out;
}

}  // namespace stray

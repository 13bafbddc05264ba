#pragma once

#include "stray/core.hpp"
#include "stray/neighbors.hpp"
#include "stray/normalize.hpp"
#include "stray/scoring.hpp"
#include "stray/threshold.hpp"

namespace stray {

/// k-NN profiles for `data` by the configured search method; the data is
/// used as given (no normalisation).
inline KnnResult search_neighbors(const DataMatrix& data, const StrayConfig& config) {
  return config.search_method == SearchMethod::brute
             ? knn_exact(data, config.k)
             : knn_kdtree(data, config.k, config.eps);
}

inline ThresholdParams threshold_params(const StrayConfig& config) {
  return {config.alpha, config.start_proportion, config.tail_count,
          GapWindow::exclude_candidate};
}

/// Full pipeline: unitize, k-NN search, max-gap scores, bottom-up threshold.
inline AnomalyReport detect(const DataMatrix& data, const StrayConfig& config = {}) {
  config.validate();
  if (data.rows() <= config.k) {
    throw TooFewObservations("too few observations for k: need more than " +
                             std::to_string(config.k) + " rows, got " +
                             std::to_string(data.rows()));
  }
  if (data.rows() < kMinThresholdSample) {
    throw SampleTooSmall("sample too small for threshold estimation: need at least " +
                         std::to_string(kMinThresholdSample) + " rows, got " +
                         std::to_string(data.rows()));
  }

  const KnnResult knn = config.normalize == Normalization::unitize
                            ? search_neighbors(unitize(data), config)
                            : search_neighbors(data, config);
  ScoreSet scored = max_gap_scores(knn, config.gap_rule);
  ThresholdDecision decision = bottom_up_threshold(scored.scores, threshold_params(config));

  AnomalyReport report;
  report.scores = std::move(scored.scores);
  report.gap_index = std::move(scored.gap_index);
  report.flags = std::move(decision.flags);
  report.threshold = decision.bound;
  return report;
}

}  // namespace stray

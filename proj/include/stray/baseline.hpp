#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "stray/core.hpp"
#include "stray/neighbors.hpp"
#include "stray/normalize.hpp"
#include "stray/threshold.hpp"

// HDoutliers, the nearest-neighbour detector stray is compared against.
// Implemented with its known weaknesses intact: optional one-pass Leader
// clustering before scoring, and a threshold window that can include the
// candidate gap.
namespace stray::baseline {

/// Leader radius for n points in the d-dimensional unit hypercube.
inline double default_radius(std::size_t n, std::size_t d) {
  if (n < 2) throw InvalidArgument("default_radius needs n >= 2");
  if (d < 1) throw InvalidArgument("default_radius needs d >= 1");
  return 0.1 / std::pow(std::log(static_cast<double>(n)), 1.0 / static_cast<double>(d));
}

struct ClusterModel {
  /// Row ids of the exemplars, in creation order.
  std::vector<std::size_t> exemplar_rows;
  /// Exemplar row id for every row.
  std::vector<std::size_t> membership;
  double radius = 0.0;

  std::size_t cluster_count() const noexcept { return exemplar_rows.size(); }
};

/// One pass in row order: a row joins the first exemplar within `radius`,
/// otherwise it becomes a new exemplar.
inline ClusterModel leader_clusters(const DataMatrix& data, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw InvalidArgument("leader radius must be positive and finite");
  }
  ClusterModel model;
  model.radius = radius;
  model.membership.resize(data.rows());
  const double r2 = radius * radius;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const auto x = data.row(i);
    std::size_t owner = i;
    for (std::size_t e : model.exemplar_rows) {
      if (squared_distance(x, data.row(e)) <= r2) {
        owner = e;
        break;
      }
    }
    if (owner == i) model.exemplar_rows.push_back(i);
    model.membership[i] = owner;
  }
  return model;
}

struct HdOutliersConfig {
  double alpha = 0.05;
  bool use_clustering = true;
  /// Reproduce the reference threshold, whose window includes the candidate.
  bool flawed_threshold = true;
  double start_proportion = 0.5;
  std::size_t tail_count = 50;
  /// Overrides default_radius when set.
  std::optional<double> radius;
};

struct HdOutliersResult {
  std::vector<bool> flags;
  /// Nearest-neighbour distance of every scored row; for clustered runs each
  /// member carries its exemplar's score.
  std::vector<double> scores;
  std::optional<double> threshold;
  std::optional<ClusterModel> clusters;
  /// Set when the threshold rests on too few scores to be stable.
  std::optional<std::string> warning;

  std::size_t flagged_count() const {
    std::size_t c = 0;
    for (bool f : flags) c += f ? 1 : 0;
    return c;
  }
};

namespace detail {

inline std::vector<double> nearest_distances(const DataMatrix& data) {
  const KnnResult knn = knn_exact(data, 1);
  std::vector<double> out(data.rows());
  for (std::size_t i = 0; i < data.rows(); ++i) out[i] = knn.distance(i, 0);
  return out;
}

}  // namespace detail

/// Version 1 (no clustering) scores every row by its nearest-neighbour
/// distance. Version 2 scores only Leader exemplars and spreads each
/// exemplar's verdict to its whole cluster.
inline HdOutliersResult hdoutliers_detect(const DataMatrix& data, const HdOutliersConfig& config) {
  if (data.rows() < kMinThresholdSample) {
    throw SampleTooSmall("HDoutliers needs at least " + std::to_string(kMinThresholdSample) +
                         " rows, got " + std::to_string(data.rows()));
  }
  const ThresholdParams params{config.alpha, config.start_proportion, config.tail_count,
                               config.flawed_threshold ? GapWindow::include_candidate
                                                       : GapWindow::exclude_candidate};
  const DataMatrix unit = unitize(data);
  HdOutliersResult out;

  if (!config.use_clustering) {
    out.scores = detail::nearest_distances(unit);
    const auto decision = bottom_up_threshold(out.scores, params);
    out.flags = decision.flags;
    out.threshold = decision.bound;
    return out;
  }

  const double radius = config.radius ? *config.radius : default_radius(unit.rows(), unit.cols());
  ClusterModel model = leader_clusters(unit, radius);
  const std::size_t m = model.cluster_count();
  out.flags.assign(data.rows(), false);
  out.scores.assign(data.rows(), 0.0);

  if (m < kMinThresholdSample) {
    out.warning = "only " + std::to_string(m) + " Leader clusters (fewer than " +
                  std::to_string(kMinThresholdSample) +
                  "); threshold estimate is unstable";
  }
  if (m < 2) {
    out.clusters = std::move(model);
    return out;
  }

  const DataMatrix exemplars = unit.select_rows(model.exemplar_rows);
  const std::vector<double> exemplar_scores = detail::nearest_distances(exemplars);
  const auto decision = stray::detail::bottom_up_scan(exemplar_scores, params);
  out.threshold = decision.bound;

  std::vector<std::size_t> slot(data.rows(), 0);
  for (std::size_t c = 0; c < m; ++c) slot[model.exemplar_rows[c]] = c;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const std::size_t c = slot[model.membership[i]];
    out.scores[i] = exemplar_scores[c];
    out.flags[i] = decision.flags[c];
  }
  out.clusters = std::move(model);
  return out;
}

inline HdOutliersResult hdoutliers_detect(const DataMatrix& data, double alpha,
                                          bool use_clustering, bool flawed_threshold) {
  HdOutliersConfig config;
  config.alpha = alpha;
  config.use_clustering = use_clustering;
  config.flawed_threshold = flawed_threshold;
  return hdoutliers_detect(data, config);
}

}  // namespace stray::baseline

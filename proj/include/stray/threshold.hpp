#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "stray/core.hpp"

namespace stray {

/// Smallest score count the threshold search accepts.
inline constexpr std::size_t kMinThresholdSample = 10;

/// Which gaps feed the exponential mean estimate for candidate rank i.
///  exclude_candidate: g(i-1) .. g(i-n4+1), never the gap under test.
///  include_candidate: g(i) .. g(i-n4+2), the window shifted up by one so the
///                     candidate's own gap dilutes its threshold. This is the
///                     behaviour of the reference HDoutliers implementation.
enum class GapWindow { exclude_candidate, include_candidate };

/// Weighted estimate of the exponential spacing mean ahead of rank `i`.
/// `gaps` holds g1..gn (gaps[0] is g1); `i` is 1-based. The weight on the
/// gap j places below the candidate is j / (n4 - 1), j = 2..n4.
inline double expected_gap(std::span<const double> gaps, std::size_t i, std::size_t n4,
                           GapWindow window = GapWindow::exclude_candidate) {
  if (n4 < 2) throw std::out_of_range("fit window n4 must be at least 2");
  const std::size_t shift = window == GapWindow::exclude_candidate ? 1 : 2;
  // lowest index touched is i - n4 + shift, which must be >= 1
  if (i > gaps.size() || i + shift < n4 + 1) {
    throw std::out_of_range("expected_gap: rank " + std::to_string(i) +
                            " with window " + std::to_string(n4) +
                            " falls outside the gap sequence");
  }
  double sum = 0.0;
  const double denom = static_cast<double>(n4 - 1);
  for (std::size_t j = 2; j <= n4; ++j) {
    sum += (static_cast<double>(j) / denom) * gaps[i + shift - j - 1];
  }
  return sum;
}

struct ThresholdDecision {
  std::optional<double> bound;
  /// 1-based rank in the ascending scores of the first exceedance.
  std::optional<std::size_t> cutoff_rank;
  std::vector<bool> flags;
  double log_alpha = 0.0;
};

struct ThresholdParams {
  double alpha = 0.01;
  double start_proportion = 0.5;
  std::size_t tail_count = 50;
  GapWindow window = GapWindow::exclude_candidate;
};

namespace detail {

inline void validate(const ThresholdParams& params) {
  if (!(params.alpha > 0.0 && params.alpha < 1.0)) {
    throw InvalidArgument("alpha must lie in (0, 1)");
  }
  if (!(params.start_proportion > 0.0 && params.start_proportion < 1.0)) {
    throw InvalidArgument("start proportion p must lie in (0, 1)");
  }
  if (params.tail_count < 2) throw InvalidArgument("tail count tn must be at least 2");
}

/// Bottom-up scan without the minimum-sample guard. Needs at least two
/// scores; small samples give an unstable but well-defined answer.
inline ThresholdDecision bottom_up_scan(std::span<const double> scores,
                                        const ThresholdParams& params) {
  validate(params);
  const std::size_t n = scores.size();
  if (n < 2) throw SampleTooSmall("threshold search needs at least two scores");

  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> gaps(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) gaps[i] = sorted[i] - sorted[i - 1];

  const auto half = static_cast<std::size_t>(
      std::floor(static_cast<double>(n) * params.start_proportion));
  const std::size_t n4 = std::max<std::size_t>(std::min(params.tail_count, half), 2);
  const std::size_t start = std::max<std::size_t>(half, 1) + 1;

  ThresholdDecision out;
  out.log_alpha = std::log(1.0 / params.alpha);
  out.flags.assign(n, false);
  for (std::size_t i = start; i <= n; ++i) {
    const double ghat = expected_gap(gaps, i, n4, params.window);
    if (gaps[i - 1] > out.log_alpha * ghat) {
      out.cutoff_rank = i;
      out.bound = sorted[i - 2];
      break;
    }
  }
  if (out.bound) {
    for (std::size_t r = 0; r < n; ++r) out.flags[r] = scores[r] > *out.bound;
  }
  return out;
}

}  // namespace detail

/// Extreme-value threshold on a set of anomaly scores. Starting above the
/// lowest `start_proportion` of the sorted scores, each next score is tested
/// against the upper 1 - alpha point of an exponential fitted to the gaps
/// below it. The first exceedance fixes the bound; everything above it is
/// anomalous.
inline ThresholdDecision bottom_up_threshold(std::span<const double> scores,
                                             const ThresholdParams& params) {
  if (scores.size() < kMinThresholdSample) {
    throw SampleTooSmall("sample too small for threshold estimation: need at least " +
                         std::to_string(kMinThresholdSample) + " scores, got " +
                         std::to_string(scores.size()));
  }
  return detail::bottom_up_scan(scores, params);
}

inline ThresholdDecision bottom_up_threshold(std::span<const double> scores, double alpha,
                                             double start_proportion = 0.5,
                                             std::size_t tail_count = 50) {
  return bottom_up_threshold(scores, ThresholdParams{alpha, start_proportion, tail_count,
                                                     GapWindow::exclude_candidate});
}

struct SpacingDiagnostics {
  /// Top order statistics, descending: X(1) >= X(2) >= ... >= X(kmax).
  std::vector<double> order_stats;
  /// D(i) = X(i) - X(i+1), i = 1..kmax.
  std::vector<double> spacings;
  /// i * D(i).
  std::vector<double> standardized;
};

/// Upper order statistics and their spacings. Under a Gumbel-domain tail the
/// standardized spacings i * D(i) are approximately iid exponential.
inline SpacingDiagnostics standardized_spacings(std::span<const double> sample,
                                                std::size_t kmax) {
  if (kmax < 1) throw InvalidArgument("kmax must be at least 1");
  if (sample.size() <= kmax + 1) {
    throw SampleTooSmall("standardized_spacings needs more than kmax + 1 = " +
                         std::to_string(kmax + 1) + " values, got " +
                         std::to_string(sample.size()));
  }
  for (double v : sample) {
    if (!std::isfinite(v)) throw DataError("sample contains a non-finite value");
  }
  std::vector<double> top(sample.begin(), sample.end());
  std::partial_sort(top.begin(), top.begin() + static_cast<std::ptrdiff_t>(kmax + 1),
                    top.end(), std::greater<>());
  SpacingDiagnostics out;
  out.order_stats.assign(top.begin(), top.begin() + static_cast<std::ptrdiff_t>(kmax));
  for (std::size_t i = 0; i < kmax; ++i) {
    const double spacing = top[i] - top[i + 1];
    out.spacings.push_back(spacing);
    out.standardized.push_back(static_cast<double>(i + 1) * spacing);
  }
  return out;
}

}  // namespace stray

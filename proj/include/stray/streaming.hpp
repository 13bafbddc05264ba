#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "stray/core.hpp"
#include "stray/detect.hpp"

namespace stray {

struct WindowSpec {
  std::size_t width = 0;
  std::size_t step = 0;

  void validate(const StrayConfig& config) const {
    if (width <= config.k) {
      throw InvalidArgument("window width must exceed k (width " + std::to_string(width) +
                            ", k " + std::to_string(config.k) + ")");
    }
    if (step < 1 || step > width) {
      throw InvalidArgument("window step must lie in [1, width]");
    }
  }
};

/// Half-open range of global observation indices.
struct WindowRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  friend bool operator==(const WindowRange&, const WindowRange&) = default;
};

/// A core error raised while processing one window.
class WindowError : public Error {
 public:
  WindowError(std::size_t window_id, const std::string& what)
      : Error("window " + std::to_string(window_id) + ": " + what), window_id_(window_id) {}
  std::size_t window_id() const noexcept { return window_id_; }

 private:
  std::size_t window_id_;
};

/// Windows [0, w), [step, step + w), ... . When the regular grid leaves a
/// tail uncovered, one last full window [length - w, length) is added, so
/// every observation is scored and no partial window is ever formed.
inline std::vector<WindowRange> sliding_windows(std::size_t stream_length, const WindowSpec& spec) {
  if (spec.width == 0 || spec.step == 0) {
    throw InvalidArgument("window width and step must be positive");
  }
  if (stream_length < spec.width) {
    throw InvalidArgument("stream of length " + std::to_string(stream_length) +
                          " is shorter than the window width " + std::to_string(spec.width));
  }
  std::vector<WindowRange> out;
  for (std::size_t b = 0; b + spec.width <= stream_length; b += spec.step) {
    out.push_back({b, b + spec.width});
  }
  if (out.back().end < stream_length) {
    out.push_back({stream_length - spec.width, stream_length});
  }
  return out;
}

struct WindowReport {
  std::size_t window_id = 0;
  WindowRange range;
  AnomalyReport report;

  /// Flagged observations as global stream indices.
  std::vector<std::size_t> flagged_rows() const {
    std::vector<std::size_t> out;
    for (std::size_t r : report.flagged_rows()) out.push_back(range.begin + r);
    return out;
  }
};

namespace detail {

inline WindowReport run_window(std::size_t id, WindowRange range, const DataMatrix& batch,
                               const StrayConfig& config) {
  try {
    return {id, range, detect(batch, config)};
  } catch (const Error& e) {
    throw WindowError(id, e.what());
  }
}

}  // namespace detail

/// Batch detection over every full window of `source`. Windows share no
/// state: each is normalised and thresholded on its own.
inline std::vector<WindowReport> detect_stream(const DataMatrix& source, const StrayConfig& config,
                                               const WindowSpec& spec) {
  spec.validate(config);
  std::vector<WindowReport> out;
  const auto windows = sliding_windows(source.rows(), spec);
  std::vector<std::size_t> ids(spec.width);
  for (std::size_t w = 0; w < windows.size(); ++w) {
    for (std::size_t r = 0; r < spec.width; ++r) ids[r] = windows[w].begin + r;
    out.push_back(detail::run_window(w, windows[w], source.select_rows(ids), config));
  }
  return out;
}

/// Push-driven form of detect_stream for unbounded sources. Rows arrive one
/// at a time; a report is returned each time a window fills.
class WindowedDetector {
 public:
  WindowedDetector(StrayConfig config, WindowSpec spec) : config_(config), spec_(spec) {
    config_.validate();
    spec_.validate(config_);
  }

  std::optional<WindowReport> push(std::span<const double> row) {
    if (dims_ == 0) {
      if (row.empty()) throw DataError("stream rows must have at least one value");
      dims_ = row.size();
    } else if (row.size() != dims_) {
      throw DataError("stream row " + std::to_string(seen_) + " has " +
                      std::to_string(row.size()) + " values, expected " + std::to_string(dims_));
    }
    for (double v : row) {
      if (!std::isfinite(v)) {
        throw DataError("stream row " + std::to_string(seen_) + " has a non-finite value");
      }
    }
    buffer_.emplace_back(row.begin(), row.end());
    if (buffer_.size() > spec_.width) buffer_.pop_front();
    ++seen_;
    if (seen_ != next_begin_ + spec_.width) return std::nullopt;
    auto report = emit();
    next_begin_ += spec_.step;
    return report;
  }

  /// Call at end of stream: returns the end-aligned window covering rows
  /// the regular grid missed, if there are any.
  std::optional<WindowReport> finish() {
    if (seen_ < spec_.width || last_end_ == seen_) return std::nullopt;
    return emit();
  }

  std::size_t rows_seen() const noexcept { return seen_; }

 private:
  // the buffer always holds the latest `width` rows once full
  WindowReport emit() {
    std::vector<double> values;
    values.reserve(spec_.width * dims_);
    for (const auto& r : buffer_) values.insert(values.end(), r.begin(), r.end());
    const WindowRange range{seen_ - spec_.width, seen_};
    auto report = detail::run_window(next_id_, range,
                                     DataMatrix(spec_.width, dims_, std::move(values)), config_);
    ++next_id_;
    last_end_ = seen_;
    return report;
  }

  StrayConfig config_;
  WindowSpec spec_;
  std::size_t dims_ = 0;
  std::size_t seen_ = 0;
  std::size_t next_id_ = 0;
  std::size_t next_begin_ = 0;
  std::size_t last_end_ = 0;
  std::deque<std::vector<double>> buffer_;
};

struct SeriesCollection {
  std::vector<std::vector<double>> series;
  std::vector<std::string> ids;

  void validate() const {
    if (series.empty()) throw DataError("series collection is empty");
    if (!ids.empty() && ids.size() != series.size()) {
      throw DataError("series ids do not match the number of series");
    }
    const std::size_t w = series.front().size();
    for (std::size_t s = 0; s < series.size(); ++s) {
      if (series[s].size() != w) {
        throw DataError("series " + std::to_string(s) + " has length " +
                        std::to_string(series[s].size()) + ", expected " + std::to_string(w));
      }
      for (double v : series[s]) {
        if (!std::isfinite(v)) {
          throw DataError("series " + std::to_string(s) + " has a non-finite value");
        }
      }
    }
  }
};

struct FeatureMatrix {
  DataMatrix values;
  std::vector<std::string> feature_names;
  std::vector<std::string> series_ids;
};

inline const std::vector<std::string>& ts_feature_names() {
  static const std::vector<std::string> names{"mean",  "variance",    "acf1",     "trend_slope",
                                              "spike", "level_shift", "lumpiness"};
  return names;
}

namespace detail {

inline double sample_variance(std::span<const double> x) {
  const auto n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return ss / (n - 1.0);
}

}  // namespace detail

/// Seven per-series features. Degenerate series get 0 wherever a feature
/// would otherwise divide by zero.
inline std::vector<double> ts_features(std::span<const double> x) {
  const std::size_t w = x.size();
  if (w < 4) throw InvalidArgument("time series features need length >= 4");
  const auto wn = static_cast<double>(w);

  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= wn;
  // keep constant series exactly degenerate despite rounding in the sum
  if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; })) mean = x[0];

  double ss = 0.0;
  double lag1 = 0.0;
  for (std::size_t t = 0; t < w; ++t) {
    ss += (x[t] - mean) * (x[t] - mean);
    if (t + 1 < w) lag1 += (x[t] - mean) * (x[t + 1] - mean);
  }
  const double variance = ss / (wn - 1.0);
  const double acf1 = ss > 0.0 ? lag1 / ss : 0.0;

  // least squares slope against t = 0 .. w-1
  const double tbar = (wn - 1.0) / 2.0;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t t = 0; t < w; ++t) {
    const double dt = static_cast<double>(t) - tbar;
    sxy += dt * (x[t] - mean);
    sxx += dt * dt;
  }
  const double slope = sxy / sxx;

  std::vector<double> diffs(w - 1);
  double spike = 0.0;
  for (std::size_t t = 1; t < w; ++t) {
    diffs[t - 1] = x[t] - x[t - 1];
    spike = std::max(spike, std::abs(diffs[t - 1]));
  }
  const double lumpiness = detail::sample_variance(diffs);

  // rolling means over blocks of width w/4, compared with the adjacent block
  const std::size_t roll = std::max<std::size_t>(w / 4, 1);
  std::vector<double> means;
  for (std::size_t b = 0; b + roll <= w; ++b) {
    double acc = 0.0;
    for (std::size_t t = b; t < b + roll; ++t) acc += x[t];
    means.push_back(acc / static_cast<double>(roll));
  }
  double level_shift = 0.0;
  for (std::size_t t = roll; t < means.size(); ++t) {
    level_shift = std::max(level_shift, std::abs(means[t] - means[t - roll]));
  }

  return {mean, variance, acf1, slope, spike, level_shift, lumpiness};
}

inline FeatureMatrix ts_feature_matrix(const SeriesCollection& collection) {
  collection.validate();
  const std::size_t n = collection.series.size();
  const std::size_t m = ts_feature_names().size();
  std::vector<double> values;
  values.reserve(n * m);
  for (const auto& s : collection.series) {
    const auto f = ts_features(s);
    values.insert(values.end(), f.begin(), f.end());
  }
  std::vector<std::string> ids = collection.ids;
  if (ids.empty()) {
    for (std::size_t s = 0; s < n; ++s) ids.push_back("series_" + std::to_string(s));
  }
  return {DataMatrix(n, m, std::move(values)), ts_feature_names(), std::move(ids)};
}

}  // namespace stray
